#include "seqscale/markov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace seqscale::markov {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

double pow_lambda(double lambda, std::int64_t i) {
    // pow(0, 0) == 1, which is the convention the i = 0 identity needs.
    return std::pow(lambda, static_cast<double>(i));
}

void require_contracting(const TransitionModel& model, const char* op) {
    if (std::abs(model.lambda()) >= 1.0) {
        throw std::invalid_argument(std::string(op) +
                                    " requires |lambda| < 1 (got a + b = " +
                                    std::to_string(model.a() + model.b()) + ")");
    }
}

} // namespace

TransitionModel::TransitionModel(double correct_to_wrong, double wrong_to_correct)
    : a_(correct_to_wrong), b_(wrong_to_correct) {
    require(a_ >= 0.0 && a_ <= 1.0, "transition probability a must lie in [0, 1]");
    require(b_ >= 0.0 && b_ <= 1.0, "transition probability b must lie in [0, 1]");
    require(a_ + b_ > 0.0, "a + b must be positive; the chain has no fixed point otherwise");
}

StateDistribution::StateDistribution(double correct, double wrong)
    : p_correct(correct), p_wrong(wrong) {
    require(correct >= 0.0 && correct <= 1.0, "p_correct must lie in [0, 1]");
    require(wrong >= 0.0 && wrong <= 1.0, "p_wrong must lie in [0, 1]");
    require(std::abs(correct + wrong - 1.0) <= 1e-12, "state distribution must sum to 1");
}

const char* to_string(ScalingRegime regime) {
    switch (regime) {
        case ScalingRegime::Beneficial: return "beneficial";
        case ScalingRegime::Detrimental: return "detrimental";
        case ScalingRegime::Neutral: return "neutral";
    }
    return "unknown";
}

Matrix2 transition_matrix_power(const TransitionModel& model, std::int64_t i) {
    require(i >= 0, "matrix power index must be non-negative");
    const double sum = model.a() + model.b();
    const double li = pow_lambda(model.lambda(), i);
    return {{{{(model.b() + model.a() * li) / sum, model.a() * (1.0 - li) / sum}},
             {{model.b() * (1.0 - li) / sum, (model.a() + model.b() * li) / sum}}}};
}

double correct_probability_at(const TransitionModel& model, double p0, std::int64_t i) {
    require(i >= 0, "iteration index must be non-negative");
    require(p0 >= 0.0 && p0 <= 1.0, "p0 must lie in [0, 1]");
    if (i == 0) return p0;
    const double limit = model.fixed_point();
    return limit + pow_lambda(model.lambda(), i) * (p0 - limit);
}

StateDistribution evolve(const TransitionModel& model, const StateDistribution& initial,
                         std::int64_t i) {
    const Matrix2 power = transition_matrix_power(model, i);
    const double correct =
        initial.p_correct * power[0][0] + initial.p_wrong * power[1][0];
    const double wrong = initial.p_correct * power[0][1] + initial.p_wrong * power[1][1];
    return StateDistribution(correct, wrong);
}

double benefit_at(const TransitionModel& model, double p0, double sigma, std::int64_t i) {
    require(i >= 0, "iteration index must be non-negative");
    require(sigma >= 0.0, "sigma must be non-negative");
    const double limit = model.fixed_point();
    return (limit - p0) * (1.0 - pow_lambda(model.lambda(), i)) + sigma;
}

double asymptotic_benefit(const TransitionModel& model, double p0, double sigma) {
    require_contracting(model, "asymptotic_benefit");
    return model.fixed_point() - p0 + sigma;
}

ScalingRegime classify_regime(const TransitionModel& model, double p0, double sigma) {
    require_contracting(model, "classify_regime");
    const double threshold = model.fixed_point() + sigma;
    if (std::abs(p0 - threshold) <= kNeutralTolerance) return ScalingRegime::Neutral;
    return p0 < threshold ? ScalingRegime::Beneficial : ScalingRegime::Detrimental;
}

double convergence_limit(const TransitionModel& model) {
    return model.fixed_point();
}

namespace {

BoundEntry make_entry(const GroupEstimate& group, const char* name,
                      std::vector<std::string>& warnings) {
    BoundEntry entry;
    entry.trajectories = group.trajectories;
    entry.transitions = group.transitions;
    if (group.model.has_value()) {
        entry.value = group.model->fixed_point();
    } else if (group.trajectories > 0) {
        warnings.push_back(std::string(name) + " group has " +
                           std::to_string(group.trajectories) +
                           " trajectories but no transition estimate");
    }
    return entry;
}

} // namespace

BoundsReport bounds_from_classified(const GroupEstimate& all, const GroupEstimate& beneficial,
                                    const GroupEstimate& detrimental) {
    BoundsReport report;
    report.neutral = make_entry(all, "all", report.warnings);
    report.upper = make_entry(beneficial, "beneficial", report.warnings);
    report.lower = make_entry(detrimental, "detrimental", report.warnings);
    report.beneficial_trajectories = beneficial.trajectories;
    report.detrimental_trajectories = detrimental.trajectories;
    report.neutral_trajectories =
        all.trajectories - beneficial.trajectories - detrimental.trajectories;
    return report;
}

} // namespace seqscale::markov
