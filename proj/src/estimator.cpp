#include "seqscale/estimator.hpp"

#include <stdexcept>

namespace seqscale::estimate {

BetaPosterior init_prior(double p_hat_0, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prior strength gamma must be positive");
    if (!(p_hat_0 >= 0.0 && p_hat_0 <= 1.0)) {
        throw std::invalid_argument("prior probability must lie in [0, 1]");
    }
    // beta0 as gamma - alpha0 keeps the total pseudo-count mass exactly gamma.
    const double alpha = p_hat_0 * gamma;
    return {alpha, gamma - alpha};
}

BetaPosterior update_posterior(const BetaPosterior& posterior, double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw std::invalid_argument("verifier score must lie in [0, 1]");
    }
    return {posterior.alpha + score, posterior.beta + (1.0 - score)};
}

double map_estimate(const BetaPosterior& posterior) {
    const double total = posterior.alpha + posterior.beta;
    if (!(total > 0.0)) throw std::invalid_argument("posterior has no mass");
    if (posterior.alpha <= 1.0 || posterior.beta <= 1.0) {
        return posterior.alpha / total;
    }
    // alpha > 1 and beta > 1 imply total > 2, so the mode denominator is safe.
    return (posterior.alpha - 1.0) / (total - 2.0);
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
    from_correct += other.from_correct;
    correct_to_wrong += other.correct_to_wrong;
    from_wrong += other.from_wrong;
    wrong_to_correct += other.wrong_to_correct;
    return *this;
}

TransitionCounts count_transitions(std::span<const AnswerState> states) {
    TransitionCounts counts;
    if (states.size() < 2) return counts;
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        if (states[i] == AnswerState::Correct) {
            ++counts.from_correct;
            if (states[i + 1] == AnswerState::Wrong) ++counts.correct_to_wrong;
        } else {
            ++counts.from_wrong;
            if (states[i + 1] == AnswerState::Correct) ++counts.wrong_to_correct;
        }
    }
    return counts;
}

std::optional<markov::TransitionModel> try_estimate_transition_model(
    const TransitionCounts& counts, std::string* why) {
    if (counts.from_correct == 0 && counts.from_wrong == 0) {
        if (why) *why = "no transitions observed from either state";
        return std::nullopt;
    }
    if (counts.from_correct == 0) {
        if (why) *why = "no transitions observed from the correct state; a is not estimable";
        return std::nullopt;
    }
    if (counts.from_wrong == 0) {
        if (why) *why = "no transitions observed from the wrong state; b is not estimable";
        return std::nullopt;
    }
    const double a = static_cast<double>(counts.correct_to_wrong) /
                     static_cast<double>(counts.from_correct);
    const double b = static_cast<double>(counts.wrong_to_correct) /
                     static_cast<double>(counts.from_wrong);
    if (a + b <= 0.0) {
        if (why) *why = "estimated a + b = 0; the observed process never changes state";
        return std::nullopt;
    }
    return markov::TransitionModel(a, b);
}

markov::TransitionModel estimate_transition_model(const TransitionCounts& counts) {
    std::string why;
    auto model = try_estimate_transition_model(counts, &why);
    if (!model) throw std::domain_error("transition estimation failed: " + why);
    return *model;
}

} // namespace seqscale::estimate
