#include "seqscale/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqscale/rng.hpp"

namespace seqscale::sim {

namespace {

using estimate::AnswerState;

// Sub-stream salts under one question key.
constexpr std::uint64_t kChainSalt = 0x11;
constexpr std::uint64_t kNoiseSalt = 0x22;

rng::Stream question_stream(std::uint64_t seed, const std::string& question_id) {
    return rng::Stream(rng::derive(seed, rng::hash_string(question_id)));
}

bool chain_start(const SyntheticQuestionSpec& spec, const rng::Stream& chain) {
    return chain.uniform(0) < spec.true_p0;
}

bool chain_step(const SyntheticQuestionSpec& spec, const rng::Stream& chain, bool current,
                std::int64_t step) {
    const double u = chain.uniform(static_cast<std::uint64_t>(step));
    return current ? !(u < spec.a) : (u < spec.b);
}

} // namespace

const char* to_string(VerifierMode mode) {
    switch (mode) {
        case VerifierMode::BinaryTruth: return "binary_truth";
        case VerifierMode::NoisyContinuous: return "noisy_continuous";
    }
    return "unknown";
}

std::optional<VerifierMode> verifier_mode_from_string(const std::string& name) {
    if (name == "binary_truth") return VerifierMode::BinaryTruth;
    if (name == "noisy_continuous") return VerifierMode::NoisyContinuous;
    return std::nullopt;
}

void SyntheticQuestionSpec::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (question_id.empty()) throw std::invalid_argument("synthetic question needs an id");
    if (!in_unit(true_p0)) throw std::invalid_argument("true_p0 must lie in [0, 1]");
    if (!in_unit(a) || !in_unit(b)) {
        throw std::invalid_argument("transition probabilities must lie in [0, 1]");
    }
    if (!(verifier_noise >= 0.0)) throw std::invalid_argument("verifier_noise must be >= 0");
    for (const auto& v : {prior_p0, prior_a, prior_b}) {
        if (v.has_value() && !in_unit(*v)) {
            throw std::invalid_argument("prior overrides must lie in [0, 1]");
        }
    }
}

std::vector<AnswerState> simulate_chain(const SyntheticQuestionSpec& spec, std::int64_t steps,
                                        std::uint64_t seed) {
    spec.validate();
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    const rng::Stream chain = question_stream(seed, spec.question_id).child(kChainSalt);
    std::vector<AnswerState> states;
    states.reserve(static_cast<std::size_t>(steps));
    bool correct = chain_start(spec, chain);
    states.push_back(correct ? AnswerState::Correct : AnswerState::Wrong);
    for (std::int64_t step = 1; step < steps; ++step) {
        correct = chain_step(spec, chain, correct, step);
        states.push_back(correct ? AnswerState::Correct : AnswerState::Wrong);
    }
    return states;
}

MonteCarloEstimate monte_carlo_correct_probability(const SyntheticQuestionSpec& spec,
                                                   std::int64_t i, std::int64_t trials,
                                                   std::uint64_t seed) {
    spec.validate();
    if (i < 0) throw std::invalid_argument("step index must be >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    const rng::Stream base = question_stream(seed, spec.question_id);
    std::int64_t hits = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const rng::Stream chain = base.child(static_cast<std::uint64_t>(trial));
        bool correct = chain_start(spec, chain);
        for (std::int64_t step = 1; step <= i; ++step) {
            correct = chain_step(spec, chain, correct, step);
        }
        if (correct) ++hits;
    }
    const double estimate = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
    return {estimate, se, trials};
}

SyntheticBackend::SyntheticBackend(std::vector<SyntheticQuestionSpec> specs,
                                   std::uint64_t run_seed)
    : specs_(std::move(specs)), run_seed_(run_seed) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        specs_[i].validate();
        if (!index_.emplace(specs_[i].question_id, i).second) {
            throw std::invalid_argument("duplicate synthetic question id '" +
                                        specs_[i].question_id + "'");
        }
    }
}

const SyntheticQuestionSpec& SyntheticBackend::spec_for(const std::string& question_id) const {
    const auto it = index_.find(question_id);
    if (it == index_.end()) {
        throw std::out_of_range("unknown synthetic question id '" + question_id + "'");
    }
    return specs_[it->second];
}

std::vector<control::Question> SyntheticBackend::questions() const {
    std::vector<control::Question> out;
    out.reserve(specs_.size());
    for (const auto& spec : specs_) out.push_back({spec.question_id, spec.question_id, {}});
    return out;
}

control::Completion SyntheticBackend::generate(const control::Question& question,
                                               const control::Completion* previous) {
    const SyntheticQuestionSpec& spec = spec_for(question.id);
    const rng::Stream chain = question_stream(run_seed_, question.id).child(kChainSalt);

    std::int64_t step = 0;
    bool correct = false;
    if (previous == nullptr) {
        correct = chain_start(spec, chain);
    } else {
        if (!previous->truth.has_value() || previous->step < 0) {
            throw std::invalid_argument("previous completion did not come from this backend");
        }
        step = previous->step + 1;
        correct = chain_step(spec, chain, *previous->truth, step);
    }

    control::Completion completion;
    completion.text = question.id + "#" + std::to_string(step) + (correct ? ":C" : ":W");
    completion.tokens = 1; // iteration-count proxy
    completion.truth = correct;
    completion.step = step;
    return completion;
}

double SyntheticBackend::score(const control::Question& question,
                               const control::Completion& completion) {
    const SyntheticQuestionSpec& spec = spec_for(question.id);
    if (!completion.truth.has_value() || completion.step < 0) {
        throw std::invalid_argument("completion did not come from this backend");
    }
    const double truth_score = *completion.truth ? 1.0 : 0.0;
    if (spec.verifier_mode == VerifierMode::BinaryTruth || spec.verifier_noise == 0.0) {
        return truth_score;
    }
    const rng::Stream noise = question_stream(run_seed_, question.id).child(kNoiseSalt);
    const double sample =
        truth_score + spec.verifier_noise * noise.gaussian(static_cast<std::uint64_t>(completion.step));
    return std::clamp(sample, 0.0, 1.0);
}

control::Priors SyntheticBackend::prior(const control::Question& question) {
    const SyntheticQuestionSpec& spec = spec_for(question.id);
    control::Priors priors;
    priors.p0 = spec.prior_p0.value_or(spec.true_p0);
    const double a = spec.prior_a.value_or(spec.a);
    const double b = spec.prior_b.value_or(spec.b);
    if (a + b > 0.0) {
        priors.model = markov::TransitionModel(a, b);
    }
    return priors;
}

std::optional<bool> SyntheticBackend::truth_of(const control::Completion& completion) {
    return completion.truth;
}

} // namespace seqscale::sim
