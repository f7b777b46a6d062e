#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqscale/controller.hpp"
#include "seqscale/estimator.hpp"

// Synthetic ground truth: samples the two-state chain exactly as defined,
// realizes the generator/verifier/prior contracts with controllable noise,
// and provides the Monte Carlo machinery that validates the closed forms.
namespace seqscale::sim {

enum class VerifierMode { BinaryTruth, NoisyContinuous };

const char* to_string(VerifierMode mode);
std::optional<VerifierMode> verifier_mode_from_string(const std::string& name);

// Unlike the analytic TransitionModel, a + b = 0 and a + b = 2 are legal
// here; the chain itself is well-defined without a usable fixed point.
struct SyntheticQuestionSpec {
    std::string question_id;
    double true_p0 = 0.5;
    double a = 0.0;
    double b = 0.0;
    double verifier_noise = 0.0; // stddev of additive score noise, clamped to [0,1]
    VerifierMode verifier_mode = VerifierMode::BinaryTruth;
    // Values served through the prior contract; defaults are the true values.
    std::optional<double> prior_p0;
    std::optional<double> prior_a;
    std::optional<double> prior_b;

    void validate() const;
};

// X_0 ~ Bernoulli(true_p0), then `steps - 1` transitions. Identical
// (spec, seed) pairs give identical sequences.
std::vector<estimate::AnswerState> simulate_chain(const SyntheticQuestionSpec& spec,
                                                  std::int64_t steps, std::uint64_t seed);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::int64_t trials = 0;
};

// Fraction of `trials` independent chains in the correct state after i
// transitions, with the binomial standard error.
MonteCarloEstimate monte_carlo_correct_probability(const SyntheticQuestionSpec& spec,
                                                   std::int64_t i, std::int64_t trials,
                                                   std::uint64_t seed);

// In-process realization of the controller contracts. Generation advances a
// hidden chain one step per call; draws are keyed by (run_seed, question_id,
// step), so concurrent sessions never perturb each other.
class SyntheticBackend final : public control::Generator,
                               public control::Verifier,
                               public control::PriorProvider {
public:
    SyntheticBackend(std::vector<SyntheticQuestionSpec> specs, std::uint64_t run_seed);

    control::Completion generate(const control::Question& question,
                                 const control::Completion* previous) override;
    double score(const control::Question& question,
                 const control::Completion& completion) override;
    control::Priors prior(const control::Question& question) override;

    std::vector<control::Question> questions() const;
    const SyntheticQuestionSpec& spec_for(const std::string& question_id) const;
    std::uint64_t run_seed() const { return run_seed_; }

    // Truth oracle, for assertions only.
    static std::optional<bool> truth_of(const control::Completion& completion);

private:
    std::vector<SyntheticQuestionSpec> specs_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint64_t run_seed_;
};

} // namespace seqscale::sim
