#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqscale/estimator.hpp"
#include "seqscale/markov.hpp"

// The gated MAP control loop: offline priors, the beneficial-scaling gate,
// and the per-round posterior update with the optimal stopping check, over
// pluggable generator / verifier / prior-provider backends.
namespace seqscale::control {

struct Question {
    std::string id;
    std::string text;
    std::optional<std::string> label; // reference answer, when known
};

struct Completion {
    std::string text;
    std::int64_t tokens = 0;
    // Hidden chain state, set by the synthetic backend only.
    std::optional<bool> truth;
    std::int64_t step = -1;
};

class Generator {
public:
    virtual ~Generator() = default;
    // previous == nullptr requests a fresh (zero-shot) completion.
    virtual Completion generate(const Question& question, const Completion* previous) = 0;
};

class Verifier {
public:
    virtual ~Verifier() = default;
    virtual double score(const Question& question, const Completion& completion) = 0;
};

struct Priors {
    std::optional<double> p0;
    std::optional<markov::TransitionModel> model;
};

class PriorProvider {
public:
    virtual ~PriorProvider() = default;
    virtual Priors prior(const Question& question) = 0;
};

enum class Variant { Gate, Map, TrainingFree };

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(const std::string& name);

// Which observations define C/W states when counting transitions.
enum class StateSource { TruthLabels, ScoreThreshold };

inline constexpr double kScoreStateThreshold = 0.5;

struct ControllerConfig {
    double tau = 0.0;
    double sigma = -1.0; // required; no default
    double gamma = 0.0;
    std::int64_t max_iterations = 0;
    Variant variant = Variant::Map;
    std::int64_t bootstrap_rounds = 2;     // TrainingFree only
    double default_prior = 0.5;            // TrainingFree / prior fallback
    bool gate_enabled = true;              // false gives the naive-scaling arm
    StateSource state_source = StateSource::ScoreThreshold;

    void validate() const;
};

enum class StopReason { Gated, StoppingRuleMet, BudgetExhausted };

const char* to_string(StopReason reason);

struct IterationRecord {
    std::int64_t index = 0;
    double verifier_score = 0.0;
    double map_estimate = 0.0;
    bool stopped = false;
    // Hidden chain state of this round's completion, when the backend knows it.
    std::optional<bool> truth;
};

struct Trajectory {
    std::string question_id;
    double prior_p0 = 0.0;
    std::optional<markov::TransitionModel> transition_model_used;
    std::optional<markov::ScalingRegime> regime;
    std::vector<IterationRecord> iterations;
    StopReason stop_reason = StopReason::BudgetExhausted;
    std::optional<Completion> final_output;
    std::int64_t token_proxy = 0;
    double wall_ms = 0.0;
};

// Carries whatever was recorded before the backend failed.
class RunQuestionError : public std::runtime_error {
public:
    RunQuestionError(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_trajectory(std::move(partial)) {}

    Trajectory partial_trajectory;
};

// True = skip scaling: p_hat_0 >= L + sigma (the boundary gates).
bool gate(double p_hat_0, const markov::TransitionModel& model, double sigma);

Trajectory run_question(const Question& question, const ControllerConfig& config,
                        Generator& generator, Verifier& verifier, PriorProvider& priors);

struct QuestionFailure {
    std::size_t index = 0;
    std::string message;
    Trajectory partial;
};

struct DatasetResult {
    std::vector<std::optional<Trajectory>> trajectories; // index-aligned with questions
    std::vector<QuestionFailure> failures;
    markov::BoundsReport bounds;
};

DatasetResult run_dataset(std::span<const Question> questions, const ControllerConfig& config,
                          Generator& generator, Verifier& verifier, PriorProvider& priors,
                          int workers = 1);

} // namespace seqscale::control
