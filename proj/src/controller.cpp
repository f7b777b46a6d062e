#include "seqscale/controller.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <thread>

#include "seqscale/stopping.hpp"

namespace seqscale::control {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

estimate::AnswerState state_of(const ControllerConfig& config, const Completion& completion,
                               double score) {
    if (config.state_source == StateSource::TruthLabels && completion.truth.has_value()) {
        return *completion.truth ? estimate::AnswerState::Correct : estimate::AnswerState::Wrong;
    }
    return score >= kScoreStateThreshold ? estimate::AnswerState::Correct
                                         : estimate::AnswerState::Wrong;
}

// Serves pre-generated completions before handing over to the live backend.
// The training-free bootstrap pass uses this so its rounds are not generated
// (or billed) twice.
class ReplayGenerator final : public Generator {
public:
    ReplayGenerator(const std::vector<Completion>& recorded, Generator& live)
        : recorded_(recorded), live_(live) {}

    Completion generate(const Question& question, const Completion* previous) override {
        if (served_ < recorded_.size()) {
            const Completion& completion = recorded_[served_++];
            replayed_tokens_ += completion.tokens;
            return completion;
        }
        return live_.generate(question, previous);
    }

    std::int64_t replayed_tokens() const { return replayed_tokens_; }

private:
    const std::vector<Completion>& recorded_;
    Generator& live_;
    std::size_t served_ = 0;
    std::int64_t replayed_tokens_ = 0;
};

class FixedPriorProvider final : public PriorProvider {
public:
    FixedPriorProvider(double p0, markov::TransitionModel model) : priors_{p0, model} {}

    Priors prior(const Question&) override { return priors_; }

private:
    Priors priors_;
};

void run_indexed(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const int pool_size = std::clamp(workers, 1, 64);
    if (pool_size == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int w = 0; w < pool_size; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct BootstrapRecord {
    std::vector<Completion> completions;
    std::vector<double> scores;
    std::int64_t tokens = 0;
};

} // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Gate: return "gate";
        case Variant::Map: return "map";
        case Variant::TrainingFree: return "training_free";
    }
    return "unknown";
}

std::optional<Variant> variant_from_string(const std::string& name) {
    if (name == "gate") return Variant::Gate;
    if (name == "map") return Variant::Map;
    if (name == "training_free") return Variant::TrainingFree;
    return std::nullopt;
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Gated: return "gated";
        case StopReason::StoppingRuleMet: return "stopping_rule_met";
        case StopReason::BudgetExhausted: return "budget_exhausted";
    }
    return "unknown";
}

void ControllerConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma is required and must be >= 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (bootstrap_rounds < 1) throw std::invalid_argument("bootstrap_rounds must be >= 1");
    if (!(default_prior >= 0.0 && default_prior <= 1.0)) {
        throw std::invalid_argument("default_prior must lie in [0, 1]");
    }
}

bool gate(double p_hat_0, const markov::TransitionModel& model, double sigma) {
    return p_hat_0 >= model.fixed_point() + sigma;
}

Trajectory run_question(const Question& question, const ControllerConfig& config,
                        Generator& generator, Verifier& verifier, PriorProvider& priors) {
    config.validate();
    const auto start = Clock::now();

    Trajectory trajectory;
    trajectory.question_id = question.id;

    Priors resolved;
    try {
        resolved = priors.prior(question);
    } catch (const std::exception&) {
        resolved = {};
    }
    trajectory.prior_p0 = resolved.p0.value_or(config.default_prior);
    if (!resolved.model.has_value()) {
        trajectory.wall_ms = elapsed_ms(start);
        throw RunQuestionError("prior provider supplied no transition model for question '" +
                                   question.id + "'",
                               trajectory);
    }
    const markov::TransitionModel model = *resolved.model;
    trajectory.transition_model_used = model;
    trajectory.regime = markov::classify_regime(model, trajectory.prior_p0, config.sigma);

    auto call_generator = [&](const Completion* previous) {
        try {
            Completion completion = generator.generate(question, previous);
            trajectory.token_proxy += completion.tokens;
            return completion;
        } catch (const std::exception& e) {
            trajectory.wall_ms = elapsed_ms(start);
            throw RunQuestionError(std::string("generator failed: ") + e.what(), trajectory);
        }
    };
    auto call_verifier = [&](const Completion& completion) {
        try {
            return verifier.score(question, completion);
        } catch (const std::exception& e) {
            trajectory.wall_ms = elapsed_ms(start);
            throw RunQuestionError(std::string("verifier failed: ") + e.what(), trajectory);
        }
    };

    if (config.gate_enabled && gate(trajectory.prior_p0, model, config.sigma)) {
        // Zero-shot return path: one generation, no refinement loop.
        trajectory.final_output = call_generator(nullptr);
        trajectory.stop_reason = StopReason::Gated;
        trajectory.wall_ms = elapsed_ms(start);
        return trajectory;
    }

    estimate::BetaPosterior posterior = estimate::init_prior(trajectory.prior_p0, config.gamma);
    Completion previous;
    bool has_previous = false;
    trajectory.stop_reason = StopReason::BudgetExhausted;

    for (std::int64_t i = 1; i <= config.max_iterations; ++i) {
        Completion completion = call_generator(has_previous ? &previous : nullptr);
        const double score = call_verifier(completion);
        try {
            posterior = estimate::update_posterior(posterior, score);
        } catch (const std::exception& e) {
            trajectory.wall_ms = elapsed_ms(start);
            throw RunQuestionError(std::string("verifier score rejected: ") + e.what(),
                                   trajectory);
        }
        const double estimate_now = estimate::map_estimate(posterior);
        const bool stop = config.variant != Variant::Gate &&
                          stopping::stopping_satisfied(model, estimate_now, config.tau, i);
        trajectory.iterations.push_back({i, score, estimate_now, stop, completion.truth});
        previous = std::move(completion);
        has_previous = true;
        if (stop) {
            trajectory.stop_reason = StopReason::StoppingRuleMet;
            break;
        }
    }
    if (has_previous) trajectory.final_output = previous;
    trajectory.wall_ms = elapsed_ms(start);
    return trajectory;
}

namespace {

estimate::AnswerState iteration_state(const ControllerConfig& config,
                                      const IterationRecord& record) {
    if (config.state_source == StateSource::TruthLabels && record.truth.has_value()) {
        return *record.truth ? estimate::AnswerState::Correct : estimate::AnswerState::Wrong;
    }
    return record.verifier_score >= kScoreStateThreshold ? estimate::AnswerState::Correct
                                                         : estimate::AnswerState::Wrong;
}

markov::BoundsReport bounds_over(const ControllerConfig& config,
                                 const std::vector<std::optional<Trajectory>>& trajectories) {
    markov::GroupEstimate all, beneficial, detrimental;
    estimate::TransitionCounts all_counts, beneficial_counts, detrimental_counts;

    for (const auto& entry : trajectories) {
        if (!entry.has_value()) continue;
        const Trajectory& trajectory = *entry;

        std::vector<estimate::AnswerState> states;
        states.reserve(trajectory.iterations.size());
        for (const IterationRecord& record : trajectory.iterations) {
            states.push_back(iteration_state(config, record));
        }
        const estimate::TransitionCounts counts = estimate::count_transitions(states);

        ++all.trajectories;
        all.transitions += counts.total_transitions();
        all_counts += counts;
        if (trajectory.regime == markov::ScalingRegime::Beneficial) {
            ++beneficial.trajectories;
            beneficial.transitions += counts.total_transitions();
            beneficial_counts += counts;
        } else if (trajectory.regime == markov::ScalingRegime::Detrimental) {
            ++detrimental.trajectories;
            detrimental.transitions += counts.total_transitions();
            detrimental_counts += counts;
        }
    }

    all.model = estimate::try_estimate_transition_model(all_counts);
    beneficial.model = estimate::try_estimate_transition_model(beneficial_counts);
    detrimental.model = estimate::try_estimate_transition_model(detrimental_counts);
    return markov::bounds_from_classified(all, beneficial, detrimental);
}

} // namespace

DatasetResult run_dataset(std::span<const Question> questions, const ControllerConfig& config,
                          Generator& generator, Verifier& verifier, PriorProvider& priors,
                          int workers) {
    config.validate();
    if (questions.empty()) throw std::invalid_argument("empty dataset");

    const std::size_t count = questions.size();
    DatasetResult result;
    result.trajectories.resize(count);
    std::mutex failure_mutex;

    // Training-free variant: a bootstrap pass over the whole dataset estimates
    // one pooled transition model before any stopping decision is made.
    std::vector<BootstrapRecord> bootstrap(count);
    std::vector<char> runnable(count, 1);
    std::optional<markov::TransitionModel> pooled_model;
    if (config.variant == Variant::TrainingFree) {
        estimate::TransitionCounts pooled;
        std::vector<estimate::TransitionCounts> per_question(count);
        std::vector<std::optional<std::string>> bootstrap_errors(count);
        run_indexed(count, workers, [&](std::size_t idx) {
            const Question& question = questions[idx];
            BootstrapRecord& record = bootstrap[idx];
            std::vector<estimate::AnswerState> states;
            try {
                const Completion* previous = nullptr;
                for (std::int64_t r = 0; r < config.bootstrap_rounds; ++r) {
                    Completion completion = generator.generate(question, previous);
                    const double score = verifier.score(question, completion);
                    record.tokens += completion.tokens;
                    states.push_back(state_of(config, completion, score));
                    record.completions.push_back(std::move(completion));
                    record.scores.push_back(score);
                    previous = &record.completions.back();
                }
                per_question[idx] = estimate::count_transitions(states);
            } catch (const std::exception& e) {
                bootstrap_errors[idx] = e.what();
            }
        });
        for (std::size_t idx = 0; idx < count; ++idx) {
            if (bootstrap_errors[idx].has_value()) {
                runnable[idx] = 0;
                result.failures.push_back(
                    {idx, "bootstrap failed: " + *bootstrap_errors[idx], Trajectory{}});
                continue;
            }
            pooled += per_question[idx];
        }
        std::string why;
        auto estimated = estimate::try_estimate_transition_model(pooled, &why);
        if (!estimated.has_value()) {
            throw std::runtime_error(
                "training-free bootstrap could not estimate transition probabilities: " + why);
        }
        pooled_model = *estimated;
    }

    run_indexed(count, workers, [&](std::size_t idx) {
        const Question& question = questions[idx];
        if (!runnable[idx]) return;
        try {
            if (config.variant == Variant::TrainingFree) {
                ReplayGenerator replay(bootstrap[idx].completions, generator);
                FixedPriorProvider fixed(config.default_prior, *pooled_model);
                Trajectory trajectory = run_question(question, config, replay, verifier, fixed);
                // Bootstrap rounds were paid for whether or not the loop
                // consumed them all.
                trajectory.token_proxy += bootstrap[idx].tokens - replay.replayed_tokens();
                result.trajectories[idx] = std::move(trajectory);
            } else {
                result.trajectories[idx] =
                    run_question(question, config, generator, verifier, priors);
            }
        } catch (RunQuestionError& e) {
            std::lock_guard lock(failure_mutex);
            result.failures.push_back({idx, e.what(), std::move(e.partial_trajectory)});
        } catch (const std::exception& e) {
            std::lock_guard lock(failure_mutex);
            result.failures.push_back({idx, e.what(), Trajectory{}});
        }
    });

    std::sort(result.failures.begin(), result.failures.end(),
              [](const QuestionFailure& a, const QuestionFailure& b) { return a.index < b.index; });

    result.bounds = bounds_over(config, result.trajectories);
    return result;
}

} // namespace seqscale::control
