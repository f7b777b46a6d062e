#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqscale/markov.hpp"

// Online Beta-MAP estimation of the correctness probability and empirical
// estimation of transition probabilities from observed state sequences.
namespace seqscale::estimate {

struct BetaPosterior {
    double alpha = 0.0;
    double beta = 0.0;

    bool operator==(const BetaPosterior&) const = default;
};

// alpha0 = p_hat_0 * gamma, beta0 = (1 - p_hat_0) * gamma. gamma > 0 is the
// total pseudo-count mass granted to the offline prior.
BetaPosterior init_prior(double p_hat_0, double gamma);

// Adds a verifier score in [0, 1] as fractional pseudo-counts; total mass
// grows by exactly 1 per update.
BetaPosterior update_posterior(const BetaPosterior& posterior, double score);

// Mode of the Beta posterior when it exists, mean otherwise:
// alpha/(alpha+beta) if alpha <= 1 or beta <= 1, else (alpha-1)/(alpha+beta-2).
double map_estimate(const BetaPosterior& posterior);

enum class AnswerState : unsigned char { Wrong = 0, Correct = 1 };

struct TransitionCounts {
    std::uint64_t from_correct = 0;
    std::uint64_t correct_to_wrong = 0;
    std::uint64_t from_wrong = 0;
    std::uint64_t wrong_to_correct = 0;

    TransitionCounts& operator+=(const TransitionCounts& other);
    std::uint64_t total_transitions() const { return from_correct + from_wrong; }
    bool operator==(const TransitionCounts&) const = default;
};

// Tallies adjacent pairs; sequences shorter than 2 yield all zeros.
TransitionCounts count_transitions(std::span<const AnswerState> states);

// a = c2w/from_correct, b = w2c/from_wrong over the pooled counts. Returns
// nothing when a denominator is zero or the estimate has a + b = 0, with the
// reason written to *why when provided.
std::optional<markov::TransitionModel> try_estimate_transition_model(
    const TransitionCounts& counts, std::string* why = nullptr);

// Throwing variant; the message names the zero denominator.
markov::TransitionModel estimate_transition_model(const TransitionCounts& counts);

} // namespace seqscale::estimate
