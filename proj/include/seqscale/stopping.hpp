#pragma once

#include <cstdint>
#include <optional>

#include "seqscale/markov.hpp"

// Resolution of the minimal iteration count whose predicted correctness
// probability reaches a confidence level tau, covering the complete
// sign-case analysis of the threshold inequality
//   lambda^i ((a+b) p0 - b) >= (a+b) tau - b,
// plus a direct-scan oracle for equivalence testing.
namespace seqscale::stopping {

// Sign tests on (a+b)p0 - b and (a+b)tau - b map to the zero cases inside
// this dead zone, keeping the case dispatch deterministic under rounding.
inline constexpr double kSignDeadZone = 1e-12;

inline constexpr std::int64_t kDefaultHorizon = 10'000;

enum class StoppingCase {
    Case1_AnyI,          // p0 = L, L >= tau: every iteration satisfies
    Case1_None,          // p0 = L, L < tau: none can
    Case2_AnyI,          // tau = L, p0 > L
    Case2_None,          // tau = L, p0 < L
    Case3_1_Immediate,   // p0 > tau > L and the first iteration still clears tau
    Case3_1_None,        // above L but tau out of reach
    Case3_2_Finite,      // p0 < tau < L: finite minimal solution
    Case3_2_None,        // tau < p0 < L
    Case4_1_None,        // p0 < L < tau: asymptote below tau
    Case4_2_Immediate,   // tau < L < p0: satisfied from the start
};

const char* to_string(StoppingCase c);

struct StoppingDecision {
    StoppingCase case_tag;
    // Present iff the confidence level is reachable; the minimal iteration.
    std::optional<std::int64_t> iterations;
    // Set when a scan fallback exhausted its horizon without deciding
    // (slow-mixing chains only; never on |lambda| <= 0.9).
    bool unresolved = false;

    bool reachable() const { return iterations.has_value(); }
};

// Closed-form resolution with scan fallback for lambda <= 0.
StoppingDecision optimal_iterations(const markov::TransitionModel& model, double p0, double tau);

// The literal check the control loop evaluates each round with the current
// MAP estimate substituted for p0. No tolerance is applied.
bool stopping_satisfied(const markov::TransitionModel& model, double p_estimate, double tau,
                        std::int64_t i);

enum class ScanOutcome {
    Found,      // first satisfying iteration within the horizon
    None,       // provably (or numerically) never satisfied
    Unresolved, // horizon exhausted although the asymptote satisfies tau
};

struct ScanResult {
    ScanOutcome outcome;
    std::optional<std::int64_t> iterations;
};

// Direct scan of the threshold inequality, step by step. Independent of the
// case analysis above; used as its oracle.
ScanResult brute_force_optimal_iterations(const markov::TransitionModel& model, double p0,
                                          double tau, std::int64_t horizon);

} // namespace seqscale::stopping
