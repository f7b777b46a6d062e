#include "seqscale/stopping.hpp"

#include <cmath>
#include <stdexcept>

namespace seqscale::stopping {

namespace {

void validate_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument("tau must lie in (0, 1)");
    }
}

// Below this magnitude the transient is treated as numerically extinct: the
// chain sits at its fixed point for every remaining step while mathematically
// staying strictly on its approach side. (An exact-zero check is not enough:
// for |lambda| >= 0.5 the smallest denormal is sticky under multiplication.)
constexpr double kTransientFloor = 1e-300;

// The satisfaction primitive shared by the closed form and the scan oracle.
// Works in shifted form: p_i >= tau  <=>  lambda^i (p0 - L) >= tau - L.
// The transient is kept as a running product so it never gets absorbed into
// L the way a direct p_i evaluation would near the fixed point. Callers
// handle the exact cases (lambda == 0, p0 == L) first.
bool scan_satisfied(const markov::TransitionModel& model, double p0, double tau,
                    std::int64_t i) {
    const double limit = model.fixed_point();
    const double lambda = model.lambda();
    const double gap = tau - limit;
    double transient = p0 - limit;
    for (std::int64_t k = 1; k <= i; ++k) {
        transient *= lambda;
        if (std::abs(transient) <= kTransientFloor) return false;
    }
    return transient >= gap;
}

enum class SignFamily { Zero, Positive, Negative };

SignFamily family_of(double value) {
    if (std::abs(value) <= kSignDeadZone) return SignFamily::Zero;
    return value > 0.0 ? SignFamily::Positive : SignFamily::Negative;
}

// Case tag from the dead-zoned signs plus the resolved outcome. The outcome
// wins where the two disagree (reachable only through lambda < 0 oscillation
// or sub-dead-zone inputs), so a decision never contradicts its tag.
StoppingCase tag_for(SignFamily lhs, SignFamily rhs,
                     const std::optional<std::int64_t>& iterations) {
    if (iterations.has_value() && *iterations >= 2) return StoppingCase::Case3_2_Finite;
    const bool found = iterations.has_value();
    if (lhs == SignFamily::Zero) {
        return found ? StoppingCase::Case1_AnyI : StoppingCase::Case1_None;
    }
    if (rhs == SignFamily::Zero) {
        return found ? StoppingCase::Case2_AnyI : StoppingCase::Case2_None;
    }
    if (lhs == SignFamily::Positive && rhs == SignFamily::Positive) {
        return found ? StoppingCase::Case3_1_Immediate : StoppingCase::Case3_1_None;
    }
    if (lhs == SignFamily::Negative && rhs == SignFamily::Negative) {
        return found ? StoppingCase::Case3_2_Finite : StoppingCase::Case3_2_None;
    }
    if (lhs == SignFamily::Negative && rhs == SignFamily::Positive) {
        return found ? StoppingCase::Case4_2_Immediate : StoppingCase::Case4_1_None;
    }
    // lhs positive, rhs negative: satisfied by the first or second step.
    return StoppingCase::Case4_2_Immediate;
}

struct Resolution {
    std::optional<std::int64_t> iterations;
    bool unresolved = false;
};

// Past this point the ceiling expression is trusted without re-verification;
// a step-by-step confirmation would cost as much as the scan it replaces.
constexpr std::int64_t kFixupLimit = 1'000'000;

Resolution resolve(const markov::TransitionModel& model, double p0, double tau) {
    const double lambda = model.lambda();
    const double limit = model.fixed_point();
    const double gap = tau - limit;
    const double transient0 = p0 - limit;

    // Exact fixed point from the start: p_i = L for every i.
    if (transient0 == 0.0) {
        if (gap <= 0.0) return {1, false};
        return {std::nullopt, false};
    }
    // Exact one-step convergence: p_i = L for every i >= 1.
    if (lambda == 0.0) {
        if (gap <= 0.0) return {1, false};
        return {std::nullopt, false};
    }

    if (lambda < 0.0) {
        // Oscillatory approach; the logarithm is unusable. Scan instead.
        const ScanResult scanned =
            brute_force_optimal_iterations(model, p0, tau, kDefaultHorizon);
        return {scanned.iterations, scanned.outcome == ScanOutcome::Unresolved};
    }

    if (gap == 0.0) {
        // tau sits exactly on the asymptote; only approach from above reaches it.
        if (transient0 > 0.0) return {1, false};
        return {std::nullopt, false};
    }
    if (transient0 < 0.0 && gap > 0.0) return {std::nullopt, false};
    if (transient0 > 0.0 && gap < 0.0) return {1, false};
    if (transient0 > 0.0 && gap > 0.0) {
        // Decaying from above tau; the first step decides.
        if (scan_satisfied(model, p0, tau, 1)) return {1, false};
        return {std::nullopt, false};
    }

    // transient0 < 0, gap < 0: the approach from below crosses tau at the
    // ceiling of the log ratio.
    const double ratio = gap / transient0;
    if (ratio >= 1.0) {
        // tau <= p0 < L; the first step already clears it.
        if (scan_satisfied(model, p0, tau, 1)) return {1, false};
        return {std::nullopt, false};
    }
    double exponent = std::log(ratio) / std::log(lambda);
    exponent *= 1.0 - 1e-9; // keep an exact-integer ratio from rounding up
    std::int64_t candidate = static_cast<std::int64_t>(std::ceil(exponent));
    if (candidate < 1) candidate = 1;
    if (candidate > kFixupLimit) return {candidate, false};

    // The ceiling can be off by one either way under rounding; the scan
    // primitive, not the formula, is the contract.
    bool satisfied = false;
    for (int step = 0; step < 8; ++step) {
        if ((satisfied = scan_satisfied(model, p0, tau, candidate))) break;
        ++candidate;
    }
    if (!satisfied) {
        const ScanResult scanned =
            brute_force_optimal_iterations(model, p0, tau, kDefaultHorizon);
        return {scanned.iterations, scanned.outcome == ScanOutcome::Unresolved};
    }
    while (candidate > 1 && scan_satisfied(model, p0, tau, candidate - 1)) --candidate;
    return {candidate, false};
}

} // namespace

const char* to_string(StoppingCase c) {
    switch (c) {
        case StoppingCase::Case1_AnyI: return "case1_any_i";
        case StoppingCase::Case1_None: return "case1_none";
        case StoppingCase::Case2_AnyI: return "case2_any_i";
        case StoppingCase::Case2_None: return "case2_none";
        case StoppingCase::Case3_1_Immediate: return "case3_1_immediate";
        case StoppingCase::Case3_1_None: return "case3_1_none";
        case StoppingCase::Case3_2_Finite: return "case3_2_finite";
        case StoppingCase::Case3_2_None: return "case3_2_none";
        case StoppingCase::Case4_1_None: return "case4_1_none";
        case StoppingCase::Case4_2_Immediate: return "case4_2_immediate";
    }
    return "unknown";
}

StoppingDecision optimal_iterations(const markov::TransitionModel& model, double p0,
                                    double tau) {
    validate_tau(tau);
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw std::invalid_argument("p0 must lie in [0, 1]");
    }

    const double sum = model.a() + model.b();
    const double lhs = sum * p0 - model.b();
    const double rhs = sum * tau - model.b();

    const Resolution resolution = resolve(model, p0, tau);
    StoppingDecision decision;
    decision.case_tag = tag_for(family_of(lhs), family_of(rhs), resolution.iterations);
    decision.iterations = resolution.iterations;
    decision.unresolved = resolution.unresolved;
    return decision;
}

bool stopping_satisfied(const markov::TransitionModel& model, double p_estimate, double tau,
                        std::int64_t i) {
    if (i < 1) throw std::invalid_argument("stopping check index must be >= 1");
    const double sum = model.a() + model.b();
    double lhs0 = sum * p_estimate - model.b();
    double rhs = sum * tau - model.b();
    // Exact boundary hits land a rounding error away from zero; snap them.
    if (std::abs(lhs0) <= kSignDeadZone) lhs0 = 0.0;
    if (std::abs(rhs) <= kSignDeadZone) rhs = 0.0;
    return std::pow(model.lambda(), static_cast<double>(i)) * lhs0 >= rhs;
}

ScanResult brute_force_optimal_iterations(const markov::TransitionModel& model, double p0,
                                          double tau, std::int64_t horizon) {
    validate_tau(tau);
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

    const double limit = model.fixed_point();
    const double lambda = model.lambda();
    const double gap = tau - limit;
    double transient = p0 - limit;

    if (transient == 0.0 || lambda == 0.0) {
        // The chain sits exactly at L from step 1 (or step 0) onward.
        if (gap <= 0.0) return {ScanOutcome::Found, 1};
        return {ScanOutcome::None, std::nullopt};
    }

    for (std::int64_t i = 1; i <= horizon; ++i) {
        transient *= lambda;
        if (std::abs(transient) <= kTransientFloor) {
            // Numerically at the fixed point but mathematically still on the
            // approach side; no remaining step can satisfy.
            return {ScanOutcome::None, std::nullopt};
        }
        if (transient >= gap) return {ScanOutcome::Found, i};
    }
    if (gap <= 0.0) return {ScanOutcome::Unresolved, std::nullopt};
    return {ScanOutcome::None, std::nullopt};
}

} // namespace seqscale::stopping
