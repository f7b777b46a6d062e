#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Closed forms for the two-state correctness chain: state evolution,
// correctness probability, benefit function, regime classification and
// the neutral/upper/lower convergence bounds.
namespace seqscale::markov {

// Regime classification declares Neutral inside this band around L + sigma.
inline constexpr double kNeutralTolerance = 1e-9;

// Chain parameters: a = P(correct -> wrong), b = P(wrong -> correct).
// Requires a + b > 0 so the fixed point b/(a+b) exists.
class TransitionModel {
public:
    TransitionModel(double correct_to_wrong, double wrong_to_correct);

    double a() const { return a_; }
    double b() const { return b_; }

    // Spectral factor 1 - a - b, in [-1, 1).
    double lambda() const { return 1.0 - a_ - b_; }

    // Stationary correctness probability b/(a+b).
    double fixed_point() const { return b_ / (a_ + b_); }

    bool operator==(const TransitionModel&) const = default;

private:
    double a_;
    double b_;
};

struct StateDistribution {
    double p_correct;
    double p_wrong;

    StateDistribution(double correct, double wrong);
};

enum class ScalingRegime { Beneficial, Detrimental, Neutral };

const char* to_string(ScalingRegime regime);

using Matrix2 = std::array<std::array<double, 2>, 2>;

// P^i via the diagonalized closed form; i = 0 yields the identity.
Matrix2 transition_matrix_power(const TransitionModel& model, std::int64_t i);

// p_i = L + lambda^i (p0 - L).
double correct_probability_at(const TransitionModel& model, double p0, std::int64_t i);

// pi_0 P^i, exposed for oracle-style checks.
StateDistribution evolve(const TransitionModel& model, const StateDistribution& initial,
                         std::int64_t i);

// g_i = (L - p0)(1 - lambda^i) + sigma, identically p_i + sigma - p0.
double benefit_at(const TransitionModel& model, double p0, double sigma, std::int64_t i);

// lim g_i = L - p0 + sigma. Requires |lambda| < 1.
double asymptotic_benefit(const TransitionModel& model, double p0, double sigma);

// Sign of the asymptotic benefit; Neutral within kNeutralTolerance of equality.
ScalingRegime classify_regime(const TransitionModel& model, double p0, double sigma);

// L = b/(a+b); |p_i - L| <= |lambda|^i for any p0.
double convergence_limit(const TransitionModel& model);

// Pooled estimate for one regime group. `model` is absent when the group is
// empty or its counts cannot produce an estimate.
struct GroupEstimate {
    std::size_t trajectories = 0;
    std::size_t transitions = 0;
    std::optional<TransitionModel> model;
};

struct BoundEntry {
    std::optional<double> value;
    std::size_t trajectories = 0;
    std::size_t transitions = 0;

    bool present() const { return value.has_value(); }
};

struct BoundsReport {
    BoundEntry neutral; // from all trajectories
    BoundEntry upper;   // from the beneficial-regime group
    BoundEntry lower;   // from the detrimental-regime group
    std::size_t beneficial_trajectories = 0;
    std::size_t detrimental_trajectories = 0;
    std::size_t neutral_trajectories = 0;
    std::vector<std::string> warnings; // groups with trajectories but no estimate
};

BoundsReport bounds_from_classified(const GroupEstimate& all, const GroupEstimate& beneficial,
                                    const GroupEstimate& detrimental);

} // namespace seqscale::markov
