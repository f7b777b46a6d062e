#include "seqscale/harness/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "seqscale/markov.hpp"
#include "seqscale/simulation.hpp"

namespace seqscale::harness {

ValidationSummary run_validation_suite(std::int64_t trials, std::uint64_t seed,
                                       std::ostream& out) {
    const double grid[] = {0.1, 0.25, 0.5, 0.75, 0.9};
    const double p0s[] = {0.2, 0.5, 0.9};
    const std::int64_t steps[] = {1, 2, 5, 20};

    ValidationSummary summary;
    for (const double a : grid) {
        for (const double b : grid) {
            const markov::TransitionModel model(a, b);
            for (const double p0 : p0s) {
                sim::SyntheticQuestionSpec spec;
                spec.question_id = "mc";
                spec.true_p0 = p0;
                spec.a = a;
                spec.b = b;
                for (const std::int64_t i : steps) {
                    const auto mc = sim::monte_carlo_correct_probability(
                        spec, i, trials, seed + static_cast<std::uint64_t>(summary.cells));
                    const double expected = markov::correct_probability_at(model, p0, i);
                    const double se = std::max(mc.standard_error, 1e-12);
                    const double z = std::abs(mc.estimate - expected) / se;
                    summary.worst_z = std::max(summary.worst_z, z);
                    ++summary.cells;
                    if (z > 4.0) {
                        ++summary.failures;
                        out << "FAIL cell a=" << a << " b=" << b << " p0=" << p0 << " i=" << i
                            << " |z|=" << z << '\n';
                    }
                }
            }
        }
    }
    out << "closed-form agreement: " << (summary.cells - summary.failures) << '/'
        << summary.cells << " cells within 4 SE (worst |z|=" << summary.worst_z << ")\n";

    // Long-run state frequency vs the convergence limit.
    sim::SyntheticQuestionSpec ergodic;
    ergodic.question_id = "ergodic";
    ergodic.true_p0 = 0.5;
    ergodic.a = 0.2;
    ergodic.b = 0.6;
    const std::int64_t total_steps = 100'000;
    const auto states = sim::simulate_chain(ergodic, total_steps, seed);
    std::int64_t correct = 0;
    const std::int64_t burn_in = total_steps / 10;
    for (std::int64_t i = burn_in; i < total_steps; ++i) {
        if (states[static_cast<std::size_t>(i)] == estimate::AnswerState::Correct) ++correct;
    }
    const double frequency =
        static_cast<double>(correct) / static_cast<double>(total_steps - burn_in);
    const double limit = markov::TransitionModel(ergodic.a, ergodic.b).fixed_point();
    summary.ergodic_ok = std::abs(frequency - limit) <= 0.005;
    out << "ergodic frequency: " << frequency << " vs limit " << limit
        << (summary.ergodic_ok ? " (ok)" : " (FAIL)") << '\n';
    return summary;
}

} // namespace seqscale::harness
