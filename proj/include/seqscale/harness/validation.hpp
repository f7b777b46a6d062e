#pragma once

#include <cstdint>
#include <iosfwd>

// Monte Carlo validation of the closed forms, runnable from the CLI.
namespace seqscale::harness {

struct ValidationSummary {
    std::int64_t cells = 0;
    std::int64_t failures = 0;  // cells outside 4 binomial standard errors
    double worst_z = 0.0;
    bool ergodic_ok = false;

    bool passed() const { return failures == 0 && ergodic_ok; }
};

// Grid of (a, b, p0) x steps chain cells compared against the closed-form
// correctness probability, plus a long-run frequency check against the
// convergence limit. Prints one line per section to `out`.
ValidationSummary run_validation_suite(std::int64_t trials, std::uint64_t seed,
                                       std::ostream& out);

} // namespace seqscale::harness
