#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqscale/harness/config.hpp"

// Hyperparameter grids over tau / gamma / sigma, one run per combination
// with a shared seed, emitted as CSV.
namespace seqscale::harness {

// "0.90:0.99:0.01" (inclusive range), "0.5,0.7,0.9", or a single number.
std::vector<double> parse_grid(const std::string& text);

struct SweepGrid {
    std::vector<double> taus;   // empty: keep the config value
    std::vector<double> gammas;
    std::vector<double> sigmas;
};

struct SweepRow {
    double tau = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    std::size_t questions = 0;
    std::size_t labeled = 0;
    std::size_t correct = 0;
    double mean_iterations = 0.0;
    std::int64_t total_token_proxy = 0;
    std::size_t gated = 0;
    std::size_t stopped = 0;
    std::size_t budget = 0;
    std::size_t errors = 0;

    double accuracy() const {
        return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
    }
};

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepGrid& grid);

std::string sweep_csv(std::span<const SweepRow> rows);

} // namespace seqscale::harness
