#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqscale/harness/trajectory_io.hpp"

// Aggregation of trajectory files into accuracy-vs-token CSV reports.
namespace seqscale::harness {

struct ReportRow {
    std::string variant;
    double tau = 0.0;
    double sigma = 0.0;
    std::size_t questions = 0;
    std::size_t labeled = 0;  // records whose final correctness is known
    std::size_t correct = 0;
    double mean_iterations = 0.0;
    std::int64_t total_token_proxy = 0;
    double mean_token_proxy = 0.0;
    std::size_t gated = 0;
    std::size_t stopped = 0;
    std::size_t budget = 0;
    std::size_t errors = 0;

    double accuracy() const {
        return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
    }
};

// One row per (variant, tau, sigma) group, sorted for stable output.
std::vector<ReportRow> aggregate_report(std::span<const TrajectoryRecord> records);

std::string report_csv(std::span<const ReportRow> rows);

} // namespace seqscale::harness
