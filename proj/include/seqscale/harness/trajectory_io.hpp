#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "seqscale/controller.hpp"

// Line-delimited JSON persistence for trajectories. Records round-trip
// losslessly and serialize deterministically (sorted keys, shortest
// round-trip doubles), so equal runs produce byte-identical files apart
// from the wall-clock field.
namespace seqscale::harness {

struct IterationEntry {
    std::int64_t i = 0;
    double score = 0.0;
    double map_estimate = 0.0;
    bool stopped = false;
    std::optional<bool> truth;

    bool operator==(const IterationEntry&) const = default;
};

struct TrajectoryRecord {
    std::string question_id;
    std::string variant;
    double prior_p0 = 0.0;
    std::optional<double> a;
    std::optional<double> b;
    double sigma = 0.0;
    double tau = 0.0;
    std::string regime; // empty when the run failed before classification
    std::vector<IterationEntry> iterations;
    std::string stop_reason; // gated | stopping_rule_met | budget_exhausted | error
    double wall_ms = 0.0;
    std::int64_t token_proxy = 0;
    std::int64_t verifier_tokens = 0;
    std::optional<bool> final_correct;
    std::optional<std::string> error;

    bool operator==(const TrajectoryRecord&) const = default;
};

// One JSON object, no trailing newline.
std::string serialize_record(const TrajectoryRecord& record);
TrajectoryRecord parse_record(const std::string& line);

class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::filesystem::path& path);

    void append(const TrajectoryRecord& record);

private:
    std::ofstream out_;
};

std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path);

// Builds a record from a finished (or partial) controller trajectory.
TrajectoryRecord record_from(const control::Trajectory& trajectory,
                             const control::ControllerConfig& config,
                             std::optional<std::string> error = std::nullopt);

} // namespace seqscale::harness
