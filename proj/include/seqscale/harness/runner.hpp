#pragma once

#include <filesystem>
#include <vector>

#include "seqscale/controller.hpp"
#include "seqscale/harness/config.hpp"
#include "seqscale/harness/trajectory_io.hpp"

// Drives one configured run end to end: backend construction, dataset
// execution, record conversion, persistence.
namespace seqscale::harness {

struct RunOutcome {
    control::DatasetResult dataset;
    // One record per question, in dataset order; failures appear with their
    // error annotation and partial iterations.
    std::vector<TrajectoryRecord> records;
};

RunOutcome execute_run(const RunConfig& config);

// Writes trajectories.jsonl and bounds.json under the directory.
void persist_run(const RunOutcome& outcome, const std::filesystem::path& output_dir);

std::string bounds_to_json(const markov::BoundsReport& report);

} // namespace seqscale::harness
