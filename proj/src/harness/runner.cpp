#include "seqscale/harness/runner.hpp"

#include <fstream>

#include <json.hpp>

#include "seqscale/harness/remote.hpp"
#include "seqscale/simulation.hpp"

namespace seqscale::harness {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::vector<TrajectoryRecord> records_for(const control::DatasetResult& dataset,
                                          const control::ControllerConfig& config) {
    std::vector<TrajectoryRecord> records;
    records.resize(dataset.trajectories.size());
    for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
        if (dataset.trajectories[i].has_value()) {
            records[i] = record_from(*dataset.trajectories[i], config);
        }
    }
    for (const auto& failure : dataset.failures) {
        records[failure.index] = record_from(failure.partial, config, failure.message);
    }
    return records;
}

} // namespace

RunOutcome execute_run(const RunConfig& config) {
    RunOutcome outcome;
    if (config.backend == BackendKind::Synthetic) {
        sim::SyntheticBackend backend(config.synthetic_dataset, config.run_seed);
        const std::vector<control::Question> questions = backend.questions();
        outcome.dataset = control::run_dataset(questions, config.controller, backend, backend,
                                               backend, config.workers);
        outcome.records = records_for(outcome.dataset, config.controller);
        return outcome;
    }

    RemoteBackend backend(config.remote);
    RemotePriorProvider priors(config.remote_dataset, config.remote);
    std::vector<control::Question> questions;
    questions.reserve(config.remote_dataset.size());
    for (const auto& entry : config.remote_dataset) {
        questions.push_back({entry.id, entry.text, entry.label});
    }
    outcome.dataset = control::run_dataset(questions, config.controller, backend, backend, priors,
                                           config.workers);
    outcome.records = records_for(outcome.dataset, config.controller);

    for (std::size_t i = 0; i < outcome.records.size(); ++i) {
        TrajectoryRecord& record = outcome.records[i];
        record.verifier_tokens = backend.verifier_tokens_for(record.question_id);
        // Label-based correctness: exact match after trimming. Anything more
        // semantic belongs to the verifier, not the harness.
        if (record.error.has_value()) continue;
        const auto& entry = config.remote_dataset[i];
        if (entry.label.has_value() && outcome.dataset.trajectories[i].has_value()) {
            const auto& final_output = outcome.dataset.trajectories[i]->final_output;
            if (final_output.has_value()) {
                record.final_correct = trimmed(final_output->text) == trimmed(*entry.label);
            }
        }
    }
    return outcome;
}

std::string bounds_to_json(const markov::BoundsReport& report) {
    auto entry_json = [](const markov::BoundEntry& entry) {
        json object = {
            {"value", entry.value.has_value() ? json(*entry.value) : json(nullptr)},
            {"trajectories", entry.trajectories},
            {"transitions", entry.transitions},
        };
        return object;
    };
    const json object = {
        {"neutral", entry_json(report.neutral)},
        {"upper", entry_json(report.upper)},
        {"lower", entry_json(report.lower)},
        {"counts",
         {{"beneficial", report.beneficial_trajectories},
          {"detrimental", report.detrimental_trajectories},
          {"neutral", report.neutral_trajectories}}},
        {"warnings", report.warnings},
    };
    return object.dump(2);
}

void persist_run(const RunOutcome& outcome, const std::filesystem::path& output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec && !std::filesystem::exists(output_dir)) {
        throw std::runtime_error("cannot create output directory '" + output_dir.string() + "'");
    }

    TrajectoryWriter writer(output_dir / "trajectories.jsonl");
    for (const auto& record : outcome.records) writer.append(record);

    std::ofstream bounds(output_dir / "bounds.json", std::ios::out | std::ios::trunc);
    if (!bounds) {
        throw std::runtime_error("cannot write bounds file under '" + output_dir.string() + "'");
    }
    bounds << bounds_to_json(outcome.dataset.bounds) << '\n';
}

} // namespace seqscale::harness
