#include "seqscale/harness/trajectory_io.hpp"

#include <stdexcept>

#include <json.hpp>

namespace seqscale::harness {

namespace {

using nlohmann::json;

json to_json(const IterationEntry& entry) {
    json object = {
        {"i", entry.i},
        {"score", entry.score},
        {"map_estimate", entry.map_estimate},
        {"stopped", entry.stopped},
    };
    object["truth"] = entry.truth.has_value() ? json(*entry.truth) : json(nullptr);
    return object;
}

IterationEntry iteration_from_json(const json& object) {
    IterationEntry entry;
    entry.i = object.at("i").get<std::int64_t>();
    entry.score = object.at("score").get<double>();
    entry.map_estimate = object.at("map_estimate").get<double>();
    entry.stopped = object.at("stopped").get<bool>();
    if (object.contains("truth") && !object["truth"].is_null()) {
        entry.truth = object["truth"].get<bool>();
    }
    return entry;
}

template <typename T>
json opt_json(const std::optional<T>& value) {
    return value.has_value() ? json(*value) : json(nullptr);
}

} // namespace

std::string serialize_record(const TrajectoryRecord& record) {
    json iterations = json::array();
    for (const auto& entry : record.iterations) iterations.push_back(to_json(entry));
    const json object = {
        {"question_id", record.question_id},
        {"variant", record.variant},
        {"prior_p0", record.prior_p0},
        {"a", opt_json(record.a)},
        {"b", opt_json(record.b)},
        {"sigma", record.sigma},
        {"tau", record.tau},
        {"regime", record.regime},
        {"iterations", iterations},
        {"stop_reason", record.stop_reason},
        {"wall_ms", record.wall_ms},
        {"token_proxy", record.token_proxy},
        {"verifier_tokens", record.verifier_tokens},
        {"final_correct", opt_json(record.final_correct)},
        {"error", opt_json(record.error)},
    };
    return object.dump();
}

TrajectoryRecord parse_record(const std::string& line) {
    const json object = json::parse(line);
    TrajectoryRecord record;
    record.question_id = object.at("question_id").get<std::string>();
    record.variant = object.at("variant").get<std::string>();
    record.prior_p0 = object.at("prior_p0").get<double>();
    if (!object.at("a").is_null()) record.a = object["a"].get<double>();
    if (!object.at("b").is_null()) record.b = object["b"].get<double>();
    record.sigma = object.at("sigma").get<double>();
    record.tau = object.at("tau").get<double>();
    record.regime = object.at("regime").get<std::string>();
    for (const json& entry : object.at("iterations")) {
        record.iterations.push_back(iteration_from_json(entry));
    }
    record.stop_reason = object.at("stop_reason").get<std::string>();
    record.wall_ms = object.at("wall_ms").get<double>();
    record.token_proxy = object.at("token_proxy").get<std::int64_t>();
    record.verifier_tokens = object.at("verifier_tokens").get<std::int64_t>();
    if (!object.at("final_correct").is_null()) {
        record.final_correct = object["final_correct"].get<bool>();
    }
    if (!object.at("error").is_null()) record.error = object["error"].get<std::string>();
    return record;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::out | std::ios::app | std::ios::binary);
    if (!out_) {
        throw std::runtime_error("cannot open trajectory file '" + path.string() +
                                 "' for appending");
    }
}

void TrajectoryWriter::append(const TrajectoryRecord& record) {
    out_ << serialize_record(record) << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("trajectory write failed");
}

std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file '" + path.string() + "'");
    std::vector<TrajectoryRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(parse_record(line));
    }
    return records;
}

TrajectoryRecord record_from(const control::Trajectory& trajectory,
                             const control::ControllerConfig& config,
                             std::optional<std::string> error) {
    TrajectoryRecord record;
    record.question_id = trajectory.question_id;
    record.variant = control::to_string(config.variant);
    record.prior_p0 = trajectory.prior_p0;
    if (trajectory.transition_model_used.has_value()) {
        record.a = trajectory.transition_model_used->a();
        record.b = trajectory.transition_model_used->b();
    }
    record.sigma = config.sigma;
    record.tau = config.tau;
    if (trajectory.regime.has_value()) record.regime = markov::to_string(*trajectory.regime);
    for (const auto& iteration : trajectory.iterations) {
        record.iterations.push_back({iteration.index, iteration.verifier_score,
                                     iteration.map_estimate, iteration.stopped, iteration.truth});
    }
    record.stop_reason = error.has_value() ? "error" : control::to_string(trajectory.stop_reason);
    record.wall_ms = trajectory.wall_ms;
    record.token_proxy = trajectory.token_proxy;
    if (trajectory.final_output.has_value()) {
        record.final_correct = trajectory.final_output->truth;
    }
    record.error = std::move(error);
    return record;
}

} // namespace seqscale::harness
