#include "seqscale/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqscale::harness {

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::set<std::string>& allowed,
                const std::string& context) {
    if (!object.is_object()) throw ConfigError(context + " must be a JSON object");
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + context);
        }
    }
}

double require_number(const json& object, const std::string& key, const std::string& context) {
    if (!object.contains(key)) throw ConfigError(context + " is missing required key '" + key + "'");
    if (!object[key].is_number()) throw ConfigError(context + "." + key + " must be a number");
    return object[key].get<double>();
}

double number_or(const json& object, const std::string& key, double fallback,
                 const std::string& context) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_number()) throw ConfigError(context + "." + key + " must be a number");
    return object[key].get<double>();
}

std::int64_t integer_or(const json& object, const std::string& key, std::int64_t fallback,
                        const std::string& context) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_number_integer()) {
        throw ConfigError(context + "." + key + " must be an integer");
    }
    return object[key].get<std::int64_t>();
}

std::string string_or(const json& object, const std::string& key, const std::string& fallback,
                      const std::string& context) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_string()) throw ConfigError(context + "." + key + " must be a string");
    return object[key].get<std::string>();
}

bool bool_or(const json& object, const std::string& key, bool fallback,
             const std::string& context) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_boolean()) throw ConfigError(context + "." + key + " must be a boolean");
    return object[key].get<bool>();
}

std::optional<double> optional_number(const json& object, const std::string& key,
                                      const std::string& context) {
    if (!object.contains(key) || object[key].is_null()) return std::nullopt;
    if (!object[key].is_number()) throw ConfigError(context + "." + key + " must be a number");
    return object[key].get<double>();
}

control::ControllerConfig parse_controller(const json& object) {
    const std::string ctx = "controller";
    check_keys(object,
               {"tau", "sigma", "gamma", "max_iterations", "variant", "bootstrap_rounds",
                "default_prior", "gate_enabled", "state_source"},
               ctx);
    control::ControllerConfig config;
    config.tau = require_number(object, "tau", ctx);
    // sigma has no published default; a run must state its robustness margin.
    config.sigma = require_number(object, "sigma", ctx);
    config.gamma = number_or(object, "gamma", 10.0, ctx);
    config.max_iterations = integer_or(object, "max_iterations", 0, ctx);
    if (!object.contains("max_iterations")) {
        throw ConfigError(ctx + " is missing required key 'max_iterations'");
    }
    const std::string variant_name = string_or(object, "variant", "map", ctx);
    const auto variant = control::variant_from_string(variant_name);
    if (!variant) throw ConfigError(ctx + ".variant must be one of gate|map|training_free");
    config.variant = *variant;
    config.bootstrap_rounds = integer_or(object, "bootstrap_rounds", 2, ctx);
    config.default_prior = number_or(object, "default_prior", 0.9, ctx);
    config.gate_enabled = bool_or(object, "gate_enabled", true, ctx);
    const std::string source = string_or(object, "state_source", "score_threshold", ctx);
    if (source == "score_threshold") {
        config.state_source = control::StateSource::ScoreThreshold;
    } else if (source == "truth_labels") {
        config.state_source = control::StateSource::TruthLabels;
    } else {
        throw ConfigError(ctx + ".state_source must be score_threshold|truth_labels");
    }
    try {
        config.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("controller: ") + e.what());
    }
    return config;
}

sim::SyntheticQuestionSpec parse_synthetic_question(const json& object,
                                                    const SyntheticSettings& defaults,
                                                    const std::string& context) {
    check_keys(object,
               {"id", "p0", "a", "b", "verifier_noise", "verifier_mode", "prior_p0", "prior_a",
                "prior_b"},
               context);
    sim::SyntheticQuestionSpec spec;
    spec.question_id = string_or(object, "id", "", context);
    if (spec.question_id.empty()) throw ConfigError(context + " needs a non-empty 'id'");
    spec.true_p0 = require_number(object, "p0", context);
    spec.a = require_number(object, "a", context);
    spec.b = require_number(object, "b", context);
    spec.verifier_noise = number_or(object, "verifier_noise", defaults.verifier_noise, context);
    if (object.contains("verifier_mode")) {
        const auto mode =
            sim::verifier_mode_from_string(string_or(object, "verifier_mode", "", context));
        if (!mode) throw ConfigError(context + ".verifier_mode must be binary_truth|noisy_continuous");
        spec.verifier_mode = *mode;
    } else {
        spec.verifier_mode = defaults.verifier_mode;
    }
    spec.prior_p0 = optional_number(object, "prior_p0", context);
    spec.prior_a = optional_number(object, "prior_a", context);
    spec.prior_b = optional_number(object, "prior_b", context);
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(context + ": " + e.what());
    }
    return spec;
}

RemoteQuestion parse_remote_question(const json& object, const std::string& context) {
    check_keys(object, {"id", "text", "label", "prior_p0", "prior_a", "prior_b"}, context);
    RemoteQuestion question;
    question.id = string_or(object, "id", "", context);
    if (question.id.empty()) throw ConfigError(context + " needs a non-empty 'id'");
    question.text = string_or(object, "text", question.id, context);
    if (object.contains("label")) question.label = string_or(object, "label", "", context);
    question.prior_p0 = optional_number(object, "prior_p0", context);
    question.prior_a = optional_number(object, "prior_a", context);
    question.prior_b = optional_number(object, "prior_b", context);
    return question;
}

json load_jsonl_array(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file '" + path.string() + "'");
    json array = json::array();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            throw ConfigError("dataset file '" + path.string() + "' line " +
                              std::to_string(line_no) + " is not valid JSON");
        }
        array.push_back(std::move(parsed));
    }
    return array;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded()) throw ConfigError("configuration is not valid JSON");
    check_keys(root, {"run_seed", "output_dir", "workers", "controller", "backend", "dataset"},
               "config");

    RunConfig config;
    if (!root.contains("controller")) throw ConfigError("config is missing 'controller'");
    config.controller = parse_controller(root["controller"]);
    config.run_seed = static_cast<std::uint64_t>(integer_or(root, "run_seed", 0, "config"));
    config.output_dir = string_or(root, "output_dir", "out", "config");
    config.workers = static_cast<int>(integer_or(root, "workers", 1, "config"));
    if (config.workers < 1) throw ConfigError("config.workers must be >= 1");

    if (!root.contains("backend")) throw ConfigError("config is missing 'backend'");
    const json& backend = root["backend"];
    check_keys(backend, {"synthetic", "remote"}, "backend");
    const bool has_synthetic = backend.contains("synthetic");
    const bool has_remote = backend.contains("remote");
    if (has_synthetic == has_remote) {
        throw ConfigError("backend must select exactly one of 'synthetic' or 'remote'");
    }

    if (has_synthetic) {
        config.backend = BackendKind::Synthetic;
        const json& synthetic = backend["synthetic"];
        check_keys(synthetic, {"verifier_noise", "verifier_mode"}, "backend.synthetic");
        config.synthetic.verifier_noise =
            number_or(synthetic, "verifier_noise", 0.0, "backend.synthetic");
        const std::string mode =
            string_or(synthetic, "verifier_mode", "binary_truth", "backend.synthetic");
        const auto parsed_mode = sim::verifier_mode_from_string(mode);
        if (!parsed_mode) {
            throw ConfigError("backend.synthetic.verifier_mode must be "
                              "binary_truth|noisy_continuous");
        }
        config.synthetic.verifier_mode = *parsed_mode;
    } else {
        config.backend = BackendKind::Remote;
        const json& remote = backend["remote"];
        check_keys(remote,
                   {"base_url", "generate_path", "score_path", "auth_env", "rethink_template",
                    "timeout_ms", "max_attempts", "backoff_ms", "priors"},
                   "backend.remote");
        config.remote.base_url = string_or(remote, "base_url", "", "backend.remote");
        if (config.remote.base_url.empty()) {
            throw ConfigError("backend.remote.base_url is required");
        }
        config.remote.generate_path =
            string_or(remote, "generate_path", config.remote.generate_path, "backend.remote");
        config.remote.score_path =
            string_or(remote, "score_path", config.remote.score_path, "backend.remote");
        config.remote.auth_env = string_or(remote, "auth_env", "", "backend.remote");
        config.remote.rethink_template =
            string_or(remote, "rethink_template", config.remote.rethink_template, "backend.remote");
        config.remote.timeout_ms = static_cast<int>(
            integer_or(remote, "timeout_ms", config.remote.timeout_ms, "backend.remote"));
        config.remote.max_attempts = static_cast<int>(
            integer_or(remote, "max_attempts", config.remote.max_attempts, "backend.remote"));
        config.remote.backoff_ms = static_cast<int>(
            integer_or(remote, "backoff_ms", config.remote.backoff_ms, "backend.remote"));
        if (remote.contains("priors")) {
            const json& priors = remote["priors"];
            check_keys(priors, {"p0", "a", "b"}, "backend.remote.priors");
            config.remote.prior_p0 = optional_number(priors, "p0", "backend.remote.priors");
            config.remote.prior_a = optional_number(priors, "a", "backend.remote.priors");
            config.remote.prior_b = optional_number(priors, "b", "backend.remote.priors");
        }
    }

    if (!root.contains("dataset")) throw ConfigError("config is missing 'dataset'");
    json dataset = root["dataset"];
    if (dataset.is_string()) {
        dataset = load_jsonl_array(dataset.get<std::string>());
    }
    if (!dataset.is_array()) {
        throw ConfigError("dataset must be an array of questions or a JSONL file path");
    }
    if (dataset.empty()) throw ConfigError("empty dataset");

    std::size_t index = 0;
    for (const json& item : dataset) {
        const std::string context = "dataset[" + std::to_string(index) + "]";
        if (config.backend == BackendKind::Synthetic) {
            config.synthetic_dataset.push_back(
                parse_synthetic_question(item, config.synthetic, context));
        } else {
            config.remote_dataset.push_back(parse_remote_question(item, context));
        }
        ++index;
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

} // namespace seqscale::harness
