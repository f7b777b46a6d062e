#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqscale/controller.hpp"
#include "seqscale/simulation.hpp"

// File-backed run configuration. One declarative JSON document; unknown keys
// are errors so sweeps stay auditable.
namespace seqscale::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RemoteQuestion {
    std::string id;
    std::string text;
    std::optional<std::string> label;
    std::optional<double> prior_p0;
    std::optional<double> prior_a;
    std::optional<double> prior_b;
};

struct RemoteSettings {
    std::string base_url;
    std::string generate_path = "/generate";
    std::string score_path = "/score";
    std::string auth_env; // name of the env var holding the credential, if any
    std::string rethink_template =
        "Re-examine your previous answer and answer the question again.\n"
        "Previous answer: {previous}";
    int timeout_ms = 30'000;
    int max_attempts = 3;
    int backoff_ms = 100;
    std::optional<double> prior_p0; // dataset-level prior defaults
    std::optional<double> prior_a;
    std::optional<double> prior_b;
};

struct SyntheticSettings {
    double verifier_noise = 0.0;
    sim::VerifierMode verifier_mode = sim::VerifierMode::BinaryTruth;
};

enum class BackendKind { Synthetic, Remote };

struct RunConfig {
    control::ControllerConfig controller;
    BackendKind backend = BackendKind::Synthetic;
    SyntheticSettings synthetic;
    RemoteSettings remote;
    std::vector<sim::SyntheticQuestionSpec> synthetic_dataset;
    std::vector<RemoteQuestion> remote_dataset;
    std::uint64_t run_seed = 0;
    std::filesystem::path output_dir;
    int workers = 1;
};

// Parses and validates; throws ConfigError with the offending key path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace seqscale::harness
