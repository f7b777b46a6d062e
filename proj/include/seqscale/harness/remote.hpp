#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "seqscale/controller.hpp"
#include "seqscale/harness/config.hpp"

// Generator/verifier realization against a JSON-over-HTTP model endpoint.
// generate: POST {question, previous?, template?} -> {completion, tokens}
// score:    POST {question, completion} -> {score, tokens?}
namespace seqscale::harness {

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RemoteBackend final : public control::Generator, public control::Verifier {
public:
    // Throws BackendError when auth_env names a variable that is not set.
    explicit RemoteBackend(RemoteSettings settings);

    control::Completion generate(const control::Question& question,
                                 const control::Completion* previous) override;
    double score(const control::Question& question,
                 const control::Completion& completion) override;

    // Out-of-range scores are clamped; this counts how often.
    std::int64_t clamp_warnings() const { return clamp_warnings_.load(); }

    // Scoring-endpoint tokens, tallied per question when the endpoint
    // reports them.
    std::int64_t verifier_tokens_for(const std::string& question_id) const;

private:
    std::string post_json(const std::string& path, const std::string& body);

    RemoteSettings settings_;
    std::string credential_;
    std::atomic<std::int64_t> clamp_warnings_{0};
    mutable std::mutex token_mutex_;
    std::unordered_map<std::string, std::int64_t> verifier_tokens_;
};

// Serves per-question priors from the dataset entries, falling back to the
// config-level defaults.
class RemotePriorProvider final : public control::PriorProvider {
public:
    RemotePriorProvider(const std::vector<RemoteQuestion>& questions,
                        const RemoteSettings& settings);

    control::Priors prior(const control::Question& question) override;

private:
    std::unordered_map<std::string, RemoteQuestion> by_id_;
    RemoteSettings settings_;
};

} // namespace seqscale::harness
