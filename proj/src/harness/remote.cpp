#include "seqscale/harness/remote.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace seqscale::harness {

namespace {

using nlohmann::json;

} // namespace

RemoteBackend::RemoteBackend(RemoteSettings settings) : settings_(std::move(settings)) {
    if (settings_.base_url.empty()) throw BackendError("remote backend needs a base_url");
    if (!settings_.auth_env.empty()) {
        const char* value = std::getenv(settings_.auth_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw BackendError("credential environment variable '" + settings_.auth_env +
                               "' is not set");
        }
        credential_ = value;
    }
}

std::string RemoteBackend::post_json(const std::string& path, const std::string& body) {
    const int attempts = std::max(1, settings_.max_attempts);
    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay =
                std::chrono::milliseconds(settings_.backoff_ms) * (std::int64_t{1} << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        // One client per request keeps concurrent sessions isolated.
        httplib::Client client(settings_.base_url);
        client.set_connection_timeout(0, settings_.timeout_ms * 1000);
        client.set_read_timeout(settings_.timeout_ms / 1000, (settings_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);
        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_failure = "connection error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_failure = "server error: HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw BackendError("endpoint " + path + " answered HTTP " +
                               std::to_string(result->status));
        }
        return result->body;
    }
    throw BackendError("endpoint " + path + " unreachable after " + std::to_string(attempts) +
                       " attempts (" + last_failure + ")");
}

control::Completion RemoteBackend::generate(const control::Question& question,
                                            const control::Completion* previous) {
    json request = {{"question", question.text}};
    if (previous != nullptr) {
        request["previous"] = previous->text;
        request["template"] = settings_.rethink_template;
    }
    const std::string body = post_json(settings_.generate_path, request.dump());
    const json response = json::parse(body, nullptr, false);
    if (response.is_discarded() || !response.is_object() || !response.contains("completion") ||
        !response["completion"].is_string()) {
        throw BackendError("malformed generate response: " + body.substr(0, 200));
    }
    control::Completion completion;
    completion.text = response["completion"].get<std::string>();
    if (response.contains("tokens") && response["tokens"].is_number()) {
        completion.tokens = response["tokens"].get<std::int64_t>();
    }
    completion.step = previous == nullptr ? 0 : previous->step + 1;
    return completion;
}

double RemoteBackend::score(const control::Question& question,
                            const control::Completion& completion) {
    const json request = {{"question", question.text}, {"completion", completion.text}};
    const std::string body = post_json(settings_.score_path, request.dump());
    const json response = json::parse(body, nullptr, false);
    if (response.is_discarded() || !response.is_object() || !response.contains("score") ||
        !response["score"].is_number()) {
        throw BackendError("malformed score response: " + body.substr(0, 200));
    }
    if (response.contains("tokens") && response["tokens"].is_number()) {
        std::lock_guard lock(token_mutex_);
        verifier_tokens_[question.id] += response["tokens"].get<std::int64_t>();
    }
    const double raw = response["score"].get<double>();
    const double clamped = std::clamp(raw, 0.0, 1.0);
    if (clamped != raw) clamp_warnings_.fetch_add(1);
    return clamped;
}

std::int64_t RemoteBackend::verifier_tokens_for(const std::string& question_id) const {
    std::lock_guard lock(token_mutex_);
    const auto it = verifier_tokens_.find(question_id);
    return it == verifier_tokens_.end() ? 0 : it->second;
}

RemotePriorProvider::RemotePriorProvider(const std::vector<RemoteQuestion>& questions,
                                         const RemoteSettings& settings)
    : settings_(settings) {
    for (const auto& question : questions) by_id_.emplace(question.id, question);
}

control::Priors RemotePriorProvider::prior(const control::Question& question) {
    control::Priors priors;
    std::optional<double> a = settings_.prior_a;
    std::optional<double> b = settings_.prior_b;
    priors.p0 = settings_.prior_p0;
    const auto it = by_id_.find(question.id);
    if (it != by_id_.end()) {
        if (it->second.prior_p0.has_value()) priors.p0 = it->second.prior_p0;
        if (it->second.prior_a.has_value()) a = it->second.prior_a;
        if (it->second.prior_b.has_value()) b = it->second.prior_b;
    }
    if (a.has_value() && b.has_value() && *a + *b > 0.0) {
        priors.model = markov::TransitionModel(*a, *b);
    }
    return priors;
}

} // namespace seqscale::harness
