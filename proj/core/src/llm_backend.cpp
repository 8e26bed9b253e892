#include "winnow/llm_backend.hpp"

#include <chrono>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "winnow/embedding.hpp"
#include "winnow/net.hpp"

namespace winnow {

std::string request_fingerprint(const std::string& user_text) {
    std::ostringstream out;
    out << std::hex << fnv1a64(user_text);
    return out.str();
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open script file: " + path);
    }
    nlohmann::json spec;
    try {
        in >> spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid script file " + path + ": " + e.what());
    }

    ScriptedBackend backend(spec.value("default", std::string{}));
    if (spec.contains("fingerprints")) {
        for (const auto& [key, value] : spec["fingerprints"].items()) {
            backend.add_fingerprint(key, value.get<std::string>());
        }
    }
    if (spec.contains("rules")) {
        for (const auto& rule : spec["rules"]) {
            Rule r;
            if (rule["contains"].is_array()) {
                r.contains = rule["contains"].get<std::vector<std::string>>();
            } else {
                r.contains.push_back(rule["contains"].get<std::string>());
            }
            r.response = rule["response"].get<std::string>();
            backend.add_rule(std::move(r));
        }
    }
    return backend;
}

void ScriptedBackend::add_fingerprint(const std::string& fingerprint_hex, std::string response) {
    fingerprints_[fingerprint_hex] = std::move(response);
}

void ScriptedBackend::add_response_for(const std::string& user_text, std::string response) {
    fingerprints_[request_fingerprint(user_text)] = std::move(response);
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
    ChatResponse response;
    const auto exact = fingerprints_.find(request_fingerprint(request.user_text));
    if (exact != fingerprints_.end()) {
        response.text = exact->second;
        return response;
    }
    for (const auto& rule : rules_) {
        bool all = true;
        for (const auto& needle : rule.contains) {
            if (request.user_text.find(needle) == std::string::npos) {
                all = false;
                break;
            }
        }
        if (all) {
            response.text = rule.response;
            return response;
        }
    }
    response.text = default_response_;
    return response;
}

struct HttpChatBackend::Impl {
    Config config;
    std::counting_semaphore<> in_flight;

    explicit Impl(Config cfg)
        : config(std::move(cfg)),
          in_flight(std::max(1, config.max_concurrent_requests)) {}
};

HttpChatBackend::HttpChatBackend(Config config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpChatBackend::~HttpChatBackend() = default;

namespace {

bool retryable_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
    net::check_network_allowed();

    const Config& cfg = impl_->config;
    nlohmann::json body;
    body["model"] = request.model_name.empty() ? cfg.model : request.model_name;
    nlohmann::json messages = nlohmann::json::array();
    if (request.system_text) {
        messages.push_back({{"role", "system"}, {"content", *request.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    body["messages"] = std::move(messages);
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    const std::string payload = body.dump();

    impl_->in_flight.acquire();
    struct Release {
        std::counting_semaphore<>& sem;
        ~Release() { sem.release(); }
    } release{impl_->in_flight};

    std::string last_error;
    auto backoff = cfg.initial_backoff;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        const auto started = std::chrono::steady_clock::now();

        httplib::Client client(cfg.base_url);
        client.set_read_timeout(cfg.timeout_seconds, 0);
        client.set_connection_timeout(cfg.timeout_seconds, 0);
        httplib::Headers headers;
        if (!cfg.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + cfg.api_key);
        }
        auto res = client.Post("/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed to " + cfg.base_url;
            continue;
        }
        if (retryable_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw BackendError("chat endpoint returned HTTP " + std::to_string(res->status) +
                               ": " + res->body);
        }

        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponseError(std::string("chat response is not JSON: ") + e.what());
        }
        if (!parsed.contains("choices") || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message") ||
            !parsed["choices"][0]["message"].contains("content") ||
            parsed["choices"][0]["message"]["content"].is_null()) {
            throw MalformedResponseError("chat response missing choices[0].message.content");
        }

        ChatResponse response;
        response.text = parsed["choices"][0]["message"]["content"].get<std::string>();
        if (parsed.contains("usage")) {
            TokenUsage usage;
            usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
            response.token_usage = usage;
        }
        response.latency_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return response;
    }
    throw BackendError("chat backend unavailable after " + std::to_string(cfg.max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace winnow
