#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "winnow/types.hpp"

namespace winnow {

struct ChatRequest {
    std::optional<std::string> system_text;
    std::string user_text;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::string model_name;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    std::optional<TokenUsage> token_usage;
    std::optional<double> latency_seconds;
};

// Uniform chat interface for agents and the critic. Implementations must
// be safe to share across concurrent in-flight requests.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Deterministic scripted backend for tests and offline runs. Responses are
// looked up by (1) exact FNV-1a fingerprint of the user text, then (2) the
// first rule whose `contains` substrings all appear in the user text, then
// the default response. Performs no I/O.
class ScriptedBackend : public ChatBackend {
public:
    struct Rule {
        std::vector<std::string> contains;
        std::string response;
    };

    explicit ScriptedBackend(std::string default_response = "")
        : default_response_(std::move(default_response)) {}

    // Loads {"default": ..., "fingerprints": {hex: text}, "rules":
    // [{"contains": [...], "response": ...}]} from a JSON file.
    static ScriptedBackend from_file(const std::string& path);

    void set_default(std::string text) { default_response_ = std::move(text); }
    void add_fingerprint(const std::string& fingerprint_hex, std::string response);
    // Convenience: fingerprints the given user text directly.
    void add_response_for(const std::string& user_text, std::string response);
    void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

    ChatResponse complete(const ChatRequest& request) override;

private:
    std::map<std::string, std::string> fingerprints_;
    std::vector<Rule> rules_;
    std::string default_response_;
};

// Hex fingerprint of a request's user text, as used by ScriptedBackend.
std::string request_fingerprint(const std::string& user_text);

// Live backend speaking the JSON chat-completions protocol:
// POST {base_url}/chat/completions, answer read from
// choices[0].message.content. Transient failures (connection errors,
// 408/429/5xx) are retried with exponential backoff.
class HttpChatBackend : public ChatBackend {
public:
    struct Config {
        std::string base_url;
        std::string model;
        std::string api_key;
        int max_attempts = 3;
        std::chrono::milliseconds initial_backoff{1000};
        int timeout_seconds = 120;
        int max_concurrent_requests = 8;
    };

    explicit HttpChatBackend(Config config);
    ~HttpChatBackend() override;

    ChatResponse complete(const ChatRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace winnow
