#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "winnow/agent.hpp"
#include "winnow/clustering.hpp"
#include "winnow/embedding.hpp"
#include "winnow/llm_backend.hpp"

namespace winnow {

struct WinnowConfig {
    int k = 10;
    int max_rounds = 3;
    int num_docs = 50;
    std::uint64_t seed = 0;
    bool trust_precomputed_embeddings = true;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::string agent_model;
    std::string critic_model;
    bool debug_trace = false;
};

// The pluggable backends one pipeline run talks to. Agents and the critic
// use the same backend unless configured otherwise.
struct Backends {
    Embedder& embedder;
    ChatBackend& agent;
    ChatBackend& critic;

    Backends(Embedder& e, ChatBackend& chat) : embedder(e), agent(chat), critic(chat) {}
    Backends(Embedder& e, ChatBackend& agent_backend, ChatBackend& critic_backend)
        : embedder(e), agent(agent_backend), critic(critic_backend) {}
};

struct MergeEvent {
    std::string kind;  // "ellipse" or "hyperbola"
    int source_agent_id = 0;
    int target_agent_id = 0;
    std::size_t source_docs = 0;
    std::size_t target_docs = 0;
    std::size_t kept_docs = 0;
};

struct RoundRecord {
    int round = 0;
    std::vector<NumberedResponse> responses;
    std::optional<CriticVerdict> verdict;
    std::vector<MergeEvent> merges;
    std::vector<int> active_agent_ids_after;
};

struct AgentSnapshot {
    int agent_id = 0;
    std::vector<std::string> doc_ids;
    std::string answer;
};

// Full per-query record of the pipeline: stage 1 answers, the critic
// summary, every winnowing round with its merges, and the final answer.
struct WinnowTrace {
    std::string query;
    std::vector<AgentSnapshot> stage1_agents;
    std::optional<SummaryVerdict> summary;
    std::vector<MergeEvent> init_merges;
    std::vector<AgentSnapshot> super_agents;
    std::vector<RoundRecord> rounds;
    std::string final_answer;
    int rounds_used = 0;
    std::string termination;  // "concluded", "single_agent", "forced"
    std::vector<std::string> anomalies;
    // Prompts and raw responses, populated only with debug_trace.
    std::vector<std::pair<std::string, std::string>> exchanges;
};

nlohmann::json trace_to_json(const WinnowTrace& trace);

// Stage I: embed, cluster with k clamped to the document count, assign
// agents, and collect each agent's direct answer.
std::vector<AgentState> run_stage1(const std::string& query,
                                   const std::vector<RetrievedDocument>& docs,
                                   const WinnowConfig& cfg, Backends& backends,
                                   WinnowTrace* trace = nullptr);

// Stage II initialization: critic deduplication, then chained ellipse
// merges inside each duplicate group. Returns K' <= K super-agents with
// fresh 1-based ids.
std::vector<AgentState> initialize_super_agents(std::vector<AgentState> agents,
                                                const std::string& query,
                                                const WinnowConfig& cfg, Backends& backends,
                                                WinnowTrace* trace = nullptr);

// Stage II winnowing: up to max_rounds of answer / judge / hyperbola-merge
// cycles. `docs` is the original retrieved set, used to render each
// agent's documents in retrieval order. Always returns an answer.
std::string run_winnowing(std::vector<AgentState> super_agents, const std::string& query,
                          const std::vector<RetrievedDocument>& docs, const WinnowConfig& cfg,
                          Backends& backends, WinnowTrace& trace);

// Full pipeline for one query.
std::pair<std::string, WinnowTrace> answer_query(const std::string& query,
                                                 const std::vector<RetrievedDocument>& docs,
                                                 const WinnowConfig& cfg, Backends& backends);

}  // namespace winnow
