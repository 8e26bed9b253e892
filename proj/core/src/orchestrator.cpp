#include "winnow/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <future>

namespace winnow {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

// The agent's documents in original retrieval order.
std::vector<RetrievedDocument> docs_for_cluster(const DocumentCluster& cluster,
                                                const std::vector<RetrievedDocument>& docs) {
    std::vector<RetrievedDocument> out;
    for (const auto& doc : docs) {
        if (cluster.doc_ids.count(doc.id)) out.push_back(doc);
    }
    return out;
}

ChatRequest make_request(const std::string& user_text, const WinnowConfig& cfg,
                         const std::string& model) {
    ChatRequest request;
    request.user_text = user_text;
    request.temperature = cfg.temperature;
    request.max_tokens = cfg.max_tokens;
    request.model_name = model;
    return request;
}

void record_exchange(WinnowTrace* trace, const std::string& prompt, const std::string& raw) {
    if (trace) trace->exchanges.emplace_back(prompt, raw);
}

// Asks an agent for a structured response; on parse failure retries the
// call once, then falls back to the entire raw text as the answer.
StructuredResponse ask_structured(ChatBackend& backend, const std::string& prompt,
                                  const WinnowConfig& cfg) {
    std::string raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        raw = backend.complete(make_request(prompt, cfg, cfg.agent_model)).text;
        try {
            return parse_structured_response(raw);
        } catch (const ParseError&) {
        }
    }
    StructuredResponse fallback;
    fallback.raw = raw;
    fallback.answer = trim(raw);
    return fallback;
}

AgentSnapshot snapshot_agent(const AgentState& agent) {
    AgentSnapshot snap;
    snap.agent_id = agent.agent_id;
    snap.doc_ids.assign(agent.cluster.doc_ids.begin(), agent.cluster.doc_ids.end());
    if (agent.last_response) snap.answer = agent.last_response->answer;
    return snap;
}

nlohmann::json merge_event_to_json(const MergeEvent& event) {
    return {{"kind", event.kind},
            {"source_agent_id", event.source_agent_id},
            {"target_agent_id", event.target_agent_id},
            {"source_docs", event.source_docs},
            {"target_docs", event.target_docs},
            {"kept_docs", event.kept_docs}};
}

nlohmann::json snapshot_to_json(const AgentSnapshot& snap) {
    return {{"agent_id", snap.agent_id}, {"doc_ids", snap.doc_ids}, {"answer", snap.answer}};
}

}  // namespace

nlohmann::json trace_to_json(const WinnowTrace& trace) {
    nlohmann::json j;
    j["query"] = trace.query;
    j["final_answer"] = trace.final_answer;
    j["rounds_used"] = trace.rounds_used;
    j["termination"] = trace.termination;

    j["stage1_agents"] = nlohmann::json::array();
    for (const auto& snap : trace.stage1_agents) j["stage1_agents"].push_back(snapshot_to_json(snap));

    if (trace.summary) {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& group : trace.summary->duplicate_groups) {
            groups.push_back(std::vector<int>(group.begin(), group.end()));
        }
        j["summary"] = {{"unique_answers", trace.summary->unique_answers},
                        {"duplicate_groups", groups}};
    }

    j["init_merges"] = nlohmann::json::array();
    for (const auto& event : trace.init_merges) j["init_merges"].push_back(merge_event_to_json(event));

    j["super_agents"] = nlohmann::json::array();
    for (const auto& snap : trace.super_agents) j["super_agents"].push_back(snapshot_to_json(snap));

    j["rounds"] = nlohmann::json::array();
    for (const auto& round : trace.rounds) {
        nlohmann::json r;
        r["round"] = round.round;
        r["responses"] = nlohmann::json::array();
        for (const auto& item : round.responses) {
            r["responses"].push_back({{"agent_id", item.agent_id},
                                      {"evidence", item.response.evidence},
                                      {"explanation", item.response.explanation},
                                      {"answer", item.response.answer}});
        }
        if (round.verdict) {
            r["verdict"] = {
                {"incorrect_agent_ids", std::vector<int>(round.verdict->incorrect_agent_ids.begin(),
                                                         round.verdict->incorrect_agent_ids.end())},
                {"explanation", round.verdict->explanation},
                {"conclude", round.verdict->conclude}};
            if (round.verdict->final_answer) {
                r["verdict"]["final_answer"] = *round.verdict->final_answer;
            }
        }
        r["merges"] = nlohmann::json::array();
        for (const auto& event : round.merges) r["merges"].push_back(merge_event_to_json(event));
        r["active_agent_ids_after"] = round.active_agent_ids_after;
        j["rounds"].push_back(std::move(r));
    }

    if (!trace.anomalies.empty()) j["anomalies"] = trace.anomalies;
    if (!trace.exchanges.empty()) {
        j["exchanges"] = nlohmann::json::array();
        for (const auto& [prompt, raw] : trace.exchanges) {
            j["exchanges"].push_back({{"prompt", prompt}, {"response", raw}});
        }
    }
    return j;
}

std::vector<AgentState> run_stage1(const std::string& query,
                                   const std::vector<RetrievedDocument>& docs,
                                   const WinnowConfig& cfg, Backends& backends,
                                   WinnowTrace* trace) {
    if (docs.empty()) {
        throw InputError("run_stage1: no documents");
    }
    EmbedOptions embed_opts;
    embed_opts.trust_precomputed = cfg.trust_precomputed_embeddings;
    const auto vectors = embed_documents(query, docs, backends.embedder, embed_opts);

    const int k = std::min<int>(cfg.k, static_cast<int>(docs.size()));
    const auto assignment = kmeans_cluster(vectors, k, cfg.seed);
    auto agents = assign_agents(assignment, docs, vectors);

    // Fan out one direct-answer call per agent, join in agent order.
    std::vector<std::string> prompts;
    prompts.reserve(agents.size());
    for (const auto& agent : agents) {
        prompts.push_back(render_stage1_prompt(query, docs_for_cluster(agent.cluster, docs)));
    }
    std::vector<std::future<std::string>> futures;
    futures.reserve(agents.size());
    for (const auto& prompt : prompts) {
        futures.push_back(std::async(std::launch::async, [&backends, &cfg, prompt] {
            return backends.agent.complete(make_request(prompt, cfg, cfg.agent_model)).text;
        }));
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string raw = futures[i].get();
        StructuredResponse response;
        response.raw = raw;
        response.answer = trim(raw);
        agents[i].last_response = std::move(response);
        if (trace && cfg.debug_trace) record_exchange(trace, prompts[i], raw);
    }

    if (trace) {
        for (const auto& agent : agents) trace->stage1_agents.push_back(snapshot_agent(agent));
    }
    return agents;
}

std::vector<AgentState> initialize_super_agents(std::vector<AgentState> agents,
                                                const std::string& query,
                                                const WinnowConfig& cfg, Backends& backends,
                                                WinnowTrace* trace) {
    if (agents.empty()) {
        throw InputError("initialize_super_agents: no agents");
    }
    if (agents.size() == 1) {
        agents.front().agent_id = 1;
        if (trace) trace->super_agents.push_back(snapshot_agent(agents.front()));
        return agents;
    }

    std::vector<std::string> answers;
    answers.reserve(agents.size());
    for (const auto& agent : agents) {
        answers.push_back(agent.last_response ? agent.last_response->answer : "");
    }
    const std::string prompt = render_summary_prompt(query, answers);

    SummaryVerdict verdict;
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        const std::string raw = backends.critic.complete(make_request(prompt, cfg, cfg.critic_model)).text;
        if (trace && cfg.debug_trace) record_exchange(trace, prompt, raw);
        try {
            verdict = parse_summary_verdict(raw, static_cast<int>(agents.size()));
            parsed = true;
        } catch (const ParseError&) {
        }
    }
    if (!parsed) {
        // Every agent becomes its own super-agent.
        for (std::size_t i = 0; i < agents.size(); ++i) {
            verdict.duplicate_groups.push_back({static_cast<int>(i + 1)});
        }
        if (trace) trace->anomalies.push_back("summary parse failed; singleton fallback");
    }
    if (trace) trace->summary = verdict;

    // Chain pairwise ellipse merges inside each duplicate group, in listed
    // order; the result of each merge is the next merge's left operand.
    std::vector<AgentState> super_agents;
    int next_id = 1;
    for (const auto& group : verdict.duplicate_groups) {
        auto it = group.begin();
        const int first_id = *it;
        DocumentCluster merged = agents[first_id - 1].cluster;
        for (++it; it != group.end(); ++it) {
            const DocumentCluster& other = agents[*it - 1].cluster;
            const MergeResult result = ellipse_merge(merged, other);

            MergeEvent event;
            event.kind = "ellipse";
            event.source_agent_id = *it;
            event.target_agent_id = first_id;
            event.source_docs = other.doc_ids.size();
            event.target_docs = merged.doc_ids.size();
            event.kept_docs = result.kept_doc_ids.size();
            if (trace) trace->init_merges.push_back(event);

            std::map<std::string, Embedding> kept;
            for (const auto& id : result.kept_doc_ids) {
                const auto in_merged = merged.vectors.find(id);
                kept.emplace(id, in_merged != merged.vectors.end() ? in_merged->second
                                                                   : other.vectors.at(id));
            }
            merged = make_cluster(kept);
        }

        AgentState super_agent;
        super_agent.agent_id = next_id++;
        super_agent.cluster = std::move(merged);
        super_agent.last_response = agents[first_id - 1].last_response;
        super_agents.push_back(std::move(super_agent));
    }

    if (trace) {
        for (const auto& agent : super_agents) trace->super_agents.push_back(snapshot_agent(agent));
    }
    return super_agents;
}

std::string run_winnowing(std::vector<AgentState> agents, const std::string& query,
                          const std::vector<RetrievedDocument>& docs, const WinnowConfig& cfg,
                          Backends& backends, WinnowTrace& trace) {
    if (agents.empty()) {
        throw InputError("run_winnowing: no super-agents");
    }

    auto finish = [&trace](const std::string& answer, int round, const char* reason) {
        trace.final_answer = answer;
        trace.rounds_used = round;
        trace.termination = reason;
        return answer;
    };

    for (int round = 1; round <= cfg.max_rounds; ++round) {
        RoundRecord record;
        record.round = round;

        // Fan out the structured-answer calls, join in agent order.
        std::vector<std::string> prompts;
        prompts.reserve(agents.size());
        for (const auto& agent : agents) {
            prompts.push_back(
                render_stage2_prompt(query, docs_for_cluster(agent.cluster, docs), agent.feedback));
        }
        std::vector<std::future<StructuredResponse>> futures;
        futures.reserve(agents.size());
        for (const auto& prompt : prompts) {
            futures.push_back(std::async(std::launch::async, [&backends, &cfg, prompt] {
                return ask_structured(backends.agent, prompt, cfg);
            }));
        }
        for (std::size_t i = 0; i < agents.size(); ++i) {
            agents[i].last_response = futures[i].get();
            record.responses.push_back({agents[i].agent_id, *agents[i].last_response});
            if (cfg.debug_trace) record_exchange(&trace, prompts[i], agents[i].last_response->raw);
        }

        // A lone super-agent needs no critic.
        if (agents.size() == 1) {
            record.active_agent_ids_after = {agents.front().agent_id};
            trace.rounds.push_back(std::move(record));
            return finish(agents.front().last_response->answer, round, "single_agent");
        }

        std::set<int> active_ids;
        for (const auto& agent : agents) active_ids.insert(agent.agent_id);
        const std::string judgement_prompt = render_judgement_prompt(query, record.responses);

        CriticVerdict verdict;
        bool parsed = false;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            const std::string raw =
                backends.critic.complete(make_request(judgement_prompt, cfg, cfg.critic_model)).text;
            if (cfg.debug_trace) record_exchange(&trace, judgement_prompt, raw);
            try {
                verdict = parse_critic_verdict(raw, active_ids);
                parsed = true;
            } catch (const ParseError&) {
            }
        }
        if (!parsed) {
            // Fail-safe toward continuing: a no-op round.
            verdict = CriticVerdict{};
            trace.anomalies.push_back("critic parse failed in round " + std::to_string(round));
        }
        record.verdict = verdict;

        if (verdict.conclude) {
            record.active_agent_ids_after = std::vector<int>(active_ids.begin(), active_ids.end());
            trace.rounds.push_back(std::move(record));
            return finish(*verdict.final_answer, round, "concluded");
        }

        std::set<int> incorrect = verdict.incorrect_agent_ids;
        if (incorrect.size() == agents.size()) {
            // At least one agent must survive; spare the lowest id.
            trace.anomalies.push_back("critic marked all agents incorrect in round " +
                                      std::to_string(round));
            incorrect.erase(*incorrect.begin());
        }

        if (!incorrect.empty()) {
            // Remaining set is fixed for the whole round, so intra-round
            // merges do not cascade.
            std::vector<std::size_t> remaining_indices;
            for (std::size_t i = 0; i < agents.size(); ++i) {
                if (!incorrect.count(agents[i].agent_id)) remaining_indices.push_back(i);
            }
            std::vector<DocumentCluster> remaining_clusters;
            for (auto idx : remaining_indices) remaining_clusters.push_back(agents[idx].cluster);

            for (int incorrect_id : incorrect) {
                auto source_it =
                    std::find_if(agents.begin(), agents.end(), [incorrect_id](const AgentState& a) {
                        return a.agent_id == incorrect_id;
                    });
                const std::size_t target_pos =
                    nearest_remaining_cluster(source_it->cluster, remaining_clusters);
                AgentState& target = agents[remaining_indices[target_pos]];

                const MergeResult result = hyperbola_merge(target.cluster, source_it->cluster);

                MergeEvent event;
                event.kind = "hyperbola";
                event.source_agent_id = incorrect_id;
                event.target_agent_id = target.agent_id;
                event.source_docs = source_it->cluster.doc_ids.size();
                event.target_docs = target.cluster.doc_ids.size();
                event.kept_docs = result.kept_doc_ids.size();
                record.merges.push_back(event);

                std::map<std::string, Embedding> kept;
                for (const auto& id : result.kept_doc_ids) {
                    const auto in_target = target.cluster.vectors.find(id);
                    kept.emplace(id, in_target != target.cluster.vectors.end()
                                         ? in_target->second
                                         : source_it->cluster.vectors.at(id));
                }
                target.cluster = make_cluster(kept);
            }
            std::erase_if(agents, [&incorrect](const AgentState& a) {
                return incorrect.count(a.agent_id) > 0;
            });
        }

        // The critic's rationale becomes next-round feedback for survivors.
        if (!verdict.explanation.empty()) {
            for (auto& agent : agents) agent.feedback = verdict.explanation;
        }

        for (const auto& agent : agents) record.active_agent_ids_after.push_back(agent.agent_id);
        const bool down_to_one = agents.size() == 1;
        trace.rounds.push_back(std::move(record));
        if (down_to_one) {
            return finish(agents.front().last_response->answer, round, "single_agent");
        }
    }

    // Round cap reached without a conclusion: largest cluster wins, ties
    // to the lowest agent id.
    const AgentState* winner = &agents.front();
    for (const auto& agent : agents) {
        if (agent.cluster.doc_ids.size() > winner->cluster.doc_ids.size()) {
            winner = &agent;
        }
    }
    return finish(winner->last_response ? winner->last_response->answer : "", cfg.max_rounds,
                  "forced");
}

std::pair<std::string, WinnowTrace> answer_query(const std::string& query,
                                                 const std::vector<RetrievedDocument>& docs,
                                                 const WinnowConfig& cfg, Backends& backends) {
    WinnowTrace trace;
    trace.query = query;
    auto agents = run_stage1(query, docs, cfg, backends, &trace);
    auto super_agents = initialize_super_agents(std::move(agents), query, cfg, backends, &trace);
    const std::string final_answer =
        run_winnowing(std::move(super_agents), query, docs, cfg, backends, trace);
    return {final_answer, std::move(trace)};
}

}  // namespace winnow
