// winnowrag: two-stage multi-agent RAG pipeline over pre-retrieved documents.
//
// Subcommands:
//   answer  — run the pipeline for one question against a documents file
//   eval    — run the pipeline over a JSONL dataset and report metrics
//   recall  — compute recall@k for a dataset without any LLM calls

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "winnow/dataset.hpp"
#include "winnow/eval.hpp"
#include "winnow/net.hpp"
#include "winnow/orchestrator.hpp"

namespace {

struct RunConfig {
    winnow::WinnowConfig winnow;
    std::string backend = "http";  // http | scripted
    std::string script_path;
    std::string base_url = "http://localhost:8000/v1";
    std::string model = "llama-3-8b-instruct";
    std::string critic_model;  // defaults to the agent model
    std::string api_key_env = "OPENAI_API_KEY";
    std::string embed_base_url;  // empty: deterministic hash embedder
    std::string embed_model;
    int embed_dim = 8;
    std::string metric = "accuracy";  // accuracy | em
    int parallelism = 4;
    std::string output_path;
    std::string trace_path;
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--k", cfg.winnow.k, "Number of clusters (agents)")->check(CLI::PositiveNumber);
    cmd->add_option("--max-rounds", cfg.winnow.max_rounds, "Maximum winnowing rounds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--num-docs", cfg.winnow.num_docs, "Top-N retrieved documents per query")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.winnow.seed, "Clustering RNG seed");
    cmd->add_option("--temperature", cfg.winnow.temperature, "Sampling temperature");
    cmd->add_option("--max-tokens", cfg.winnow.max_tokens, "Response token cap");
    cmd->add_flag("--debug-trace", cfg.winnow.debug_trace,
                  "Include all prompts and raw responses in traces");
    cmd->add_flag("!--no-trust-precomputed", cfg.winnow.trust_precomputed_embeddings,
                  "Re-embed documents even when the file carries embeddings");
    cmd->add_option("--backend", cfg.backend, "Chat backend")
        ->check(CLI::IsMember({"http", "scripted"}));
    cmd->add_option("--script", cfg.script_path, "Script file for the scripted backend");
    cmd->add_option("--base-url", cfg.base_url, "Chat completions base URL");
    cmd->add_option("--model", cfg.model, "Model name for agents (and critic by default)");
    cmd->add_option("--critic-model", cfg.critic_model, "Override the critic model");
    cmd->add_option("--api-key-env", cfg.api_key_env,
                    "Environment variable holding the API key");
    cmd->add_option("--embed-base-url", cfg.embed_base_url,
                    "Embedding endpoint base URL (default: offline hash embedder)");
    cmd->add_option("--embed-model", cfg.embed_model, "Embedding model name");
    cmd->add_option("--embed-dim", cfg.embed_dim, "Hash embedder dimension");
    cmd->add_option("--metric", cfg.metric, "Correctness metric")
        ->check(CLI::IsMember({"accuracy", "em"}));
    cmd->add_option("--parallelism", cfg.parallelism, "Concurrent examples in eval")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--output", cfg.output_path, "Write the report/answer JSON here");
    cmd->add_option("--trace", cfg.trace_path, "Write trace JSONL here");
}

struct BackendSet {
    std::unique_ptr<winnow::Embedder> embedder;
    std::unique_ptr<winnow::ChatBackend> agent;
    std::unique_ptr<winnow::ChatBackend> critic;
};

BackendSet build_backends(RunConfig& cfg) {
    BackendSet set;
    if (!cfg.embed_base_url.empty()) {
        winnow::HttpEmbedder::Config embed_cfg;
        embed_cfg.base_url = cfg.embed_base_url;
        embed_cfg.model = cfg.embed_model;
        if (const char* key = std::getenv(cfg.api_key_env.c_str())) embed_cfg.api_key = key;
        set.embedder = std::make_unique<winnow::HttpEmbedder>(embed_cfg);
    } else {
        set.embedder = std::make_unique<winnow::HashEmbedder>(cfg.embed_dim);
    }

    cfg.winnow.agent_model = cfg.model;
    cfg.winnow.critic_model = cfg.critic_model.empty() ? cfg.model : cfg.critic_model;

    if (cfg.backend == "scripted") {
        if (cfg.script_path.empty()) {
            throw winnow::ConfigError("--backend scripted requires --script");
        }
        set.agent =
            std::make_unique<winnow::ScriptedBackend>(winnow::ScriptedBackend::from_file(cfg.script_path));
    } else {
        winnow::HttpChatBackend::Config chat_cfg;
        chat_cfg.base_url = cfg.base_url;
        chat_cfg.model = cfg.model;
        if (const char* key = std::getenv(cfg.api_key_env.c_str())) chat_cfg.api_key = key;
        set.agent = std::make_unique<winnow::HttpChatBackend>(chat_cfg);
    }
    return set;
}

void write_or_print(const std::string& path, const nlohmann::json& payload) {
    if (path.empty()) {
        std::cout << payload.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw winnow::InputError("cannot write output file: " + path);
    out << payload.dump(2) << "\n";
}

int cmd_answer(RunConfig& cfg, const std::string& question, const std::string& docs_path) {
    auto docs = winnow::load_documents(docs_path, cfg.winnow.num_docs);
    if (docs.empty()) {
        throw winnow::InputError("documents file is empty: " + docs_path);
    }
    auto backends = build_backends(cfg);
    winnow::Backends b(*backends.embedder, *backends.agent);
    auto [answer, trace] = winnow::answer_query(question, docs, cfg.winnow, b);

    std::cout << answer << "\n";
    if (!cfg.trace_path.empty()) {
        std::ofstream out(cfg.trace_path);
        if (!out) throw winnow::InputError("cannot write trace file: " + cfg.trace_path);
        out << winnow::trace_to_json(trace).dump() << "\n";
    }
    if (!cfg.output_path.empty()) {
        write_or_print(cfg.output_path,
                       {{"question", question}, {"final_answer", answer},
                        {"rounds_used", trace.rounds_used}});
    }
    return 0;
}

int cmd_eval(RunConfig& cfg, const std::string& dataset_path) {
    auto dataset = winnow::load_dataset(dataset_path, cfg.winnow.num_docs);
    if (dataset.empty()) {
        throw winnow::InputError("dataset is empty: " + dataset_path);
    }
    auto backends = build_backends(cfg);
    winnow::Backends b(*backends.embedder, *backends.agent);

    winnow::EvalOptions opts;
    opts.metric = cfg.metric == "em" ? winnow::Metric::ExactMatch : winnow::Metric::Accuracy;
    opts.parallelism = cfg.parallelism;
    std::vector<nlohmann::json> traces;
    if (!cfg.trace_path.empty()) opts.traces = &traces;

    const auto report = winnow::evaluate(dataset, cfg.winnow, b, opts);

    std::cout << "examples:      " << report.per_example.size() << "\n"
              << (cfg.metric == "em" ? "exact match:   " : "accuracy:      ")
              << report.accuracy << "\n";
    for (const auto& [k, value] : report.recall_at) {
        std::cout << "recall@" << k << ":     " << value << "\n";
    }
    std::cout << "mean rounds:   " << report.mean_rounds_used << "\n";

    if (!cfg.output_path.empty()) write_or_print(cfg.output_path, winnow::report_to_json(report));
    if (!cfg.trace_path.empty()) {
        std::ofstream out(cfg.trace_path);
        if (!out) throw winnow::InputError("cannot write trace file: " + cfg.trace_path);
        for (const auto& trace : traces) out << trace.dump() << "\n";
    }
    return 0;
}

int cmd_recall(RunConfig& cfg, const std::string& dataset_path) {
    auto dataset = winnow::load_dataset(dataset_path, cfg.winnow.num_docs);
    if (dataset.empty()) {
        throw winnow::InputError("dataset is empty: " + dataset_path);
    }
    nlohmann::json result;
    for (int k : {5, 20}) {
        std::size_t hits = 0;
        for (const auto& example : dataset) {
            if (static_cast<std::size_t>(k) > example.documents.size()) {
                std::cerr << "warning: k=" << k << " exceeds document count "
                          << example.documents.size() << "; evaluating over available docs\n";
            }
            if (winnow::recall_at_k(example, k)) ++hits;
        }
        const double recall = static_cast<double>(hits) / static_cast<double>(dataset.size());
        result["recall@" + std::to_string(k)] = recall;
        std::cout << "recall@" << k << ": " << recall << "\n";
    }
    if (!cfg.output_path.empty()) write_or_print(cfg.output_path, result);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* forbid = std::getenv("WINNOW_FORBID_NETWORK");
        forbid && std::string(forbid) == "1") {
        winnow::net::forbid_network(true);
    }

    CLI::App app{"WinnowRAG: query-aware clustering + multi-agent winnowing over retrieved documents"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file (INI format)");

    RunConfig cfg;

    std::string question;
    std::string docs_path;
    auto* answer = app.add_subcommand("answer", "Answer one question from a documents file");
    answer->add_option("--question", question, "The question to answer")->required();
    answer->add_option("--docs", docs_path, "JSONL file of retrieved documents")->required();
    add_common_flags(answer, cfg);

    std::string dataset_path;
    auto* eval = app.add_subcommand("eval", "Evaluate the pipeline over a JSONL dataset");
    eval->add_option("--dataset", dataset_path, "JSONL dataset file")->required();
    add_common_flags(eval, cfg);

    std::string recall_dataset;
    auto* recall = app.add_subcommand("recall", "Compute recall@{5,20} for a dataset (offline)");
    recall->add_option("--dataset", recall_dataset, "JSONL dataset file")->required();
    recall->add_option("--num-docs", cfg.winnow.num_docs, "Top-N documents per query");
    recall->add_option("--output", cfg.output_path, "Write the recall JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(answer)) return cmd_answer(cfg, question, docs_path);
        if (app.got_subcommand(eval)) return cmd_eval(cfg, dataset_path);
        if (app.got_subcommand(recall)) return cmd_recall(cfg, recall_dataset);
    } catch (const winnow::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const winnow::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
