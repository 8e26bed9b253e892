#include "winnow/eval.hpp"

#include <atomic>
#include <cctype>
#include <thread>

namespace winnow {

std::string normalize_answer(const std::string& text) {
    static const std::string punctuation = ".,!?;:'\"()[]";
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (punctuation.find(raw) != std::string::npos) continue;
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

bool accuracy_match(const std::string& final_answer,
                    const std::vector<std::string>& gold_answers) {
    const std::string answer = normalize_answer(final_answer);
    for (const auto& gold : gold_answers) {
        const std::string g = normalize_answer(gold);
        if (!g.empty() && answer.find(g) != std::string::npos) return true;
    }
    return false;
}

bool exact_match(const std::string& final_answer, const std::vector<std::string>& gold_answers) {
    const std::string answer = normalize_answer(final_answer);
    for (const auto& gold : gold_answers) {
        if (answer == normalize_answer(gold)) return true;
    }
    return false;
}

bool recall_at_k(const QAExample& example, int k) {
    const std::size_t limit = std::min<std::size_t>(
        k > 0 ? static_cast<std::size_t>(k) : 0, example.documents.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (accuracy_match(example.documents[i].text, example.gold_answers)) return true;
    }
    return false;
}

EvalReport evaluate(const std::vector<QAExample>& dataset, const WinnowConfig& cfg,
                    Backends& backends, const EvalOptions& opts) {
    EvalReport report;
    report.per_example.resize(dataset.size());
    std::vector<nlohmann::json> traces(dataset.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < dataset.size(); i = next.fetch_add(1)) {
            const QAExample& example = dataset[i];
            ExampleResult& result = report.per_example[i];
            result.question = example.question;
            try {
                auto [answer, trace] = answer_query(example.question, example.documents, cfg, backends);
                result.final_answer = answer;
                result.rounds_used = trace.rounds_used;
                result.correct = opts.metric == Metric::ExactMatch
                                     ? exact_match(answer, example.gold_answers)
                                     : accuracy_match(answer, example.gold_answers);
                if (opts.traces) traces[i] = trace_to_json(trace);
            } catch (const std::exception& e) {
                result.correct = false;
                result.error = e.what();
            }
        }
    };

    const int threads = std::max(1, opts.parallelism);
    if (threads == 1 || dataset.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    std::size_t correct = 0;
    long total_rounds = 0;
    for (const auto& result : report.per_example) {
        if (result.correct) ++correct;
        total_rounds += result.rounds_used;
    }
    const double n = static_cast<double>(dataset.size());
    report.accuracy = dataset.empty() ? 0.0 : static_cast<double>(correct) / n;
    report.mean_rounds_used = dataset.empty() ? 0.0 : static_cast<double>(total_rounds) / n;

    for (int k : opts.recall_ks) {
        std::size_t hits = 0;
        for (const auto& example : dataset) {
            if (recall_at_k(example, k)) ++hits;
        }
        report.recall_at[k] = dataset.empty() ? 0.0 : static_cast<double>(hits) / n;
    }

    if (opts.traces) {
        for (auto& trace : traces) opts.traces->push_back(std::move(trace));
    }
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["accuracy"] = report.accuracy;
    j["mean_rounds_used"] = report.mean_rounds_used;
    nlohmann::json recalls;
    for (const auto& [k, value] : report.recall_at) {
        recalls["recall@" + std::to_string(k)] = value;
    }
    j["recall"] = recalls;
    j["per_example"] = nlohmann::json::array();
    for (const auto& result : report.per_example) {
        nlohmann::json item;
        item["question"] = result.question;
        item["final_answer"] = result.final_answer;
        item["correct"] = result.correct;
        item["rounds_used"] = result.rounds_used;
        if (!result.error.empty()) item["error"] = result.error;
        j["per_example"].push_back(std::move(item));
    }
    return j;
}

}  // namespace winnow
