#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "winnow/dataset.hpp"
#include "winnow/orchestrator.hpp"

namespace winnow {

enum class Metric { Accuracy, ExactMatch };

struct ExampleResult {
    std::string question;
    std::string final_answer;
    bool correct = false;
    int rounds_used = 0;
    std::string error;  // nonempty when the example failed
};

struct EvalReport {
    std::vector<ExampleResult> per_example;
    double accuracy = 0.0;
    std::map<int, double> recall_at;
    double mean_rounds_used = 0.0;
};

// Lowercase, strip the punctuation set .,!?;:'"()[], collapse whitespace.
std::string normalize_answer(const std::string& text);

// True iff any gold answer is a normalized substring of the final answer.
bool accuracy_match(const std::string& final_answer,
                    const std::vector<std::string>& gold_answers);

// True iff the normalized final answer equals any normalized gold answer.
bool exact_match(const std::string& final_answer,
                 const std::vector<std::string>& gold_answers);

// True iff any gold answer appears in any of the top-k document texts.
// When k exceeds the document count, all documents are considered.
bool recall_at_k(const QAExample& example, int k);

struct EvalOptions {
    Metric metric = Metric::Accuracy;
    int parallelism = 4;
    std::vector<int> recall_ks = {5, 20};
    // When set, one trace JSON object per example is appended here.
    std::vector<nlohmann::json>* traces = nullptr;
};

// Runs the full pipeline on every example with bounded concurrency and
// aggregates the metrics. Per-example failures are recorded as incorrect;
// a report is always produced.
EvalReport evaluate(const std::vector<QAExample>& dataset, const WinnowConfig& cfg,
                    Backends& backends, const EvalOptions& opts = {});

nlohmann::json report_to_json(const EvalReport& report);

}  // namespace winnow
