#pragma once

#include <string>
#include <vector>

#include "winnow/types.hpp"

namespace winnow {

// One QA example with its ranked pre-retrieved documents.
struct QAExample {
    std::string question;
    std::vector<std::string> gold_answers;
    std::vector<RetrievedDocument> documents;
};

// Loads a JSONL dataset; each line is {"question", "answers",
// "ctxs": [{"title", "text", "embedding"?}]}. Documents keep file order as
// rank order and are truncated to num_docs. Errors name the line number.
std::vector<QAExample> load_dataset(const std::string& path, int num_docs = 50);

// Loads a JSONL file of bare document objects {"title", "text",
// "embedding"?} for single-question runs.
std::vector<RetrievedDocument> load_documents(const std::string& path, int num_docs = 50);

}  // namespace winnow
