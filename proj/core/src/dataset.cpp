#include "winnow/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace winnow {

namespace {

RetrievedDocument parse_document(const nlohmann::json& ctx, int line_number, int rank) {
    if (!ctx.contains("text")) {
        throw InputError("line " + std::to_string(line_number) + ": document missing \"text\"");
    }
    RetrievedDocument doc;
    doc.rank = rank;
    doc.id = ctx.contains("id") && ctx["id"].is_string() ? ctx["id"].get<std::string>()
                                                         : "d" + std::to_string(rank);
    doc.title = ctx.value("title", std::string{});
    doc.text = ctx["text"].get<std::string>();
    if (ctx.contains("embedding") && !ctx["embedding"].is_null()) {
        doc.embedding = ctx["embedding"].get<Embedding>();
    }
    return doc;
}

nlohmann::json parse_line(const std::string& line, int line_number) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("line " + std::to_string(line_number) + ": malformed JSON: " + e.what());
    }
}

}  // namespace

std::vector<QAExample> load_dataset(const std::string& path, int num_docs) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset file: " + path);
    }

    std::vector<QAExample> examples;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json obj = parse_line(line, line_number);

        for (const char* field : {"question", "answers", "ctxs"}) {
            if (!obj.contains(field)) {
                throw InputError("line " + std::to_string(line_number) + ": missing \"" +
                                 field + "\"");
            }
        }

        QAExample example;
        example.question = obj["question"].get<std::string>();
        for (const auto& answer : obj["answers"]) {
            example.gold_answers.push_back(answer.get<std::string>());
        }
        if (example.gold_answers.empty()) {
            throw InputError("line " + std::to_string(line_number) + ": empty \"answers\"");
        }

        int rank = 0;
        for (const auto& ctx : obj["ctxs"]) {
            if (num_docs > 0 && rank >= num_docs) break;
            ++rank;
            example.documents.push_back(parse_document(ctx, line_number, rank));
        }
        if (example.documents.empty()) {
            throw InputError("line " + std::to_string(line_number) + ": empty \"ctxs\"");
        }
        examples.push_back(std::move(example));
    }
    return examples;
}

std::vector<RetrievedDocument> load_documents(const std::string& path, int num_docs) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open documents file: " + path);
    }
    std::vector<RetrievedDocument> docs;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (num_docs > 0 && static_cast<int>(docs.size()) >= num_docs) break;
        docs.push_back(parse_document(parse_line(line, line_number), line_number,
                                      static_cast<int>(docs.size()) + 1));
    }
    return docs;
}

}  // namespace winnow
