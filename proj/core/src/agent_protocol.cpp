#include "winnow/agent_protocol.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

namespace winnow {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

// Trims whitespace plus stray markdown emphasis around a parsed field.
std::string trim_field(const std::string& text) {
    std::string t = trim(text);
    auto is_noise = [](char c) { return c == '*' || c == '_'; };
    std::size_t begin = 0;
    std::size_t end = t.size();
    while (begin < end && is_noise(t[begin])) ++begin;
    while (end > begin && is_noise(t[end - 1])) --end;
    return trim(t.substr(begin, end - begin));
}

std::string render_document_list(const std::vector<RetrievedDocument>& docs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out << "Document [" << (i + 1) << "] (Title: " << docs[i].title
            << "): " << docs[i].text << "\n";
    }
    return out.str();
}

struct LabelMatch {
    std::string label;
    std::size_t label_start = 0;    // where the match begins
    std::size_t content_start = 0;  // just past the colon
};

// Finds lenient occurrences of the given labels: case-insensitive, with
// optional brackets or markdown emphasis around the label word(s), at the
// start of the text or after whitespace/decoration.
std::vector<LabelMatch> find_labels(const std::string& raw,
                                    const std::vector<std::string>& labels) {
    std::string alternatives;
    for (const auto& label : labels) {
        if (!alternatives.empty()) alternatives += "|";
        alternatives += label;
    }
    const std::regex pattern("(?:^|[\\s*_\\[(>#-])(" + alternatives +
                                 ")[\\s*_\\])]*\\s*:",
                             std::regex::icase);

    std::vector<LabelMatch> matches;
    auto begin = std::sregex_iterator(raw.begin(), raw.end(), pattern);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        LabelMatch m;
        m.label = (*it)[1].str();
        std::transform(m.label.begin(), m.label.end(), m.label.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        m.label_start = static_cast<std::size_t>(it->position(0));
        m.content_start = static_cast<std::size_t>(it->position(0) + it->length(0));
        matches.push_back(std::move(m));
    }
    return matches;
}

// Content of the first occurrence of `label`, running to the next label
// occurrence of any kind. Returns nullopt when the label is absent.
std::optional<std::string> section_content(const std::string& raw,
                                           const std::vector<LabelMatch>& matches,
                                           const std::string& label) {
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (matches[i].label != label) continue;
        const std::size_t end = (i + 1 < matches.size()) ? matches[i + 1].label_start : raw.size();
        return raw.substr(matches[i].content_start, end - matches[i].content_start);
    }
    return std::nullopt;
}

std::vector<int> extract_integers(const std::string& text) {
    std::vector<int> out;
    const std::regex digits("\\d+");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), digits);
         it != std::sregex_iterator(); ++it) {
        out.push_back(std::stoi(it->str()));
    }
    return out;
}

}  // namespace

std::string render_stage1_prompt(const std::string& query,
                                 const std::vector<RetrievedDocument>& docs) {
    if (docs.empty()) {
        throw InputError("render_stage1_prompt: no documents");
    }
    std::ostringstream out;
    out << "You are given the following documents.\n"
        << render_document_list(docs)
        << "Based on the provided information, answer the following question: " << query
        << ". You are strictly prohibited from generating the answer based on your own "
           "knowledge.\n\n"
        << "Directly output your answer without any additional explanation.\n";
    return out.str();
}

std::string render_stage2_prompt(const std::string& query,
                                 const std::vector<RetrievedDocument>& docs,
                                 const std::optional<std::string>& critic_feedback) {
    if (docs.empty()) {
        throw InputError("render_stage2_prompt: no documents");
    }
    std::ostringstream out;
    out << "You are given the following documents.\n"
        << render_document_list(docs)
        << "Based on the provided information, answer the following question: " << query
        << ". You are strictly prohibited from generating the answer based on your own "
           "knowledge.\n\n"
        << "Your response should consist of three components:\n"
        << "1. Extract a portion of the provided documents that directly supports your answer "
           "to the question. The extracted information should be concise and free from "
           "irrelevant details, serving as the evidence for your answer.\n"
        << "2. Explain how the evidence supports your final answer.\n"
        << "3. Present your final answer.\n\n"
        << "Format your response as follows:\n\n"
        << "Evidence: [YOUR EVIDENCE]\n\n"
        << "Explanation: [YOUR EXPLANATION]\n\n"
        << "Answer: [YOUR FINAL ANSWER]\n";
    if (critic_feedback && !critic_feedback->empty()) {
        out << "\nCritic feedback from previous round:\n" << *critic_feedback << "\n";
    }
    return out.str();
}

std::string render_summary_prompt(const std::string& query,
                                  const std::vector<std::string>& answers) {
    if (answers.empty()) {
        throw InputError("render_summary_prompt: no answers");
    }
    std::ostringstream out;
    out << "You are given the following answers from " << answers.size()
        << " agents to the question: " << query << ".\n";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        out << "Answer [" << (i + 1) << "]: Answer: " << answers[i] << "\n";
    }
    out << "Your task is to summarize the " << answers.size()
        << " answers and remove duplicates.\n\n"
        << "Your response should consist of two components:\n"
        << "1. Deduplicate the provided answers. Exact matching is not required; answers are "
           "considered duplicates if they have the same semantic meaning. Output a list of "
           "unique answers.\n"
        << "2. Explicitly indicate which answers are duplicates, along with their "
           "corresponding indices.\n\n"
        << "Format your response as follows:\n\n"
        << "Unique answers: [LIST OF UNIQUE ANSWERS]\n\n"
        << "Duplicate answers: [LIST OF DUPLICATE ANSWERS]\n";
    return out.str();
}

std::string render_judgement_prompt(const std::string& query,
                                    const std::vector<NumberedResponse>& responses) {
    if (responses.size() < 2) {
        throw InputError("render_judgement_prompt: need at least two responses");
    }
    std::ostringstream out;
    out << "You are provided with the following responses from " << responses.size()
        << " agents to the question: " << query
        << ". Each response contains an answer, supporting evidence from the provided "
           "documents, and an explanation of how the answer was derived.\n";
    for (const auto& item : responses) {
        out << "Response [" << item.agent_id << "]: Answer: " << item.response.answer
            << "; Evidence: " << item.response.evidence
            << "; Explanation: " << item.response.explanation << "\n";
    }
    out << "Based on your knowledge and the provided information, you are tasked with the "
           "following:\n"
        << "1. Identify the misleading responses from the " << responses.size()
        << " that result in incorrect answers.\n"
        << "2. Determine whether a consistent answer can be derived from the remaining "
           "potentially correct responses.\n\n"
        << "Your response should consist of three components:\n"
        << "1. The list of responses with incorrect answers. Output a list of response IDs.\n"
        << "2. Provide an explanation for why these responses are considered incorrect, and "
           "why the remaining responses are considered correct.\n"
        << "3. Indicate yes or no, depending on whether a consistent answer can be derived "
           "from the remaining responses. If yes, also provide the consistent answer.\n\n"
        << "Format your response as follows:\n\n"
        << "Incorrect answers: [LIST OF INCORRECT RESPONSE IDS]\n\n"
        << "Explanation: [YOUR EXPLANATION]\n\n"
        << "Consistent answer: [YOUR ANSWER, IF APPLICABLE]\n";
    return out.str();
}

StructuredResponse parse_structured_response(const std::string& raw) {
    const auto matches = find_labels(raw, {"evidence", "explanation", "answer"});

    StructuredResponse response;
    response.raw = raw;
    const auto answer = section_content(raw, matches, "answer");
    if (!answer) {
        throw ParseError("structured response has no Answer label", raw);
    }
    response.answer = trim_field(*answer);
    if (response.answer.empty()) {
        throw ParseError("structured response has an empty answer", raw);
    }
    if (auto evidence = section_content(raw, matches, "evidence")) {
        response.evidence = trim_field(*evidence);
    }
    if (auto explanation = section_content(raw, matches, "explanation")) {
        response.explanation = trim_field(*explanation);
    }
    return response;
}

std::string to_canonical_text(const StructuredResponse& response) {
    return "Evidence: " + response.evidence + "\nExplanation: " + response.explanation +
           "\nAnswer: " + response.answer;
}

SummaryVerdict parse_summary_verdict(const std::string& raw, int num_agents) {
    if (num_agents < 1) {
        throw InputError("parse_summary_verdict: num_agents must be >= 1");
    }
    const auto matches = find_labels(raw, {"unique answers", "duplicate answers"});
    const auto unique_section = section_content(raw, matches, "unique answers");
    const auto duplicate_section = section_content(raw, matches, "duplicate answers");
    if (!unique_section && !duplicate_section) {
        throw ParseError("summary verdict has neither a unique nor a duplicate section", raw);
    }

    SummaryVerdict verdict;
    verdict.raw = raw;

    if (unique_section) {
        std::string list = trim_field(*unique_section);
        if (!list.empty() && list.front() == '[') {
            const auto close = list.rfind(']');
            list = list.substr(1, close == std::string::npos ? std::string::npos : close - 1);
        }
        // Split on top-level commas only; answers may contain none of the
        // nesting we track, but duplicate tuples sometimes leak in here.
        std::string current;
        int depth = 0;
        for (char c : list) {
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') --depth;
            if (c == ',' && depth == 0) {
                if (!trim_field(current).empty()) verdict.unique_answers.push_back(trim_field(current));
                current.clear();
            } else {
                current += c;
            }
        }
        if (!trim_field(current).empty()) verdict.unique_answers.push_back(trim_field(current));
    }

    // Duplicate groups: bracketed/parenthesized integer tuples, or one
    // bare index list treated as a single group.
    std::vector<std::set<int>> groups;
    if (duplicate_section) {
        const std::string& section = *duplicate_section;
        const std::regex tuple("[\\[(]\\s*\\d+(?:\\s*,\\s*\\d+)*\\s*[\\])]");
        bool found_tuple = false;
        for (auto it = std::sregex_iterator(section.begin(), section.end(), tuple);
             it != std::sregex_iterator(); ++it) {
            // Skip the outer wrapper bracket of a list like [(1,3),(2,4)].
            const std::string body = it->str();
            const auto ids = extract_integers(body);
            if (ids.size() >= 2) {
                groups.emplace_back(ids.begin(), ids.end());
                found_tuple = true;
            }
        }
        if (!found_tuple) {
            const auto ids = extract_integers(section);
            if (ids.size() >= 2) groups.emplace_back(ids.begin(), ids.end());
        }
    }

    // Merge overlapping groups (pair lists like (1,3),(3,5) chain), drop
    // out-of-range indices, and add singletons for unmentioned agents.
    std::vector<int> parent(num_agents + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& group : groups) {
        int anchor = -1;
        for (int id : group) {
            if (id < 1 || id > num_agents) continue;  // dropped with a warning upstream
            if (anchor < 0) {
                anchor = id;
            } else {
                parent[find(id)] = find(anchor);
            }
        }
    }
    std::map<int, std::set<int>> by_root;
    for (int id = 1; id <= num_agents; ++id) by_root[find(id)].insert(id);
    for (auto& [root, members] : by_root) verdict.duplicate_groups.push_back(members);
    std::sort(verdict.duplicate_groups.begin(), verdict.duplicate_groups.end(),
              [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
    return verdict;
}

CriticVerdict parse_critic_verdict(const std::string& raw, const std::set<int>& active_ids) {
    if (active_ids.empty()) {
        throw InputError("parse_critic_verdict: no active agents");
    }
    const auto matches =
        find_labels(raw, {"incorrect answers", "explanation", "consistent answer"});
    const auto incorrect_section = section_content(raw, matches, "incorrect answers");
    const auto explanation_section = section_content(raw, matches, "explanation");
    const auto consistent_section = section_content(raw, matches, "consistent answer");
    if (!incorrect_section && !explanation_section && !consistent_section) {
        throw ParseError("critic verdict has none of the expected sections", raw);
    }

    CriticVerdict verdict;
    verdict.raw = raw;
    if (incorrect_section) {
        for (int id : extract_integers(*incorrect_section)) {
            if (active_ids.count(id)) verdict.incorrect_agent_ids.insert(id);
        }
    }
    if (explanation_section) {
        verdict.explanation = trim_field(*explanation_section);
    }
    if (consistent_section) {
        std::string body = trim_field(*consistent_section);
        if (!body.empty() && body.front() == '[' && body.back() == ']') {
            body = trim(body.substr(1, body.size() - 2));
        }
        const std::regex yes("^\\s*yes\\b[\\s,:;\\-]*", std::regex::icase);
        std::smatch m;
        if (std::regex_search(body, m, yes)) {
            // Concludes only when the affirmation comes with an answer.
            const std::string answer = trim_field(body.substr(m.length(0)));
            if (!answer.empty()) {
                verdict.conclude = true;
                verdict.final_answer = answer;
            }
        }
    }
    return verdict;
}

}  // namespace winnow
