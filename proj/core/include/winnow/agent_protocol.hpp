#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "winnow/types.hpp"

namespace winnow {

// Parsed (evidence, explanation, answer) triple from an agent response.
struct StructuredResponse {
    std::string evidence;
    std::string explanation;
    std::string answer;
    std::string raw;
};

// Parsed critic summary: unique answers plus duplicate index groups.
// The groups always partition {1..num_agents}.
struct SummaryVerdict {
    std::vector<std::string> unique_answers;
    std::vector<std::set<int>> duplicate_groups;
    std::string raw;
};

// Parsed critic judgement for one winnowing round.
struct CriticVerdict {
    std::set<int> incorrect_agent_ids;
    std::string explanation;
    bool conclude = false;
    std::optional<std::string> final_answer;
    std::string raw;
};

// A numbered (agent id, response) pair shown to the critic.
struct NumberedResponse {
    int agent_id = 0;
    StructuredResponse response;
};

// --- Prompt rendering -----------------------------------------------------

// Direct-answer prompt for the first round of agent answers.
std::string render_stage1_prompt(const std::string& query,
                                 const std::vector<RetrievedDocument>& docs);

// Evidence/explanation/answer prompt for super-agents; appends critic
// feedback from the previous round when present.
std::string render_stage2_prompt(const std::string& query,
                                 const std::vector<RetrievedDocument>& docs,
                                 const std::optional<std::string>& critic_feedback = std::nullopt);

// Critic prompt that deduplicates the numbered agent answers.
std::string render_summary_prompt(const std::string& query,
                                  const std::vector<std::string>& answers);

// Critic prompt that judges the numbered structured responses.
std::string render_judgement_prompt(const std::string& query,
                                    const std::vector<NumberedResponse>& responses);

// --- Parsing --------------------------------------------------------------

// Parses "Evidence: ... Explanation: ... Answer: ..." with lenient label
// matching (case-insensitive; brackets and markdown emphasis around labels
// are tolerated). Throws ParseError when no Answer label is found.
StructuredResponse parse_structured_response(const std::string& raw);

// Canonical text form; reparsing it yields the same fields (for label-free
// field contents).
std::string to_canonical_text(const StructuredResponse& response);

// Parses the critic summary. Accepts duplicate lists as pairs or groups;
// unmentioned agents become singletons; out-of-range indices are dropped.
SummaryVerdict parse_summary_verdict(const std::string& raw, int num_agents);

// Parses the critic judgement. conclude is true only when the consistent
// answer section affirms with an actual answer; incorrect ids are filtered
// to active_ids.
CriticVerdict parse_critic_verdict(const std::string& raw, const std::set<int>& active_ids);

}  // namespace winnow
