#pragma once

#include <optional>
#include <string>

#include "winnow/agent_protocol.hpp"
#include "winnow/merge_geometry.hpp"

namespace winnow {

// One LLM agent (or super-agent) with its document cluster and the last
// structured response it produced.
struct AgentState {
    int agent_id = 0;
    DocumentCluster cluster;
    std::optional<StructuredResponse> last_response;
    std::optional<std::string> feedback;
};

}  // namespace winnow
