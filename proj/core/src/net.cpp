#include "winnow/net.hpp"

#include <atomic>

#include "winnow/types.hpp"

namespace winnow::net {

namespace {
std::atomic<bool> g_forbid{false};
}

void forbid_network(bool forbid) { g_forbid.store(forbid); }

bool network_forbidden() { return g_forbid.load(); }

void check_network_allowed() {
    if (g_forbid.load()) {
        throw BackendError("network I/O is forbidden in this run");
    }
}

}  // namespace winnow::net
