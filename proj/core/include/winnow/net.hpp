#pragma once

namespace winnow::net {

// Process-wide network kill switch. When forbidden, every HTTP backend
// throws BackendError before opening a connection. Used by offline runs
// and the offline-guarantee tests.
void forbid_network(bool forbid);
bool network_forbidden();

// Throws BackendError when the network is forbidden.
void check_network_allowed();

}  // namespace winnow::net
