#pragma once

#include "gamesmith/store/lineage_store.hpp"

#include <map>
#include <string>

namespace gamesmith::cli {

// Self-contained static HTML view of one lineage: version graph, per-node
// reward bars, gates, and the mechanic delta along each edge. No network
// fetches. Throws Error(empty_lineage) when the lineage has no nodes.
std::string render_report(const store::LineageTree& tree,
                          const std::map<std::string, store::LineageNode>& nodes);

} // namespace gamesmith::cli
