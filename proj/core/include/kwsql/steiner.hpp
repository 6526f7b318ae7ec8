#pragma once

#include <set>
#include <string>
#include <vector>

#include "kwsql/graph.hpp"

namespace kwsql {

struct SteinerTree {
  std::set<std::string> nodes;
  std::vector<std::size_t> edges; // graph edge ids, ascending sort key
};

// Minimum-edge tree spanning all terminals. Among all minima, returns the
// lexicographically smallest edge set under the (table_a, table_b,
// fk-ordinal) edge ordering. Terminals in different components raise an
// Error listing the components; a singleton terminal yields a zero-edge
// tree.
SteinerTree steiner_tree(const ReferentialGraph& graph,
                         const std::vector<std::string>& terminals);

} // namespace kwsql
