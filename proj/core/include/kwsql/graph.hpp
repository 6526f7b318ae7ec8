#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "kwsql/schema.hpp"

namespace kwsql {

// One edge per foreign key; two FKs over the same table pair stay distinct.
struct GraphEdge {
  std::string table_a;   // FK from_table
  std::string table_b;   // FK to_table
  std::size_t fk_index;  // position in RelationalSchema::foreign_keys
};

class ReferentialGraph {
public:
  static ReferentialGraph build(const RelationalSchema& schema);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }

  std::size_t node_index(const std::string& table) const; // throws on unknown
  bool has_node(const std::string& table) const;

  // Edge ids incident to a node, ascending.
  const std::vector<std::size_t>& incident(std::size_t node) const;

  std::size_t edge_endpoint_a(std::size_t edge) const; // node index of table_a
  std::size_t edge_endpoint_b(std::size_t edge) const;
  std::size_t edge_other_end(std::size_t edge, std::size_t node) const;

  // Sort key pinning edge identity: (table_a, table_b, fk ordinal), names
  // compared case-folded.
  std::string edge_sort_key(std::size_t edge) const;

  std::set<std::string> connected_component(const std::string& table) const;
  std::vector<std::set<std::string>> components() const;

private:
  std::vector<std::string> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::size_t> endpoint_a_;
  std::vector<std::size_t> endpoint_b_;
  std::vector<std::vector<std::size_t>> incident_;
};

} // namespace kwsql
