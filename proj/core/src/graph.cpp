#include "kwsql/graph.hpp"

#include <cstdio>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

ReferentialGraph ReferentialGraph::build(const RelationalSchema& schema) {
  ReferentialGraph g;
  for (const auto& t : schema.tables) g.nodes_.push_back(t.name);
  g.incident_.resize(g.nodes_.size());
  for (std::size_t i = 0; i < schema.foreign_keys.size(); ++i) {
    const ForeignKey& fk = schema.foreign_keys[i];
    GraphEdge e{fk.from_table, fk.to_table, i};
    std::size_t a = g.node_index(fk.from_table);
    std::size_t b = g.node_index(fk.to_table);
    std::size_t id = g.edges_.size();
    g.edges_.push_back(std::move(e));
    g.endpoint_a_.push_back(a);
    g.endpoint_b_.push_back(b);
    g.incident_[a].push_back(id);
    if (b != a) g.incident_[b].push_back(id);
  }
  return g;
}

std::size_t ReferentialGraph::node_index(const std::string& table) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (ci_equal(nodes_[i], table)) return i;
  throw Error("validation", "unknown table '" + table + "'");
}

bool ReferentialGraph::has_node(const std::string& table) const {
  for (const auto& n : nodes_)
    if (ci_equal(n, table)) return true;
  return false;
}

const std::vector<std::size_t>& ReferentialGraph::incident(std::size_t node) const {
  return incident_.at(node);
}

std::size_t ReferentialGraph::edge_endpoint_a(std::size_t edge) const {
  return endpoint_a_.at(edge);
}

std::size_t ReferentialGraph::edge_endpoint_b(std::size_t edge) const {
  return endpoint_b_.at(edge);
}

std::size_t ReferentialGraph::edge_other_end(std::size_t edge,
                                             std::size_t node) const {
  std::size_t a = endpoint_a_.at(edge), b = endpoint_b_.at(edge);
  return node == a ? b : a;
}

std::string ReferentialGraph::edge_sort_key(std::size_t edge) const {
  const GraphEdge& e = edges_.at(edge);
  char ord[16];
  std::snprintf(ord, sizeof(ord), "%06zu", e.fk_index);
  return to_lower(e.table_a) + "|" + to_lower(e.table_b) + "|" + ord;
}

std::set<std::string> ReferentialGraph::connected_component(
    const std::string& table) const {
  std::size_t start = node_index(table);
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  std::set<std::string> out;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    out.insert(nodes_[v]);
    for (std::size_t e : incident_[v]) {
      std::size_t u = edge_other_end(e, v);
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return out;
}

std::vector<std::set<std::string>> ReferentialGraph::components() const {
  std::vector<std::set<std::string>> out;
  std::set<std::string> assigned;
  for (const auto& n : nodes_) {
    if (assigned.count(to_lower(n))) continue;
    auto comp = connected_component(n);
    for (const auto& m : comp) assigned.insert(to_lower(m));
    out.push_back(std::move(comp));
  }
  return out;
}

} // namespace kwsql
