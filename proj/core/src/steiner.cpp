#include "kwsql/steiner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Dreyfus-Wagner over a contracted graph: minimum number of edges, drawn
// from `allowed`, whose union connects every node in `terminals`. Nodes are
// supernode ids in [0, n); edges are (u, v) pairs. Returns kInf when the
// terminals cannot be connected.
int dreyfus_wagner(std::size_t n,
                   const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                   const std::vector<std::size_t>& terminals) {
  if (terminals.size() <= 1) return 0;
  std::size_t t = terminals.size();
  std::size_t full = (std::size_t{1} << t) - 1;
  std::vector<std::vector<int>> dp(full + 1, std::vector<int>(n, kInf));
  for (std::size_t i = 0; i < t; ++i) dp[std::size_t{1} << i][terminals[i]] = 0;

  for (std::size_t mask = 1; mask <= full; ++mask) {
    auto& row = dp[mask];
    // Merge two subtrees rooted at the same node.
    for (std::size_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask) {
      std::size_t rest = mask ^ sub;
      if (sub > rest) continue;
      const auto& a = dp[sub];
      const auto& b = dp[rest];
      for (std::size_t v = 0; v < n; ++v) {
        if (a[v] < kInf && b[v] < kInf) row[v] = std::min(row[v], a[v] + b[v]);
      }
    }
    // Grow along edges until a fixed point (unit weights, small graphs).
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [u, v] : edges) {
        if (row[u] < kInf && row[u] + 1 < row[v]) {
          row[v] = row[u] + 1;
          changed = true;
        }
        if (row[v] < kInf && row[v] + 1 < row[u]) {
          row[u] = row[v] + 1;
          changed = true;
        }
      }
    }
  }
  int best = kInf;
  for (std::size_t v = 0; v < n; ++v) best = std::min(best, dp[full][v]);
  return best;
}

struct Candidate {
  std::size_t edge_id;
  std::string key;
};

} // namespace

SteinerTree steiner_tree(const ReferentialGraph& graph,
                         const std::vector<std::string>& terminals) {
  if (terminals.empty()) throw Error("validation", "no terminal tables given");

  // Resolve and dedupe terminals (case-insensitive, keep first occurrence).
  std::vector<std::size_t> term_nodes;
  for (const auto& t : terminals) {
    std::size_t idx = graph.node_index(t); // throws on unknown terminal
    if (std::find(term_nodes.begin(), term_nodes.end(), idx) == term_nodes.end())
      term_nodes.push_back(idx);
  }

  SteinerTree tree;
  if (term_nodes.size() == 1) {
    tree.nodes.insert(graph.nodes()[term_nodes[0]]);
    return tree;
  }

  // All terminals must share one component.
  {
    auto comp = graph.connected_component(graph.nodes()[term_nodes[0]]);
    std::vector<std::string> outside;
    for (std::size_t idx : term_nodes)
      if (!comp.count(graph.nodes()[idx])) outside.push_back(graph.nodes()[idx]);
    if (!outside.empty()) {
      std::string msg = "terminals span disconnected components; a Steiner "
                        "forest would be required: ";
      std::set<std::set<std::string>> comps;
      for (std::size_t idx : term_nodes)
        comps.insert(graph.connected_component(graph.nodes()[idx]));
      bool first_comp = true;
      for (const auto& c : comps) {
        if (!first_comp) msg += " | ";
        first_comp = false;
        msg += "[";
        bool first = true;
        for (const auto& name : c) {
          if (!first) msg += ", ";
          first = false;
          msg += name;
        }
        msg += "]";
      }
      throw Error("validation", msg);
    }
  }

  // Candidate edges ascending by identity key.
  std::vector<Candidate> order;
  for (std::size_t e = 0; e < graph.edges().size(); ++e)
    order.push_back({e, graph.edge_sort_key(e)});
  std::sort(order.begin(), order.end(),
            [](const Candidate& a, const Candidate& b) { return a.key < b.key; });

  std::size_t n = graph.nodes().size();

  // Feasibility of completing `forced` with `budget` edges drawn from the
  // candidates after position `from`: contract the forced edges, treat each
  // contracted supernode as an extra terminal, and ask Dreyfus-Wagner for
  // the minimum completion size.
  auto feasible = [&](const std::vector<std::size_t>& forced, std::size_t from,
                      int budget) {
    UnionFind uf(n);
    for (std::size_t e : forced)
      uf.merge(graph.edge_endpoint_a(e), graph.edge_endpoint_b(e));
    std::vector<std::size_t> terms;
    auto add_term = [&](std::size_t node) {
      std::size_t root = uf.find(node);
      if (std::find(terms.begin(), terms.end(), root) == terms.end())
        terms.push_back(root);
    };
    for (std::size_t idx : term_nodes) add_term(idx);
    for (std::size_t e : forced) add_term(graph.edge_endpoint_a(e));
    std::vector<std::pair<std::size_t, std::size_t>> allowed;
    for (std::size_t i = from; i < order.size(); ++i) {
      std::size_t e = order[i].edge_id;
      std::size_t u = uf.find(graph.edge_endpoint_a(e));
      std::size_t v = uf.find(graph.edge_endpoint_b(e));
      if (u != v) allowed.emplace_back(u, v);
    }
    return dreyfus_wagner(n, allowed, terms) <= budget;
  };

  int minimum = 0;
  {
    std::vector<std::pair<std::size_t, std::size_t>> all_edges;
    for (std::size_t e = 0; e < graph.edges().size(); ++e)
      all_edges.emplace_back(graph.edge_endpoint_a(e), graph.edge_endpoint_b(e));
    minimum = dreyfus_wagner(n, all_edges, term_nodes);
  }

  // Lexicographic commit: at each position take the smallest edge that still
  // allows finishing within the minimum.
  std::vector<std::size_t> picked;
  std::size_t scan = 0;
  while (static_cast<int>(picked.size()) < minimum) {
    bool advanced = false;
    for (std::size_t i = scan; i < order.size(); ++i) {
      picked.push_back(order[i].edge_id);
      int budget = minimum - static_cast<int>(picked.size());
      if (feasible(picked, i + 1, budget)) {
        scan = i + 1;
        advanced = true;
        break;
      }
      picked.pop_back();
    }
    if (!advanced)
      throw Error("internal", "steiner reconstruction failed"); // unreachable
  }

  tree.edges = picked;
  for (std::size_t e : picked) {
    tree.nodes.insert(graph.nodes()[graph.edge_endpoint_a(e)]);
    tree.nodes.insert(graph.nodes()[graph.edge_endpoint_b(e)]);
  }
  for (std::size_t idx : term_nodes) tree.nodes.insert(graph.nodes()[idx]);
  return tree;
}

} // namespace kwsql
