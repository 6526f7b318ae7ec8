#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "kwsql/error.hpp"
#include "kwsql/graph.hpp"
#include "kwsql/random.hpp"
#include "kwsql/steiner.hpp"
#include "steiner_oracle.hpp"

using namespace kwsql;
using testutil::brute_force_steiner;
using testutil::graph_schema;
using testutil::random_connected_case;
using RandomCase = testutil::RandomGraphCase;

TEST_CASE("referential graph of the fixture has 4 nodes and 4 edges") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  CHECK(g.nodes().size() == 4);
  CHECK(g.edges().size() == 4);
}

TEST_CASE("single table with no foreign keys") {
  RelationalSchema s = graph_schema(1, {});
  ReferentialGraph g = ReferentialGraph::build(s);
  CHECK(g.nodes().size() == 1);
  CHECK(g.edges().size() == 0);
  CHECK(g.connected_component("T0") == std::set<std::string>{"T0"});
}

TEST_CASE("two foreign keys between one table pair stay distinct edges") {
  RelationalSchema s = graph_schema(2, {{0, 1}, {0, 1}});
  ReferentialGraph g = ReferentialGraph::build(s);
  CHECK(g.edges().size() == 2);
  CHECK(g.edges()[0].fk_index != g.edges()[1].fk_index);

  // The minimum tree picks exactly one of the parallel edges, the one with
  // the smaller fk ordinal.
  SteinerTree tree = steiner_tree(g, {"T0", "T1"});
  REQUIRE(tree.edges.size() == 1);
  CHECK(g.edges()[tree.edges[0]].fk_index == 0);
}

TEST_CASE("edge count equals foreign key count on every schema") {
  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    RandomCase c = random_connected_case(rng);
    RelationalSchema s = graph_schema(c.nodes, c.edges);
    ReferentialGraph g = ReferentialGraph::build(s);
    CHECK(g.edges().size() == s.foreign_keys.size());
    CHECK(g.nodes().size() == s.tables.size());
  }
}

TEST_CASE("connected_component reaches the whole fixture graph") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  for (const auto& t : g.nodes())
    CHECK(g.connected_component(t).size() == 4);
}

TEST_CASE("connected_component on a 2+3 split graph") {
  // Components {0,1} and {2,3,4}.
  RelationalSchema s = graph_schema(5, {{0, 1}, {2, 3}, {3, 4}});
  ReferentialGraph g = ReferentialGraph::build(s);
  CHECK(g.connected_component("T0") == std::set<std::string>{"T0", "T1"});
  CHECK(g.connected_component("T4") ==
        std::set<std::string>{"T2", "T3", "T4"});
  CHECK(g.components().size() == 2);
}

TEST_CASE("connected_component rejects an unknown table") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  CHECK_THROWS_AS(g.connected_component("Nope"), Error);
}

TEST_CASE("components partition the node set") {
  Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    RandomCase c = random_connected_case(rng);
    // Drop a random edge so some graphs split.
    if (!c.edges.empty() && rng.next_below(2) == 0)
      c.edges.erase(c.edges.begin() +
                    static_cast<long>(rng.next_below(c.edges.size())));
    RelationalSchema s = graph_schema(c.nodes, c.edges);
    ReferentialGraph g = ReferentialGraph::build(s);
    for (const auto& a : g.nodes()) {
      for (const auto& b : g.nodes()) {
        auto ca = g.connected_component(a);
        auto cb = g.connected_component(b);
        if (ca.count(b))
          CHECK(ca == cb);
        else
          for (const auto& x : ca) CHECK(!cb.count(x));
      }
    }
  }
}

TEST_CASE("fixture Steiner tree for the three-table view") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  SteinerTree tree = steiner_tree(
      g, {"Maintenance_request", "Maintenance_recommendation",
          "Maintenance_order"});
  CHECK(tree.edges.size() == 2);
  CHECK(tree.nodes == std::set<std::string>{"Maintenance_request",
                                            "Maintenance_recommendation",
                                            "Maintenance_order"});
  // The chosen edges are the note and order foreign keys, not the detour
  // through Installation.
  std::set<std::size_t> fks;
  for (std::size_t e : tree.edges) fks.insert(g.edges()[e].fk_index);
  CHECK(fks == std::set<std::size_t>{2, 3});
}

TEST_CASE("singleton terminal yields a zero-edge tree") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  SteinerTree tree = steiner_tree(g, {"Installation"});
  CHECK(tree.edges.empty());
  CHECK(tree.nodes == std::set<std::string>{"Installation"});
}

TEST_CASE("steiner_tree rejects unknown terminals") {
  ReferentialGraph g = ReferentialGraph::build(testutil::fixture_schema());
  CHECK_THROWS_AS(steiner_tree(g, {"Installation", "Nope"}), Error);
}

TEST_CASE("disconnected terminals raise an error listing the components") {
  RelationalSchema s = graph_schema(4, {{0, 1}, {2, 3}});
  ReferentialGraph g = ReferentialGraph::build(s);
  try {
    steiner_tree(g, {"T0", "T3"});
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("Steiner forest") != std::string::npos);
    CHECK(msg.find("T0") != std::string::npos);
    CHECK(msg.find("T3") != std::string::npos);
  }
}

TEST_CASE("steiner_tree matches the brute-force oracle on random graphs") {
  Rng rng(424242);
  for (int i = 0; i < 120; ++i) {
    RandomCase c = random_connected_case(rng);
    RelationalSchema s = graph_schema(c.nodes, c.edges);
    ReferentialGraph g = ReferentialGraph::build(s);
    std::vector<std::string> terminals;
    for (int t : c.terminals) terminals.push_back("T" + std::to_string(t));

    SteinerTree tree = steiner_tree(g, terminals);
    int oracle = brute_force_steiner(c.nodes, c.edges, c.terminals);
    REQUIRE(oracle >= 0);
    CHECK(static_cast<int>(tree.edges.size()) == oracle);

    // Tree invariants: |edges| = |nodes| - 1, terminals covered, and every
    // leaf is a terminal.
    CHECK(tree.edges.size() + 1 == tree.nodes.size());
    for (const auto& t : terminals) CHECK(tree.nodes.count(t));
    std::map<std::string, int> degree;
    for (std::size_t e : tree.edges) {
      ++degree[g.nodes()[g.edge_endpoint_a(e)]];
      ++degree[g.nodes()[g.edge_endpoint_b(e)]];
    }
    for (const auto& [node, d] : degree) {
      if (d == 1)
        CHECK(std::find(terminals.begin(), terminals.end(), node) !=
              terminals.end());
    }
  }
}

TEST_CASE("steiner_tree is deterministic and terminal-order independent") {
  Rng rng(99);
  for (int i = 0; i < 40; ++i) {
    RandomCase c = random_connected_case(rng);
    RelationalSchema s = graph_schema(c.nodes, c.edges);
    ReferentialGraph g = ReferentialGraph::build(s);
    std::vector<std::string> terminals;
    for (int t : c.terminals) terminals.push_back("T" + std::to_string(t));

    SteinerTree a = steiner_tree(g, terminals);
    SteinerTree b = steiner_tree(g, terminals);
    CHECK(a.edges == b.edges);

    std::vector<std::string> reversed(terminals.rbegin(), terminals.rend());
    SteinerTree c2 = steiner_tree(g, reversed);
    CHECK(a.edges == c2.edges);
  }
}
