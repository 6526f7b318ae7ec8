#include <benchmark/benchmark.h>

#include "kwsql/graph.hpp"
#include "kwsql/random.hpp"
#include "kwsql/steiner.hpp"

namespace {

using namespace kwsql;

// Connected schema shaped like a production referential graph: a spanning
// tree over `nodes` tables plus `extra` shortcut foreign keys.
RelationalSchema make_schema(int nodes, int extra, std::uint64_t seed) {
  Rng rng(seed);
  RelationalSchema s;
  for (int i = 0; i < nodes; ++i) {
    TableDef t;
    t.name = "Table_" + std::to_string(i);
    ColumnDef id;
    id.name = "id";
    id.data_type = DataType::Integer;
    id.is_primary_key = true;
    ColumnDef ref;
    ref.name = "ref";
    ref.data_type = DataType::Integer;
    t.columns = {id, ref};
    s.tables.push_back(std::move(t));
  }
  auto link = [&](int a, int b) {
    s.foreign_keys.push_back({"Table_" + std::to_string(a),
                              "Table_" + std::to_string(b),
                              {{"ref", "id"}}});
  };
  for (int i = 1; i < nodes; ++i) link(static_cast<int>(rng.next_below(i)), i);
  for (int e = 0; e < extra; ++e) {
    int a = static_cast<int>(rng.next_below(nodes));
    int b = static_cast<int>(rng.next_below(nodes));
    if (a != b) link(a, b);
  }
  return s;
}

void BM_SteinerTree(benchmark::State& state) {
  int nodes = static_cast<int>(state.range(0));
  int terminals = static_cast<int>(state.range(1));
  RelationalSchema schema = make_schema(nodes, nodes / 3, 7);
  ReferentialGraph graph = ReferentialGraph::build(schema);
  Rng rng(11);
  std::vector<std::vector<std::string>> queries;
  for (int q = 0; q < 64; ++q) {
    std::vector<std::string> t;
    while (static_cast<int>(t.size()) < terminals) {
      std::string name = "Table_" + std::to_string(rng.next_below(nodes));
      bool seen = false;
      for (const auto& x : t) seen = seen || x == name;
      if (!seen) t.push_back(name);
    }
    queries.push_back(std::move(t));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(steiner_tree(graph, queries[i++ % queries.size()]));
  }
}

BENCHMARK(BM_SteinerTree)
    ->Args({8, 2})
    ->Args({16, 3})
    ->Args({27, 3})
    ->Args({27, 4});

void BM_ReferentialGraphBuild(benchmark::State& state) {
  RelationalSchema schema =
      make_schema(static_cast<int>(state.range(0)), 8, 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ReferentialGraph::build(schema));
  }
}

BENCHMARK(BM_ReferentialGraphBuild)->Arg(27);

} // namespace
