#include <benchmark/benchmark.h>

#include "kwsql/keyword_index.hpp"
#include "kwsql/schema.hpp"

namespace {

using namespace kwsql;

// A dictionary at industrial scale: 27 tables, ~20 columns each, and a few
// thousand indexed values.
KeywordDictionary make_dictionary(int value_count) {
  RelationalSchema s;
  for (int t = 0; t < 27; ++t) {
    TableDef table;
    table.name = "Table_" + std::to_string(t);
    table.synonyms = {"alias" + std::to_string(t)};
    for (int c = 0; c < 20; ++c) {
      ColumnDef col;
      col.name = "col_" + std::to_string(c);
      col.is_primary_key = c == 0;
      col.is_indexed_for_values = c == 1;
      table.columns.push_back(std::move(col));
    }
    s.tables.push_back(std::move(table));
  }
  std::vector<ValueTriple> values;
  for (int v = 0; v < value_count; ++v)
    values.push_back({"Table_" + std::to_string(v % 27), "col_1",
                      "VAL-" + std::to_string(v)});
  return KeywordDictionary::build(s, values);
}

void BM_MatchKeywords(benchmark::State& state) {
  KeywordDictionary dict = make_dictionary(static_cast<int>(state.range(0)));
  std::vector<std::string> keywords{"table 3",   "VAL-42", "col_7",
                                    "alias11",   "VAL1000", "unknown term"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dict.match_keywords(keywords));
  }
}

BENCHMARK(BM_MatchKeywords)->Arg(1000)->Arg(10000);

void BM_BuildDictionary(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_dictionary(static_cast<int>(state.range(0))));
  }
}

BENCHMARK(BM_BuildDictionary)->Arg(1000);

} // namespace
