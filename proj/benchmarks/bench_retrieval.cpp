#include <benchmark/benchmark.h>

#include "kwsql/embedding.hpp"
#include "kwsql/example_store.hpp"

namespace {

using namespace kwsql;

const char* kWords[] = {"list",  "orders", "open",   "installation",
                        "count", "status", "request", "recommendation",
                        "level", "date",   "closed", "priority"};

ExampleStore make_store(int n) {
  ExampleStore store(256);
  for (int i = 0; i < n; ++i) {
    std::string q;
    for (int w = 0; w < 6; ++w) {
      if (w) q += ' ';
      q += kWords[(i * 7 + w * 3) % (sizeof(kWords) / sizeof(kWords[0]))];
    }
    store.add("ex-" + std::to_string(i), q, "SELECT 1 FROM T" + std::to_string(i % 9));
  }
  return store;
}

void BM_Embed(benchmark::State& state) {
  std::string text = "which installation has the most open maintenance orders";
  for (auto _ : state) {
    benchmark::DoNotOptimize(hashed_embedding(text, 256));
  }
}

BENCHMARK(BM_Embed);

void BM_RetrieveSimilar(benchmark::State& state) {
  ExampleStore store = make_store(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        store.retrieve_similar("count open orders per installation", 8));
  }
}

BENCHMARK(BM_RetrieveSimilar)->Arg(100)->Arg(1000)->Arg(10000);

} // namespace
