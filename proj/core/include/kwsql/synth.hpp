#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kwsql/example_store.hpp"
#include "kwsql/exec.hpp"
#include "kwsql/llm.hpp"
#include "kwsql/prompts.hpp"
#include "kwsql/random.hpp"
#include "kwsql/schema.hpp"
#include "kwsql/trace.hpp"

namespace kwsql {

struct GenerationConfig {
  std::map<int, double> table_count_distribution; // n -> probability
  int examples_target = 10;
  std::uint64_t rng_seed = 0;
  int sample_values_per_column = 5;
  int attempt_budget_factor = 4;

  void validate() const; // probabilities sum to 1, every n >= 1
};

// Weighted random set of n distinct tables, all in one connected component
// (bounded resampling). Consumes one weighted draw per pick per attempt.
std::vector<std::string> select_tables(int n, const RelationalSchema& schema,
                                       Rng& rng);

// Per table: (primary-key column, one weighted non-PK column). Tables are
// visited in case-folded name order so the draw sequence is pinned.
std::map<std::string, std::pair<std::string, std::string>> select_columns(
    const std::vector<std::string>& tables, const RelationalSchema& schema,
    Rng& rng);

enum class RestrictionKind { Equality, Pattern, Aggregation, DateRange };

struct RestrictionHint {
  RestrictionKind kind;
  std::string text; // line for the question-creation prompt
};

// Key columns get equality, non-key strings a LIKE pattern, numerics an
// aggregation suggestion, dates a range suggestion. Total over all types.
RestrictionHint restriction_hint(const ColumnDef& column);

struct SynthDeps {
  const RelationalSchema* schema = nullptr;
  ValueSampler* values = nullptr;
  LlmBackend* gateway = nullptr;
  const TemplateSet* templates = nullptr;
};

struct CreatedExample {
  std::string question;
  std::string sql;
  std::vector<std::string> tables; // the Step-1 selection
};

// Signals a discarded attempt (validation failed after one regeneration).
struct DiscardSignal {
  std::string reason;
  std::string raw_sql;
};

// Steps 1-6 of the generation algorithm for one example. Throws Error for
// gateway failures and DiscardSignal when the validation gate rejects the
// attempt.
CreatedExample create_example(int n, SynthDeps& deps, Rng& rng, Trace* trace);

struct DiscardRecord {
  int attempt = 0;
  std::string reason;
  std::string raw_sql;
};

struct GenerationResult {
  ExampleStore store;
  std::vector<DiscardRecord> discards;
  std::vector<int> attempt_table_counts; // n drawn per attempt, in order
  bool target_reached = false;
};

GenerationResult generate_dataset(const GenerationConfig& config,
                                  SynthDeps& deps,
                                  std::size_t embed_dimension = 256);

void write_discard_log(const std::string& path,
                       const std::vector<DiscardRecord>& discards);

// Table/column descriptions and synonyms rendered for the question-improve
// prompt.
std::string render_database_doc(const RelationalSchema& schema,
                                const std::vector<std::string>& tables);

} // namespace kwsql
