#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kwsql/exec.hpp"
#include "kwsql/pipeline.hpp"

namespace kwsql {

enum class Difficulty { Simple, Medium, Complex };
const char* difficulty_name(Difficulty d);
Difficulty difficulty_from_name(const std::string& name);

struct BenchmarkQuestion {
  std::string id;
  std::string question;
  std::string gold_sql;
  std::optional<Difficulty> declared_difficulty;
};

std::vector<BenchmarkQuestion> load_benchmark_file(const std::string& path);

// Construct count C: simple C=0, medium C in {1,2}, complex C>=3.
Difficulty classify_difficulty(const std::string& sql);

// Value-based execution-accuracy comparison. Column names are ignored;
// values are normalized (numeric widening, text trimming, date
// canonicalization); some injective mapping of gold columns into prediction
// columns must make the row multisets (or sequences, when order_sensitive)
// match. Extra prediction columns are tolerated, missing gold columns fail.
bool results_equivalent(const ResultTable& gold, const ResultTable& prediction,
                        bool order_sensitive);

struct LinkMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Macro-averaged precision / recall / F1 over per-question table sets.
LinkMetrics schema_linking_metrics(
    const std::vector<std::set<std::string>>& predicted,
    const std::vector<std::set<std::string>>& gold);

enum class Verdict { Correct, Wrong, Failed };
const char* verdict_name(Verdict v);

struct QuestionOutcome {
  std::string id;
  Difficulty difficulty = Difficulty::Simple;
  Verdict verdict = Verdict::Failed;
  std::string failure;              // step + message when failed
  std::string predicted_sql;        // sql_over_base when compilation succeeded
  std::set<std::string> predicted_tables;
  std::set<std::string> gold_tables;
  bool near_miss = false;           // wrong with both executions succeeding
  ResultTable gold_rows;
  ResultTable predicted_rows;
};

struct EvalReport {
  std::vector<QuestionOutcome> outcomes;
  int correct_simple = 0, correct_medium = 0, correct_complex = 0;
  int total_simple = 0, total_medium = 0, total_complex = 0;
  double accuracy_simple = 0.0, accuracy_medium = 0.0, accuracy_complex = 0.0;
  double accuracy_total = 0.0;
  LinkMetrics link;
  double elapsed_seconds = 0.0;

  int total_correct() const {
    return correct_simple + correct_medium + correct_complex;
  }
  int total_questions() const {
    return total_simple + total_medium + total_complex;
  }
};

EvalReport run_benchmark(const std::vector<BenchmarkQuestion>& questions,
                         AblationMode mode, PipelineDeps& deps,
                         int concurrency = 1);

std::string render_report_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);
std::string render_manual_review(const EvalReport& report); // JSONL

} // namespace kwsql
