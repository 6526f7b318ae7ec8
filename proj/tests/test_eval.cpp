#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "kwsql/error.hpp"
#include "kwsql/eval.hpp"
#include "kwsql/random.hpp"
#include "kwsql/sql_text.hpp"

using namespace kwsql;

namespace {

// Independent construct counter used to cross-check classify_difficulty:
// case-folds the statement and counts textual markers.
int naive_construct_count(std::string sql) {
  std::transform(sql.begin(), sql.end(), sql.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  auto count = [&](const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = sql.find(needle, pos)) != std::string::npos) {
      ++n;
      pos += needle.size();
    }
    return n;
  };
  int c = count("group by") + count("order by") + count("union") +
          count("intersect") + count("except") + count(" limit ") +
          count(" fetch ") + std::max(0, count("select") - 1);
  int aggs = count("count(") + count("sum(") + count("avg(") + count("min(") +
             count("max(");
  c += std::max(0, aggs - 1);
  // Select-list arity: commas before the first "from" outside parens.
  std::size_t from = sql.find(" from ");
  if (from != std::string::npos) {
    int depth = 0, items = 1;
    for (std::size_t i = 0; i < from; ++i) {
      if (sql[i] == '(') ++depth;
      if (sql[i] == ')') --depth;
      if (sql[i] == ',' && depth == 0) ++items;
    }
    if (items > 2) c += 1;
  }
  return c;
}

ResultTable make_table(const std::vector<std::string>& columns,
                       const std::vector<std::vector<CellValue>>& rows) {
  return ResultTable{columns, rows};
}

} // namespace

TEST_CASE("classify_difficulty on the three reference shapes") {
  CHECK(classify_difficulty("SELECT name FROM Installation WHERE type = 'rig'") ==
        Difficulty::Simple);
  CHECK(classify_difficulty(
            "SELECT t.name, COUNT(*) AS n FROM Installation t JOIN Order o "
            "ON t.code = o.installation_code WHERE t.name = 'P-X' "
            "GROUP BY t.code ORDER BY n DESC FETCH 1") == Difficulty::Complex);
  CHECK(classify_difficulty("SELECT a, COUNT(*) FROM t GROUP BY a") ==
        Difficulty::Medium);
}

TEST_CASE("classify_difficulty agrees with the naive counter on the suite") {
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));
  REQUIRE(questions.size() == 12);
  for (const auto& q : questions) {
    CHECK(count_sql_constructs(q.gold_sql) == naive_construct_count(q.gold_sql));
    REQUIRE(q.declared_difficulty.has_value());
    CHECK(classify_difficulty(q.gold_sql) == *q.declared_difficulty);
  }
}

TEST_CASE("create_tables builds an empty database from the schema") {
  SqliteBackend db(":memory:");
  db.create_tables(testutil::fixture_schema());
  db.execute_script(
      "INSERT INTO Installation VALUES ('X-1', 'test rig');");
  ResultTable rows = db.execute("SELECT name, type FROM Installation");
  REQUIRE(rows.rows.size() == 1);
  CHECK(cell_to_string(rows.rows[0][0]) == "X-1");
}

TEST_CASE("execute returns rows and captures failures") {
  auto db = testutil::seeded_backend();
  ResultTable one = db->execute("SELECT 1");
  REQUIRE(one.rows.size() == 1);
  REQUIRE(one.columns.size() == 1);
  CHECK(cell_to_string(one.rows[0][0]) == "1");

  CHECK_THROWS_AS(db->execute("SELEKT broken"), Error);

  ResultTable q24 = db->execute(
      "SELECT r.id, r.situation FROM Maintenance_recommendation r "
      "JOIN Installation i ON r.installation_name = i.name "
      "WHERE i.name = 'E-176'");
  CHECK(q24.rows.size() == 3);
}

TEST_CASE("identical tables are equivalent") {
  ResultTable t = make_table({"a", "b"}, {{std::int64_t(1), std::string("x")},
                                          {std::int64_t(2), std::string("y")}});
  CHECK(results_equivalent(t, t, false));
  CHECK(results_equivalent(t, t, true));
}

TEST_CASE("renamed columns and permuted rows are equivalent when unordered") {
  ResultTable gold = make_table(
      {"name", "n"},
      {{std::string("P-X"), std::int64_t(2)}, {std::string("P-Y"), std::int64_t(1)}});
  ResultTable pred = make_table(
      {"anything", "else"},
      {{std::string("P-Y"), std::int64_t(1)}, {std::string("P-X"), std::int64_t(2)}});
  CHECK(results_equivalent(gold, pred, false));
  CHECK(!results_equivalent(gold, pred, true));
}

TEST_CASE("a single differing value breaks equivalence") {
  ResultTable gold = make_table({"a"}, {{std::int64_t(1)}, {std::int64_t(2)}});
  ResultTable pred = make_table({"a"}, {{std::int64_t(1)}, {std::int64_t(3)}});
  CHECK(!results_equivalent(gold, pred, false));
}

TEST_CASE("numeric widening and trimming normalize values") {
  ResultTable gold = make_table({"a", "b"}, {{std::int64_t(4), std::string("x")}});
  ResultTable pred = make_table({"a", "b"}, {{4.0, std::string("  x ")}});
  CHECK(results_equivalent(gold, pred, false));
}

TEST_CASE("date canonicalization strips a midnight time") {
  ResultTable gold = make_table({"d"}, {{std::string("2024-01-10")}});
  ResultTable pred = make_table({"d"}, {{std::string("2024-01-10 00:00:00")}});
  CHECK(results_equivalent(gold, pred, false));
  ResultTable other = make_table({"d"}, {{std::string("2024-01-10 08:30:00")}});
  CHECK(!results_equivalent(gold, other, false));
}

TEST_CASE("extra prediction columns are tolerated, missing gold columns fail") {
  ResultTable gold = make_table({"a"}, {{std::int64_t(7)}});
  ResultTable pred =
      make_table({"x", "y"}, {{std::string("noise"), std::int64_t(7)}});
  CHECK(results_equivalent(gold, pred, false));
  CHECK(!results_equivalent(pred, gold, false));
}

TEST_CASE("column mapping must be injective") {
  // Gold has two identical columns; the prediction has only one such column
  // plus a different one, so no injective mapping exists.
  ResultTable gold =
      make_table({"a", "b"}, {{std::int64_t(1), std::int64_t(1)}});
  ResultTable pred =
      make_table({"a", "b"}, {{std::int64_t(1), std::int64_t(2)}});
  CHECK(!results_equivalent(gold, pred, false));

  ResultTable pred_ok =
      make_table({"a", "b"}, {{std::int64_t(1), std::int64_t(1)}});
  CHECK(results_equivalent(gold, pred_ok, false));
}

TEST_CASE("row counts must agree") {
  ResultTable gold = make_table({"a"}, {{std::int64_t(1)}});
  ResultTable pred = make_table({"a"}, {{std::int64_t(1)}, {std::int64_t(1)}});
  CHECK(!results_equivalent(gold, pred, false));
}

TEST_CASE("equivalence is reflexive, symmetric, and permutation-invariant") {
  Rng rng(1234);
  for (int i = 0; i < 200; ++i) {
    std::size_t cols = 1 + rng.next_below(3);
    std::size_t rows = rng.next_below(5);
    ResultTable t;
    for (std::size_t c = 0; c < cols; ++c)
      t.columns.push_back("c" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<CellValue> row;
      for (std::size_t c = 0; c < cols; ++c) {
        switch (rng.next_below(3)) {
          case 0: row.emplace_back(static_cast<std::int64_t>(rng.next_below(4))); break;
          case 1: row.emplace_back(std::string(1, 'a' + static_cast<char>(rng.next_below(3)))); break;
          default: row.emplace_back(std::monostate{});
        }
      }
      t.rows.push_back(std::move(row));
    }
    CHECK(results_equivalent(t, t, false));
    CHECK(results_equivalent(t, t, true));

    // Permute rows and columns; unordered equivalence must survive.
    ResultTable p = t;
    for (std::size_t r = 0; r + 1 < p.rows.size(); ++r)
      std::swap(p.rows[r], p.rows[rng.next_below(p.rows.size())]);
    std::vector<std::size_t> perm(cols);
    for (std::size_t c = 0; c < cols; ++c) perm[c] = c;
    for (std::size_t c = 0; c + 1 < cols; ++c)
      std::swap(perm[c], perm[rng.next_below(cols)]);
    ResultTable shuffled;
    shuffled.columns = p.columns;
    for (const auto& row : p.rows) {
      std::vector<CellValue> out(cols);
      for (std::size_t c = 0; c < cols; ++c) out[c] = row[perm[c]];
      shuffled.rows.push_back(std::move(out));
    }
    CHECK(results_equivalent(t, shuffled, false));
    CHECK(results_equivalent(shuffled, t, false));
  }
}

TEST_CASE("schema_linking_metrics on the three reference cases") {
  std::vector<std::set<std::string>> gold{{"A"}, {"A", "B"}};
  LinkMetrics perfect = schema_linking_metrics(gold, gold);
  CHECK(perfect.precision == doctest::Approx(1.0));
  CHECK(perfect.recall == doctest::Approx(1.0));
  CHECK(perfect.f1 == doctest::Approx(1.0));

  // One extra table over a single-table gold: P=0.5, R=1, F1=2/3.
  LinkMetrics extra = schema_linking_metrics({{"A", "B"}}, {{"A"}});
  CHECK(extra.precision == doctest::Approx(0.5));
  CHECK(extra.recall == doctest::Approx(1.0));
  CHECK(extra.f1 == doctest::Approx(2.0 / 3.0));

  LinkMetrics disjoint = schema_linking_metrics({{"C"}}, {{"A"}});
  CHECK(disjoint.precision == doctest::Approx(0.0));
  CHECK(disjoint.recall == doctest::Approx(0.0));
  CHECK(disjoint.f1 == doctest::Approx(0.0));
}

TEST_CASE("schema_linking_metrics rejects mismatched lengths") {
  CHECK_THROWS_AS(schema_linking_metrics({{"A"}}, {}), Error);
}

TEST_CASE("per-question F1 stays within the min-dominance envelope") {
  Rng rng(55);
  std::vector<std::string> pool{"A", "B", "C", "D"};
  for (int i = 0; i < 200; ++i) {
    std::set<std::string> pred, gold;
    for (const auto& t : pool) {
      if (rng.next_below(2)) pred.insert(t);
      if (rng.next_below(2)) gold.insert(t);
    }
    LinkMetrics m = schema_linking_metrics({pred}, {gold});
    CHECK(m.f1 >= 0.0);
    CHECK(m.f1 <= 1.0);
    CHECK(m.f1 <= 2.0 * std::min(m.precision, m.recall) + 1e-12);
  }
}

TEST_CASE("run_benchmark scores the fixture suite 12/12") {
  testutil::PipelineFixture f;
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));
  EvalReport report =
      run_benchmark(questions, AblationMode::Complete, f.deps, 2);
  CHECK(report.total_correct() == 12);
  CHECK(report.accuracy_total == doctest::Approx(1.0));
  CHECK(report.accuracy_simple == doctest::Approx(1.0));
  CHECK(report.accuracy_medium == doctest::Approx(1.0));
  CHECK(report.accuracy_complex == doctest::Approx(1.0));
  CHECK(report.link.f1 == doctest::Approx(1.0));
  CHECK(report.total_correct() ==
        report.correct_simple + report.correct_medium + report.correct_complex);
  for (const auto& o : report.outcomes) CHECK(o.verdict == Verdict::Correct);
}

TEST_CASE("removing one transcript rule fails exactly one question") {
  auto rules = ScriptedBackend::load_rules(
      testutil::fixture_path("transcript_complete.jsonl"));
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));

  // Drop one schema_linking rule; only its question should fail.
  std::vector<TranscriptRule> pruned;
  std::string dropped_contains;
  for (const auto& r : rules) {
    if (dropped_contains.empty() && r.kind && *r.kind == "schema_linking") {
      dropped_contains = *r.contains;
      continue;
    }
    pruned.push_back(r);
  }
  REQUIRE(!dropped_contains.empty());

  ScriptedBackend gateway{pruned};
  auto exec = testutil::seeded_backend();
  PipelineDeps deps;
  deps.schema = &testutil::fixture_schema();
  deps.dictionary = &testutil::fixture_dictionary();
  deps.store = &testutil::fixture_store();
  deps.gateway = &gateway;
  deps.templates = &testutil::fixture_templates();
  deps.exec = exec.get();

  EvalReport report = run_benchmark(questions, AblationMode::Complete, deps, 2);
  CHECK(report.total_correct() == 11);
  int failed = 0;
  for (const auto& o : report.outcomes)
    if (o.verdict == Verdict::Failed) ++failed;
  CHECK(failed == 1);
}

TEST_CASE("an empty question list produces an empty report") {
  testutil::PipelineFixture f;
  EvalReport report = run_benchmark({}, AblationMode::Complete, f.deps, 2);
  CHECK(report.total_questions() == 0);
  CHECK(report.accuracy_total == 0.0);
  CHECK(report.elapsed_seconds >= 0.0);
  CHECK(render_report_text(report).find("Accuracy") != std::string::npos);
}

TEST_CASE("verdict correct implies both executions succeeded") {
  testutil::PipelineFixture f;
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));
  EvalReport report =
      run_benchmark(questions, AblationMode::Complete, f.deps, 1);
  for (const auto& o : report.outcomes) {
    if (o.verdict == Verdict::Correct) {
      CHECK(!o.predicted_sql.empty());
      CHECK(o.failure.empty());
    }
  }
}

TEST_CASE("near misses are exported for manual review") {
  // Swap one gold query so the prediction mismatches by value.
  testutil::PipelineFixture f;
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));
  questions[1].gold_sql = "SELECT status FROM Maintenance_order WHERE id = 8";
  EvalReport report =
      run_benchmark(questions, AblationMode::Complete, f.deps, 1);
  CHECK(report.total_correct() == 11);
  std::string review = render_manual_review(report);
  CHECK(review.find("q02") != std::string::npos);
  CHECK(review.find("gold_result") != std::string::npos);
}

TEST_CASE("report json mirrors the counts") {
  testutil::PipelineFixture f;
  auto questions =
      load_benchmark_file(testutil::fixture_path("fixture_benchmark.jsonl"));
  EvalReport report =
      run_benchmark(questions, AblationMode::Complete, f.deps, 2);
  std::string json_text = report_to_json(report);
  CHECK(json_text.find("\"total\": 12") != std::string::npos);
  CHECK(json_text.find("\"f1\": 1.0") != std::string::npos);
}
