#include "kwsql/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

using nlohmann::json;

const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::Simple: return "simple";
    case Difficulty::Medium: return "medium";
    case Difficulty::Complex: return "complex";
  }
  return "simple";
}

Difficulty difficulty_from_name(const std::string& name) {
  if (name == "simple") return Difficulty::Simple;
  if (name == "medium") return Difficulty::Medium;
  if (name == "complex") return Difficulty::Complex;
  throw Error("parse", "unknown difficulty '" + name + "'");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Correct: return "correct";
    case Verdict::Wrong: return "wrong";
    case Verdict::Failed: return "failed";
  }
  return "failed";
}

std::vector<BenchmarkQuestion> load_benchmark_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open benchmark file '" + path + "'");
  std::vector<BenchmarkQuestion> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      BenchmarkQuestion q;
      q.id = j.at("id").get<std::string>();
      q.question = j.at("question").get<std::string>();
      q.gold_sql = j.at("gold_sql").get<std::string>();
      if (j.contains("difficulty"))
        q.declared_difficulty =
            difficulty_from_name(j.at("difficulty").get<std::string>());
      out.push_back(std::move(q));
    } catch (const json::exception& e) {
      throw Error("parse", "benchmark line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return out;
}

Difficulty classify_difficulty(const std::string& sql) {
  int c = count_sql_constructs(sql);
  if (c == 0) return Difficulty::Simple;
  if (c <= 2) return Difficulty::Medium;
  return Difficulty::Complex;
}

// ---------------------------------------------------------------------------
// Value-based result comparison

namespace {

// Canonical cell form: null, a number, or trimmed text. Numeric-looking text
// widens to a number; date-time text with a zero time collapses to the date.
struct CanonCell {
  int type = 0; // 0 null, 1 number, 2 text
  double num = 0.0;
  std::string text;

  std::string key() const {
    if (type == 0) return "\x01null";
    if (type == 1) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "\x02%.12g", num);
      return buf;
    }
    return "\x03" + text;
  }
};

bool looks_numeric(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

bool is_digits(const std::string& s, std::size_t b, std::size_t n) {
  if (b + n > s.size()) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[b + i]))) return false;
  return true;
}

std::string canonical_date(const std::string& s) {
  // YYYY-MM-DD optionally followed by a midnight time.
  if (s.size() < 10) return {};
  if (!is_digits(s, 0, 4) || s[4] != '-' || !is_digits(s, 5, 2) || s[7] != '-' ||
      !is_digits(s, 8, 2))
    return {};
  if (s.size() == 10) return s.substr(0, 10);
  std::string rest = s.substr(10);
  if (rest[0] != ' ' && rest[0] != 'T') return {};
  std::string time = rest.substr(1);
  if (time.rfind("00:00:00", 0) == 0) {
    std::string frac = time.substr(8);
    for (char c : frac)
      if (c != '0' && c != '.' && c != 'Z') return {};
    return s.substr(0, 10);
  }
  return {};
}

CanonCell canon(const CellValue& v) {
  CanonCell c;
  if (std::holds_alternative<std::monostate>(v)) return c;
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    c.type = 1;
    c.num = static_cast<double>(*i);
    return c;
  }
  if (const auto* d = std::get_if<double>(&v)) {
    c.type = 1;
    c.num = *d;
    return c;
  }
  std::string t = trim(std::get<std::string>(v));
  std::string date = canonical_date(t);
  if (!date.empty()) {
    c.type = 2;
    c.text = date;
    return c;
  }
  double num;
  if (looks_numeric(t, num)) {
    c.type = 1;
    c.num = num;
    return c;
  }
  c.type = 2;
  c.text = t;
  return c;
}

using ColumnKeys = std::vector<std::string>;

ColumnKeys column_keys(const ResultTable& t, std::size_t col) {
  ColumnKeys keys;
  keys.reserve(t.rows.size());
  for (const auto& row : t.rows) keys.push_back(canon(row[col]).key());
  return keys;
}

std::string signature(const ColumnKeys& keys, bool order_sensitive) {
  ColumnKeys copy = keys;
  if (!order_sensitive) std::sort(copy.begin(), copy.end());
  std::string out;
  for (const auto& k : copy) {
    out += k;
    out += '\x1f';
  }
  return out;
}

bool rows_match(const ResultTable& gold, const ResultTable& pred,
                const std::vector<std::size_t>& mapping, bool order_sensitive) {
  std::vector<std::string> gold_rows, pred_rows;
  gold_rows.reserve(gold.rows.size());
  pred_rows.reserve(pred.rows.size());
  for (const auto& row : gold.rows) {
    std::string key;
    for (std::size_t c = 0; c < gold.columns.size(); ++c) {
      key += canon(row[c]).key();
      key += '\x1f';
    }
    gold_rows.push_back(std::move(key));
  }
  for (const auto& row : pred.rows) {
    std::string key;
    for (std::size_t c : mapping) {
      key += canon(row[c]).key();
      key += '\x1f';
    }
    pred_rows.push_back(std::move(key));
  }
  if (!order_sensitive) {
    std::sort(gold_rows.begin(), gold_rows.end());
    std::sort(pred_rows.begin(), pred_rows.end());
  }
  return gold_rows == pred_rows;
}

bool search_mapping(const ResultTable& gold, const ResultTable& pred,
                    const std::vector<std::vector<std::size_t>>& candidates,
                    std::vector<std::size_t>& mapping, std::vector<bool>& used,
                    std::size_t col, bool order_sensitive) {
  if (col == candidates.size())
    return rows_match(gold, pred, mapping, order_sensitive);
  for (std::size_t p : candidates[col]) {
    if (used[p]) continue;
    used[p] = true;
    mapping[col] = p;
    if (search_mapping(gold, pred, candidates, mapping, used, col + 1,
                       order_sensitive))
      return true;
    used[p] = false;
  }
  return false;
}

} // namespace

bool results_equivalent(const ResultTable& gold, const ResultTable& prediction,
                        bool order_sensitive) {
  if (gold.columns.size() > prediction.columns.size()) return false;
  if (gold.rows.size() != prediction.rows.size()) return false;
  if (gold.columns.empty()) return true;

  // Candidate prediction columns per gold column, by value signature.
  std::vector<std::string> pred_sigs;
  for (std::size_t c = 0; c < prediction.columns.size(); ++c)
    pred_sigs.push_back(signature(column_keys(prediction, c), order_sensitive));
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t c = 0; c < gold.columns.size(); ++c) {
    std::string sig = signature(column_keys(gold, c), order_sensitive);
    std::vector<std::size_t> cols;
    for (std::size_t p = 0; p < prediction.columns.size(); ++p)
      if (pred_sigs[p] == sig) cols.push_back(p);
    if (cols.empty()) return false;
    candidates.push_back(std::move(cols));
  }

  std::vector<std::size_t> mapping(gold.columns.size(), 0);
  std::vector<bool> used(prediction.columns.size(), false);
  if (gold.columns.size() <= 8)
    return search_mapping(gold, prediction, candidates, mapping, used, 0,
                          order_sensitive);

  // Beyond 8 columns: greedy assignment with one final verification.
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool assigned = false;
    for (std::size_t p : candidates[c]) {
      if (used[p]) continue;
      used[p] = true;
      mapping[c] = p;
      assigned = true;
      break;
    }
    if (!assigned) return false;
  }
  return rows_match(gold, prediction, mapping, order_sensitive);
}

LinkMetrics schema_linking_metrics(
    const std::vector<std::set<std::string>>& predicted,
    const std::vector<std::set<std::string>>& gold) {
  if (predicted.size() != gold.size())
    throw Error("validation", "predicted/gold length mismatch");
  LinkMetrics macro;
  if (predicted.empty()) return macro;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    std::set<std::string> p, g;
    for (const auto& t : predicted[i]) p.insert(to_lower(t));
    for (const auto& t : gold[i]) g.insert(to_lower(t));
    std::size_t inter = 0;
    for (const auto& t : p)
      if (g.count(t)) ++inter;
    double precision;
    if (p.empty())
      precision = g.empty() ? 1.0 : 0.0;
    else
      precision = static_cast<double>(inter) / static_cast<double>(p.size());
    double recall;
    if (g.empty())
      recall = p.empty() ? 1.0 : 0.0;
    else
      recall = static_cast<double>(inter) / static_cast<double>(g.size());
    double f1 = (precision + recall == 0.0)
                    ? 0.0
                    : 2.0 * precision * recall / (precision + recall);
    macro.precision += precision;
    macro.recall += recall;
    macro.f1 += f1;
  }
  double n = static_cast<double>(predicted.size());
  macro.precision /= n;
  macro.recall /= n;
  macro.f1 /= n;
  return macro;
}

// ---------------------------------------------------------------------------
// Benchmark runner

namespace {

void evaluate_one(const BenchmarkQuestion& q, AblationMode mode,
                  PipelineDeps& deps, QuestionOutcome& out) {
  out.id = q.id;
  out.gold_tables = from_tables(q.gold_sql);
  out.difficulty = q.declared_difficulty ? *q.declared_difficulty
                                         : classify_difficulty(q.gold_sql);

  LinkResult link;
  try {
    link = schema_link(q.question, mode, deps);
    out.predicted_tables.insert(link.tables.begin(), link.tables.end());
  } catch (const Error& e) {
    out.verdict = Verdict::Failed;
    out.failure = e.step() + ": " + e.what();
    return;
  }

  CompilationResult compiled;
  try {
    compiled = compile_question(q.question, link, deps);
    out.predicted_sql = compiled.sql_over_base;
  } catch (const Error& e) {
    out.verdict = Verdict::Failed;
    out.failure = e.step() + ": " + e.what();
    return;
  }

  if (!deps.exec) {
    out.verdict = Verdict::Failed;
    out.failure = "execution: no execution backend configured";
    return;
  }
  bool gold_ok = false, pred_ok = false;
  try {
    out.gold_rows = deps.exec->execute(q.gold_sql);
    gold_ok = true;
    out.predicted_rows = deps.exec->execute(compiled.sql_over_base);
    pred_ok = true;
  } catch (const Error& e) {
    out.verdict = Verdict::Failed;
    out.failure = std::string(gold_ok ? "prediction " : "gold ") +
                  "execution: " + e.what();
    return;
  }
  (void)pred_ok;

  bool order_sensitive = has_order_by(q.gold_sql);
  if (results_equivalent(out.gold_rows, out.predicted_rows, order_sensitive)) {
    out.verdict = Verdict::Correct;
  } else {
    out.verdict = Verdict::Wrong;
    out.near_miss = true;
  }
}

} // namespace

EvalReport run_benchmark(const std::vector<BenchmarkQuestion>& questions,
                         AblationMode mode, PipelineDeps& deps,
                         int concurrency) {
  EvalReport report;
  report.outcomes.resize(questions.size());
  auto started = std::chrono::steady_clock::now();

  int workers = std::max(1, std::min<int>(concurrency,
                                          static_cast<int>(questions.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= questions.size()) break;
      evaluate_one(questions[i], mode, deps, report.outcomes[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }

  std::vector<std::set<std::string>> predicted, gold;
  for (const auto& o : report.outcomes) {
    predicted.push_back(o.predicted_tables);
    gold.push_back(o.gold_tables);
    int correct = o.verdict == Verdict::Correct ? 1 : 0;
    switch (o.difficulty) {
      case Difficulty::Simple:
        ++report.total_simple;
        report.correct_simple += correct;
        break;
      case Difficulty::Medium:
        ++report.total_medium;
        report.correct_medium += correct;
        break;
      case Difficulty::Complex:
        ++report.total_complex;
        report.correct_complex += correct;
        break;
    }
  }
  auto ratio = [](int c, int t) {
    return t == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(t);
  };
  report.accuracy_simple = ratio(report.correct_simple, report.total_simple);
  report.accuracy_medium = ratio(report.correct_medium, report.total_medium);
  report.accuracy_complex = ratio(report.correct_complex, report.total_complex);
  report.accuracy_total =
      ratio(report.total_correct(), report.total_questions());
  if (!questions.empty()) report.link = schema_linking_metrics(predicted, gold);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return report;
}

std::string render_report_text(const EvalReport& report) {
  char line[160];
  std::string out;
  out += "            #Correct Predicted Questions        Accuracy\n";
  out += "Method      Simple  Medium  Complex  Total      Simple  Medium  "
         "Complex  Total    Time(s)\n";
  std::snprintf(line, sizeof(line),
                "%-11s %-7d %-7d %-8d %-10d %-7.2f %-7.2f %-8.2f %-8.2f %.1f\n",
                "run", report.correct_simple, report.correct_medium,
                report.correct_complex, report.total_correct(),
                report.accuracy_simple, report.accuracy_medium,
                report.accuracy_complex, report.accuracy_total,
                report.elapsed_seconds);
  out += line;
  std::snprintf(line, sizeof(line),
                "Schema linking (macro): P=%.3f R=%.3f F1=%.3f\n",
                report.link.precision, report.link.recall, report.link.f1);
  out += line;
  return out;
}

std::string report_to_json(const EvalReport& report) {
  json per_question = json::array();
  for (const auto& o : report.outcomes) {
    json j{{"id", o.id},
           {"difficulty", difficulty_name(o.difficulty)},
           {"verdict", verdict_name(o.verdict)}};
    if (!o.failure.empty()) j["failure"] = o.failure;
    if (!o.predicted_sql.empty()) j["predicted_sql"] = o.predicted_sql;
    per_question.push_back(std::move(j));
  }
  json j{{"correct",
          {{"simple", report.correct_simple},
           {"medium", report.correct_medium},
           {"complex", report.correct_complex},
           {"total", report.total_correct()}}},
         {"accuracy",
          {{"simple", report.accuracy_simple},
           {"medium", report.accuracy_medium},
           {"complex", report.accuracy_complex},
           {"total", report.accuracy_total}}},
         {"schema_linking",
          {{"precision", report.link.precision},
           {"recall", report.link.recall},
           {"f1", report.link.f1}}},
         {"elapsed_seconds", report.elapsed_seconds},
         {"questions", per_question}};
  return j.dump(2);
}

namespace {

json table_to_json(const ResultTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<std::monostate>(cell))
        r.push_back(nullptr);
      else if (const auto* i = std::get_if<std::int64_t>(&cell))
        r.push_back(*i);
      else if (const auto* d = std::get_if<double>(&cell))
        r.push_back(*d);
      else
        r.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(r));
  }
  return json{{"columns", t.columns}, {"rows", rows}};
}

} // namespace

std::string render_manual_review(const EvalReport& report) {
  std::string out;
  for (const auto& o : report.outcomes) {
    if (!o.near_miss) continue;
    json j{{"id", o.id},
           {"verdict", verdict_name(o.verdict)},
           {"predicted_sql", o.predicted_sql},
           {"gold_result", table_to_json(o.gold_rows)},
           {"predicted_result", table_to_json(o.predicted_rows)}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

} // namespace kwsql
