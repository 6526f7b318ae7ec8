#include "kwsql/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/graph.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

void GenerationConfig::validate() const {
  if (table_count_distribution.empty())
    throw Error("config", "table count distribution is empty");
  double sum = 0.0;
  for (const auto& [n, p] : table_count_distribution) {
    if (n < 1) throw Error("config", "table count must be at least 1");
    if (p < 0.0) throw Error("config", "negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error("config", "table count probabilities must sum to 1");
  if (examples_target < 1) throw Error("config", "examples target must be >= 1");
}

std::vector<std::string> select_tables(int n, const RelationalSchema& schema,
                                       Rng& rng) {
  if (n < 1) throw Error("validation", "table count must be at least 1");
  if (static_cast<std::size_t>(n) > schema.tables.size())
    throw Error("validation", "cannot select " + std::to_string(n) +
                                  " tables from a schema with " +
                                  std::to_string(schema.tables.size()));
  ReferentialGraph graph = ReferentialGraph::build(schema);

  constexpr int kMaxResamples = 32;
  for (int round = 0; round < kMaxResamples; ++round) {
    std::vector<std::size_t> remaining(schema.tables.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
    std::vector<std::string> chosen;
    bool failed = false;
    for (int pick = 0; pick < n; ++pick) {
      std::vector<double> weights;
      weights.reserve(remaining.size());
      for (std::size_t idx : remaining)
        weights.push_back(schema.tables[idx].selection_weight);
      double total = 0.0;
      for (double w : weights) total += w;
      if (total <= 0.0) {
        failed = true;
        break;
      }
      std::size_t slot = weighted_index(rng, weights);
      chosen.push_back(schema.tables[remaining[slot]].name);
      remaining.erase(remaining.begin() + static_cast<long>(slot));
    }
    if (failed)
      throw Error("validation",
                  "not enough tables with positive weight for n=" +
                      std::to_string(n));
    auto component = graph.connected_component(chosen.front());
    bool connected = true;
    for (const auto& t : chosen)
      if (!component.count(t)) connected = false;
    if (connected) return chosen;
  }
  throw Error("validation",
              "no connected " + std::to_string(n) +
                  "-table subset found within the resampling budget");
}

std::map<std::string, std::pair<std::string, std::string>> select_columns(
    const std::vector<std::string>& tables, const RelationalSchema& schema,
    Rng& rng) {
  std::vector<std::string> ordered = tables;
  std::sort(ordered.begin(), ordered.end(),
            [](const std::string& a, const std::string& b) {
              return to_lower(a) < to_lower(b);
            });
  std::map<std::string, std::pair<std::string, std::string>> out;
  for (const auto& name : ordered) {
    const TableDef& t = schema.table_or_throw(name);
    const ColumnDef* pk = t.primary_key();
    if (!pk)
      throw Error("validation", "table '" + t.name + "' has no primary key");
    std::vector<const ColumnDef*> others;
    std::vector<double> weights;
    for (const auto& c : t.columns) {
      if (c.is_primary_key) continue;
      others.push_back(&c);
      weights.push_back(c.selection_weight);
    }
    if (others.empty())
      throw Error("validation",
                  "table '" + t.name + "' has no non-key column to select");
    std::size_t slot = weighted_index(rng, weights);
    out[t.name] = {pk->name, others[slot]->name};
  }
  return out;
}

RestrictionHint restriction_hint(const ColumnDef& column) {
  if (column.is_primary_key || column.data_type == DataType::Boolean) {
    return {RestrictionKind::Equality,
            "restrict " + column.name + " with an equality filter, e.g. " +
                column.name + " = 'B'"};
  }
  switch (column.data_type) {
    case DataType::String:
      return {RestrictionKind::Pattern,
              "restrict " + column.name + " with a pattern filter, e.g. " +
                  column.name + " LIKE '%B%'"};
    case DataType::Integer:
    case DataType::Decimal:
      return {RestrictionKind::Aggregation,
              "use " + column.name +
                  " in an aggregation (COUNT, AVG, MAX, ...)"};
    case DataType::Date:
    case DataType::Timestamp:
      return {RestrictionKind::DateRange,
              "restrict " + column.name + " with a date range"};
    default:
      return {RestrictionKind::Equality,
              "restrict " + column.name + " with an equality filter, e.g. " +
                  column.name + " = 'B'"};
  }
}

std::string render_database_doc(const RelationalSchema& schema,
                                const std::vector<std::string>& tables) {
  std::string out;
  for (const auto& name : tables) {
    const TableDef& t = schema.table_or_throw(name);
    out += t.name;
    if (!t.description.empty()) out += ": " + t.description;
    if (!t.synonyms.empty()) {
      out += " (also called: ";
      for (std::size_t i = 0; i < t.synonyms.size(); ++i) {
        if (i) out += ", ";
        out += t.synonyms[i];
      }
      out += ")";
    }
    out += "\n";
    for (const auto& c : t.columns) {
      out += "  " + c.name;
      if (!c.description.empty()) out += ": " + c.description;
      if (!c.synonyms.empty()) {
        out += " (also called: ";
        for (std::size_t i = 0; i < c.synonyms.size(); ++i) {
          if (i) out += ", ";
          out += c.synonyms[i];
        }
        out += ")";
      }
      out += "\n";
    }
  }
  return out;
}

namespace {

struct SynthCall {
  std::string prompt;
  std::string response;
};

std::string call_gateway(SynthDeps& deps, PromptKind kind,
                         const PromptContext& ctx, double temperature,
                         Trace* trace) {
  std::vector<ChatMessage> messages = deps.templates->build_prompt(kind, ctx);
  CallParams params;
  params.temperature = temperature;
  std::string response = deps.gateway->complete(kind, messages, params);
  if (trace)
    trace->record(prompt_kind_name(kind), join_messages(messages), response);
  return response;
}

// Validation gate after Step 5: the SQL must parse in the supported subset
// and reference exactly the selected tables.
std::string validate_generated_sql(const std::string& raw,
                                   const std::vector<std::string>& tables) {
  std::string sql = parse_fenced_sql(raw);
  std::set<std::string> used = from_tables(sql);
  std::set<std::string> selected;
  for (const auto& t : tables) selected.insert(to_lower(t));
  for (const auto& t : used)
    if (!selected.count(to_lower(t)))
      throw DiscardSignal{"table outside selection: " + t, sql};
  for (const auto& t : tables) {
    bool found = false;
    for (const auto& u : used)
      if (ci_equal(u, t)) found = true;
    if (!found)
      throw DiscardSignal{"selected table missing from query: " + t, sql};
  }
  return sql;
}

} // namespace

CreatedExample create_example(int n, SynthDeps& deps, Rng& rng, Trace* trace) {
  if (!deps.schema || !deps.gateway || !deps.templates || !deps.values)
    throw Error("config", "synthetic generation dependencies not configured");

  // Steps 1-2: weighted table and column selection.
  std::vector<std::string> tables = select_tables(n, *deps.schema, rng);
  auto columns = select_columns(tables, *deps.schema, rng);

  // Step 3: simplified DDL over the selected columns.
  std::map<std::string, std::set<std::string>> ddl_columns;
  for (const auto& [table, pair] : columns)
    ddl_columns[table] = {pair.first, pair.second};
  std::string ddl = render_ddl(*deps.schema, tables, ddl_columns);

  // Step 4: create a question from DDL + sample values + restriction hints.
  std::string samples;
  std::string hints;
  for (const auto& [table, pair] : columns) {
    const TableDef& t = deps.schema->table_or_throw(table);
    for (const std::string& col : {pair.first, pair.second}) {
      std::vector<std::string> values = deps.values->sample_values(table, col, 5);
      samples += table + "." + col + ": ";
      if (values.empty()) samples += "(no values)";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) samples += ", ";
        samples += values[i];
      }
      samples += "\n";
      hints += "- " + restriction_hint(*t.find_column(col)).text + "\n";
    }
  }
  std::string draft_question = trim(call_gateway(
      deps, PromptKind::SynthCreateQuestion,
      {{"ddl", ddl}, {"sample_values", samples}, {"restriction_hints", hints}},
      0.7, trace));
  if (draft_question.empty()) throw DiscardSignal{"empty question", ""};

  // Step 5: translate to SQL; one regeneration on validation failure.
  std::string sql;
  try {
    std::string raw = call_gateway(deps, PromptKind::SynthGenerateSql,
                                   {{"ddl", ddl}, {"question", draft_question}},
                                   0.0, trace);
    sql = validate_generated_sql(raw, tables);
  } catch (const Error& first_error) {
    if (first_error.step() != "parse") throw;
    if (trace)
      trace->warn("synth_generate_sql",
                  "regenerating after invalid SQL: " +
                      std::string(first_error.what()));
    std::string raw = call_gateway(
        deps, PromptKind::SynthGenerateSql,
        {{"ddl", ddl},
         {"question", draft_question +
                          "\nReturn only a single SQL SELECT statement over "
                          "the listed tables, in a fenced sql block."}},
        0.0, trace);
    sql = validate_generated_sql(raw, tables);
  } catch (const DiscardSignal& first_discard) {
    if (trace)
      trace->warn("synth_generate_sql",
                  "regenerating after validation failure: " + first_discard.reason);
    std::string raw = call_gateway(
        deps, PromptKind::SynthGenerateSql,
        {{"ddl", ddl},
         {"question", draft_question +
                          "\nReturn only a single SQL SELECT statement over "
                          "the listed tables, in a fenced sql block."}},
        0.0, trace);
    sql = validate_generated_sql(raw, tables);
  }

  // Step 6: rephrase into the user's vocabulary.
  std::string question = trim(call_gateway(
      deps, PromptKind::SynthImproveQuestion,
      {{"doc", render_database_doc(*deps.schema, tables)},
       {"question", draft_question}},
      0.0, trace));
  if (question.empty()) question = draft_question;

  return {question, sql, tables};
}

GenerationResult generate_dataset(const GenerationConfig& config,
                                  SynthDeps& deps,
                                  std::size_t embed_dimension) {
  config.validate();
  GenerationResult result{ExampleStore(embed_dimension), {}, {}, false};

  std::vector<int> counts;
  std::vector<double> probabilities;
  for (const auto& [n, p] : config.table_count_distribution) {
    counts.push_back(n);
    probabilities.push_back(p);
  }

  int budget = config.examples_target * config.attempt_budget_factor;
  int stored = 0;
  for (int attempt = 0; attempt < budget && stored < config.examples_target;
       ++attempt) {
    Rng rng(attempt_seed(config.rng_seed, static_cast<std::uint64_t>(attempt)));
    int n = counts[weighted_index(rng, probabilities)];
    result.attempt_table_counts.push_back(n);
    try {
      CreatedExample ex = create_example(n, deps, rng, nullptr);
      char id[16];
      std::snprintf(id, sizeof(id), "ex-%04d", stored + 1);
      result.store.add(id, ex.question, ex.sql);
      ++stored;
    } catch (const DiscardSignal& d) {
      result.discards.push_back({attempt, d.reason, d.raw_sql});
    } catch (const Error& e) {
      result.discards.push_back({attempt, std::string(e.step()) + ": " + e.what(),
                                 e.raw()});
    }
  }
  result.target_reached = stored >= config.examples_target;
  return result;
}

void write_discard_log(const std::string& path,
                       const std::vector<DiscardRecord>& discards) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("config", "cannot write discard log '" + path + "'");
  for (const auto& d : discards) {
    nlohmann::json j{{"attempt", d.attempt},
                     {"reason", d.reason},
                     {"raw_sql", d.raw_sql}};
    out << j.dump() << "\n";
  }
}

} // namespace kwsql
