#include "kwsql/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "kwsql/error.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

const char* ablation_mode_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::LlmOnly: return "llm_only";
    case AblationMode::DankeOnly: return "danke_only";
    case AblationMode::LlmDfe: return "llm_dfe";
    case AblationMode::LlmDanke: return "llm_danke";
    case AblationMode::LlmDfeDanke: return "llm_dfe_danke";
    case AblationMode::Complete: return "complete";
  }
  return "complete";
}

AblationMode ablation_mode_from_name(const std::string& name) {
  static const std::pair<const char*, AblationMode> table[] = {
      {"llm_only", AblationMode::LlmOnly},
      {"danke_only", AblationMode::DankeOnly},
      {"llm_dfe", AblationMode::LlmDfe},
      {"llm_danke", AblationMode::LlmDanke},
      {"llm_dfe_danke", AblationMode::LlmDfeDanke},
      {"complete", AblationMode::Complete},
  };
  for (const auto& [n, m] : table)
    if (name == n) return m;
  throw Error("config", "unknown ablation mode '" + name + "'");
}

std::vector<std::string> split_keywords(const std::string& question) {
  std::vector<std::string> out;
  std::string current;
  char quote = 0;
  for (char c : question) {
    if (quote) {
      if (c == quote) {
        if (!current.empty()) out.push_back(current);
        current.clear();
        quote = 0;
      } else {
        current += c;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      if (!current.empty()) out.push_back(current);
      current.clear();
      quote = c;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(current);
      current.clear();
      continue;
    }
    if (c == ',' || c == '?' || c == '!' || c == ';') {
      if (!current.empty()) out.push_back(current);
      current.clear();
      continue;
    }
    current += c;
  }
  if (!current.empty()) out.push_back(current);
  // Trailing sentence punctuation.
  for (auto& k : out)
    while (!k.empty() && (k.back() == '.' || k.back() == ':')) k.pop_back();
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const std::string& s) { return s.empty(); }),
            out.end());
  return out;
}

std::string render_schema_listing(const RelationalSchema& schema) {
  std::string out;
  for (const auto& t : schema.tables) {
    out += t.name + "(";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ", ";
      out += t.columns[i].name;
      if (t.columns[i].is_primary_key) out += " [PK]";
    }
    out += ")\n";
  }
  return out;
}

std::string render_match_set(const KeywordDictionary& dict, const MatchSet& ms) {
  if (ms.matches.empty() && ms.unmatched.empty()) return "(none)";
  std::string out;
  char score[16];
  for (const auto& m : ms.matches) {
    const DictionaryEntry& e = dict.entry(m.entry_index);
    std::snprintf(score, sizeof(score), "%.2f", m.score);
    out += "- '" + m.keyword + "' -> ";
    switch (e.kind) {
      case EntryKind::Table: out += "table " + e.table; break;
      case EntryKind::Column: out += "column " + e.table + "." + e.column; break;
      case EntryKind::Value:
        out += "value '" + e.value + "' in " + e.table + "." + e.column;
        break;
    }
    out += " (";
    out += match_class_name(m.match_class);
    out += ", ";
    out += score;
    out += ")\n";
  }
  for (const auto& u : ms.unmatched) out += "- '" + u + "' -> no match\n";
  return out;
}

std::string render_question_tables(
    const std::vector<std::pair<std::string, std::set<std::string>>>& pairs) {
  if (pairs.empty()) return "(none)";
  std::string out;
  for (const auto& [q, tables] : pairs) {
    out += "- \"" + q + "\" -> [";
    bool first = true;
    for (const auto& t : tables) {
      if (!first) out += ", ";
      first = false;
      out += t;
    }
    out += "]\n";
  }
  return out;
}

std::string render_example_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) return "(none)";
  std::string out;
  for (const auto& [q, sql] : pairs) {
    out += "Q: " + q + "\nSQL: " + sql + "\n";
  }
  return out;
}

std::string render_row_samples(const ResultTable& rows) {
  if (rows.columns.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < rows.columns.size(); ++i) {
    if (i) out += " | ";
    out += rows.columns[i];
  }
  out += "\n";
  for (const auto& row : rows.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += " | ";
      out += cell_to_string(row[i]);
    }
    out += "\n";
  }
  return out;
}

namespace {

std::string llm_call(PipelineDeps& deps, Trace& trace, PromptKind kind,
                     const PromptContext& ctx, const CallParams& params = {}) {
  std::vector<ChatMessage> messages = deps.templates->build_prompt(kind, ctx);
  std::string response;
  try {
    response = deps.gateway->complete(kind, messages, params);
  } catch (const Error& e) {
    // Backend failures carry the call site they interrupted.
    std::string name = prompt_kind_name(kind);
    if (std::string(e.what()).find(name) != std::string::npos) throw;
    throw Error(e.step(), name + ": " + e.what(), e.raw());
  }
  trace.record(prompt_kind_name(kind), join_messages(messages), response);
  return response;
}

// DFE pairs (question, FROM tables) for the schema-linking prompt.
std::vector<std::pair<std::string, std::set<std::string>>> dfe_question_tables(
    const std::string& question, PipelineDeps& deps, Trace& trace) {
  std::vector<ExamplePair> similar =
      deps.store->retrieve_similar(question, static_cast<std::size_t>(deps.k));
  std::vector<std::pair<std::string, std::set<std::string>>> pairs;
  for (const auto& ex : similar) pairs.emplace_back(ex.question, ex.tables);
  trace.record("dfe_retrieval", question,
               std::to_string(pairs.size()) + " examples");
  return pairs;
}

// Keeps only names that exist in the schema; unknown names get a warning.
std::vector<std::string> keep_known_tables(const std::vector<std::string>& names,
                                           const RelationalSchema& schema,
                                           Trace& trace) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& n : names) {
    const TableDef* t = schema.find_table(n);
    if (!t) {
      trace.warn("schema_linking", "dropped unknown table '" + n + "'");
      continue;
    }
    if (seen.insert(to_lower(t->name)).second) out.push_back(t->name);
  }
  return out;
}

std::vector<std::string> linked_tables_from_llm(
    const std::string& question, PipelineDeps& deps, Trace& trace,
    const std::string& matches_text, const std::string& examples_text) {
  std::string response =
      llm_call(deps, trace, PromptKind::SchemaLinking,
               {{"question", question},
                {"schema", render_schema_listing(*deps.schema)},
                {"matches", matches_text},
                {"examples", examples_text}});
  return keep_known_tables(parse_string_array(response), *deps.schema, trace);
}

MatchSet match_for(const std::vector<std::string>& keywords,
                   PipelineDeps& deps, Trace& trace) {
  MatchSet ms = deps.dictionary->match_keywords(keywords);
  trace.record("keyword_matching", join_messages({}),
               std::to_string(ms.matches.size()) + " matched, " +
                   std::to_string(ms.unmatched.size()) + " unmatched");
  return ms;
}

std::vector<std::string> ordered_tables_of(const KeywordDictionary& dict,
                                           const MatchSet& ms) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& m : ms.matches) {
    const std::string& t = dict.entry(m.entry_index).table;
    if (seen.insert(to_lower(t)).second) out.push_back(t);
  }
  return out;
}

} // namespace

std::vector<std::string> extract_keywords(const std::string& question,
                                          PipelineDeps& deps, Trace& trace) {
  if (trim(question).empty())
    throw Error("validation", "question is empty");
  std::string response = llm_call(deps, trace, PromptKind::KeywordExtraction,
                                  {{"question", question}});
  std::vector<std::string> keywords = parse_string_array(response);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& k : keywords)
    if (seen.insert(k).second) out.push_back(k);
  return out;
}

LinkResult schema_link(const std::string& question, AblationMode mode,
                       PipelineDeps& deps) {
  LinkResult result{{}, {}, Trace(deps.verbose_trace)};
  Trace& trace = result.trace;

  switch (mode) {
    case AblationMode::LlmOnly: {
      result.tables =
          linked_tables_from_llm(question, deps, trace, "(none)", "(none)");
      break;
    }
    case AblationMode::DankeOnly: {
      result.matches = match_for(split_keywords(question), deps, trace);
      result.tables = ordered_tables_of(*deps.dictionary, result.matches);
      break;
    }
    case AblationMode::LlmDfe: {
      auto pairs = dfe_question_tables(question, deps, trace);
      result.tables = linked_tables_from_llm(question, deps, trace, "(none)",
                                             render_question_tables(pairs));
      break;
    }
    case AblationMode::LlmDanke: {
      std::vector<std::string> keywords = extract_keywords(question, deps, trace);
      result.matches = match_for(keywords, deps, trace);
      result.tables = ordered_tables_of(*deps.dictionary, result.matches);
      break;
    }
    case AblationMode::LlmDfeDanke:
    case AblationMode::Complete: {
      std::vector<std::string> keywords = extract_keywords(question, deps, trace);
      result.matches = match_for(keywords, deps, trace);
      auto pairs = dfe_question_tables(question, deps, trace);
      result.tables = linked_tables_from_llm(
          question, deps, trace,
          render_match_set(*deps.dictionary, result.matches),
          render_question_tables(pairs));
      break;
    }
  }
  return result;
}

std::vector<std::string> decompose(const std::string& question,
                                   PipelineDeps& deps, Trace& trace) {
  if (trim(question).empty())
    throw Error("validation", "question is empty");
  std::string response = llm_call(deps, trace, PromptKind::QuestionDecomposition,
                                  {{"question", question}});
  std::vector<std::string> subs = parse_string_array(response);
  if (subs.empty()) {
    trace.warn("question_decomposition",
               "empty decomposition repaired to the original question");
    subs.push_back(question);
  }
  if (subs.size() > static_cast<std::size_t>(deps.max_sub_questions)) {
    trace.warn("question_decomposition",
               "truncated to " + std::to_string(deps.max_sub_questions) +
                   " sub-questions");
    subs.resize(static_cast<std::size_t>(deps.max_sub_questions));
  }
  return subs;
}

CompilationResult compile_question(const std::string& question,
                                   const LinkResult& link, PipelineDeps& deps) {
  if (link.tables.empty())
    throw Error("validation", "schema linking produced no tables");

  CompilationResult result;
  result.trace = Trace(deps.verbose_trace);
  Trace& trace = result.trace;

  // View synthesis over the linked tables.
  result.view =
      synthesize_view(*deps.schema, link.tables, "", deps.view_options);
  trace.record("view_synthesis", join_messages({}), result.view.to_json());

  // Question decomposition, then per-sub-question retrieval with p = ceil(k/m).
  result.sub_questions = decompose(question, deps, trace);
  std::size_t m = result.sub_questions.size();
  std::size_t k = static_cast<std::size_t>(deps.k);
  std::size_t p = (k + m - 1) / m;
  std::set<std::string> filter(link.tables.begin(), link.tables.end());
  std::vector<std::vector<ExamplePair>> lists;
  for (const auto& sub : result.sub_questions)
    lists.push_back(deps.store->retrieve_similar(sub, p, filter));
  std::vector<ExamplePair> retained = intercalate(lists, k);

  // FROM rewriting of the retained examples.
  std::vector<std::pair<std::string, std::string>> rewritten;
  for (const auto& ex : retained) {
    std::vector<std::string> warnings;
    std::string sql = rewrite_from_clause(ex.sql, result.view, &warnings);
    for (const auto& w : warnings) trace.warn("from_rewriting", ex.id + ": " + w);
    rewritten.emplace_back(ex.question, sql);
    result.examples_used.push_back(ex.id);
  }
  trace.record("dfe_rewriting", question,
               std::to_string(rewritten.size()) + " examples");

  // Row samples from the view, primary-key order.
  ResultTable samples;
  if (deps.exec) {
    std::string sample_sql =
        "SELECT * FROM (" + render_view_select(result.view) + ") " +
        quote_identifier_if_needed(result.view.name) + " ORDER BY " +
        result.view.projected_columns.front().output_name + " LIMIT " +
        std::to_string(deps.row_sample_count);
    try {
      samples = deps.exec->execute(sample_sql);
    } catch (const Error& e) {
      trace.warn("row_samples", std::string("sampling failed: ") + e.what());
    }
  } else {
    trace.warn("row_samples", "no execution backend; continuing without rows");
  }

  // SQL compilation prompt; one re-ask on a malformed or off-view answer.
  PromptContext ctx{{"question", question},
                    {"view_ddl", render_view_ddl(result.view)},
                    {"matches", render_match_set(*deps.dictionary, link.matches)},
                    {"row_samples", render_row_samples(samples)},
                    {"examples", render_example_pairs(rewritten)}};
  auto try_compile = [&](const PromptContext& c) {
    std::string response =
        llm_call(deps, trace, PromptKind::SqlCompilation, c);
    std::string sql = parse_fenced_sql(response);
    std::set<std::string> used = from_tables(sql);
    if (used.size() != 1 || !ci_equal(*used.begin(), result.view.name))
      throw Error("validation",
                  "compiled SQL is not over the view '" + result.view.name + "'",
                  sql);
    return sql;
  };
  try {
    result.sql_over_view = try_compile(ctx);
  } catch (const Error& e) {
    if (e.step() != "parse" && e.step() != "validation") throw;
    trace.warn("sql_compilation",
               std::string("re-asking after invalid answer: ") + e.what());
    PromptContext retry = ctx;
    retry["question"] +=
        "\nReturn only one SQL statement over " + result.view.name +
        ", in a fenced sql block.";
    result.sql_over_view = try_compile(retry);
  }

  result.sql_over_base = inline_view(result.sql_over_view, result.view);
  trace.record("view_inlining", result.sql_over_view, result.sql_over_base);
  return result;
}

CompilationResult answer(const std::string& question, AblationMode mode,
                         PipelineDeps& deps) {
  LinkResult link = schema_link(question, mode, deps);
  CompilationResult result = compile_question(question, link, deps);
  Trace merged(deps.verbose_trace);
  merged.append(link.trace);
  merged.append(result.trace);
  result.trace = merged;
  return result;
}

} // namespace kwsql
