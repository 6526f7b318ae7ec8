#include "kwsql/example_store.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

using nlohmann::json;

ExampleStore::ExampleStore(std::size_t dimension)
    : embedder_(default_embedder(dimension)), dimension_(dimension) {}

ExampleStore::ExampleStore(EmbedFn embedder, std::size_t dimension)
    : embedder_(std::move(embedder)), dimension_(dimension) {}

void ExampleStore::add(const std::string& id, const std::string& question,
                       const std::string& sql) {
  ExamplePair pair;
  pair.id = id;
  pair.question = question;
  pair.sql = sql;
  pair.tables = from_tables(sql);
  examples_.push_back(std::move(pair));
  vectors_.push_back(embedder_(question));
}

std::vector<ExamplePair> ExampleStore::retrieve_similar(
    const std::string& question, std::size_t k,
    const std::optional<std::set<std::string>>& table_filter) const {
  std::set<std::string> filter_lower;
  if (table_filter)
    for (const auto& t : *table_filter) filter_lower.insert(to_lower(t));

  EmbeddingVector qv = embedder_(question);
  struct Hit {
    double score;
    std::size_t index;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    if (table_filter) {
      bool subset = true;
      for (const auto& t : examples_[i].tables)
        if (!filter_lower.count(to_lower(t))) {
          subset = false;
          break;
        }
      if (!subset) continue;
    }
    hits.push_back({cosine(qv, vectors_[i]), i});
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return examples_[a.index].id < examples_[b.index].id;
  });
  std::vector<ExamplePair> out;
  for (const auto& h : hits) {
    if (out.size() >= k) break;
    out.push_back(examples_[h.index]);
  }
  return out;
}

void ExampleStore::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("config", "cannot write examples file '" + path + "'");
  for (const auto& e : examples_) {
    json j{{"id", e.id}, {"question", e.question}, {"sql", e.sql}};
    out << j.dump() << "\n";
  }
}

ExampleStore ExampleStore::load_file(const std::string& path,
                                     std::size_t dimension) {
  return load_file(path, default_embedder(dimension), dimension);
}

ExampleStore ExampleStore::load_file(const std::string& path, EmbedFn embedder,
                                     std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open examples file '" + path + "'");
  ExampleStore store(std::move(embedder), dimension);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      store.add(j.at("id").get<std::string>(),
                j.at("question").get<std::string>(),
                j.at("sql").get<std::string>());
    } catch (const json::exception& e) {
      throw Error("parse", "examples file line " + std::to_string(lineno) +
                               ": " + e.what());
    } catch (const Error& e) {
      throw Error("parse", "examples file line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return store;
}

std::vector<ExamplePair> intercalate(
    const std::vector<std::vector<ExamplePair>>& lists, std::size_t k) {
  if (lists.empty())
    throw Error("validation", "intercalate requires at least one list");
  std::size_t longest = 0;
  for (const auto& l : lists) longest = std::max(longest, l.size());
  std::vector<ExamplePair> out;
  std::set<std::string> seen;
  for (std::size_t round = 0; round < longest && out.size() < k; ++round) {
    for (const auto& l : lists) {
      if (round >= l.size()) continue;
      if (!seen.insert(l[round].id).second) continue;
      out.push_back(l[round]);
      if (out.size() >= k) break;
    }
  }
  return out;
}

std::string rewrite_from_clause(const std::string& sql,
                                const ViewDefinition& view,
                                std::vector<std::string>* warnings) {
  std::vector<SqlToken> toks = tokenize_sql(sql);
  std::vector<TableRefSpan> refs = table_ref_spans(sql);

  // Already over the view: idempotent.
  bool only_view = !refs.empty();
  for (const auto& ref : refs)
    if (!ci_equal(ref.table, view.name)) only_view = false;
  if (only_view) return sql;

  std::size_t from_begin = 0, from_end = 0;
  if (!top_level_from_span(sql, from_begin, from_end))
    throw Error("parse", "statement has no FROM clause to rewrite");

  // Qualifier -> base table, from the original statement's references.
  std::map<std::string, std::string> alias_to_table;
  for (const auto& ref : refs) {
    alias_to_table[to_lower(ref.table)] = ref.table;
    if (!ref.alias.empty()) alias_to_table[to_lower(ref.alias)] = ref.table;
  }

  // Tables of the original FROM, for resolving unqualified columns.
  std::vector<std::string> original_tables;
  for (const auto& ref : refs) original_tables.push_back(ref.table);

  struct Replacement {
    std::size_t begin;
    std::size_t end;
    std::string text;
  };
  std::vector<Replacement> reps;
  reps.push_back({from_begin, from_end,
                  "FROM " + quote_identifier_if_needed(view.name) +
                      (from_end < sql.size() ? " " : "")});

  auto inside_from = [&](std::size_t pos) {
    return pos >= from_begin && pos < from_end;
  };

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const SqlToken& t = toks[i];
    if (inside_from(t.begin)) continue;
    bool is_name = t.type == SqlTokenType::Identifier ||
                   t.type == SqlTokenType::QuotedIdentifier;
    if (!is_name) continue;
    bool qualifier = i + 2 < toks.size() &&
                     toks[i + 1].type == SqlTokenType::Punct &&
                     toks[i + 1].text == "." &&
                     (toks[i + 2].type == SqlTokenType::Identifier ||
                      toks[i + 2].type == SqlTokenType::QuotedIdentifier);
    if (qualifier) {
      auto it = alias_to_table.find(to_lower(t.text));
      if (it == alias_to_table.end()) {
        if (warnings)
          warnings->push_back("unmapped qualifier '" + t.text + "' preserved");
        ++i; // skip the dot; the column token is handled when reached
        continue;
      }
      const ViewColumn* out = view.find_output(it->second, toks[i + 2].text);
      if (!out) {
        if (warnings)
          warnings->push_back("no view column for '" + t.text + "." +
                              toks[i + 2].text + "'");
        i += 2;
        continue;
      }
      reps.push_back({t.begin, toks[i + 2].end, out->output_name});
      i += 2;
      continue;
    }
    // Unqualified reference: rewrite when exactly one original table has the
    // column. Skip alias definitions (immediately after AS) and call names.
    if (i > 0 && is_keyword(toks[i - 1], "as")) continue;
    if (i > 0 && toks[i - 1].type == SqlTokenType::Punct &&
        toks[i - 1].text == ".")
      continue;
    if (i + 1 < toks.size() && toks[i + 1].type == SqlTokenType::Punct &&
        toks[i + 1].text == "(")
      continue;
    const ViewColumn* found = nullptr;
    bool ambiguous = false;
    for (const auto& table : original_tables) {
      if (const ViewColumn* out = view.find_output(table, t.text)) {
        if (found && found != out) ambiguous = true;
        found = out;
      }
    }
    if (found && !ambiguous) {
      if (!ci_equal(t.text, found->output_name))
        reps.push_back({t.begin, t.end, found->output_name});
    } else if (ambiguous && warnings) {
      warnings->push_back("ambiguous column '" + t.text + "' preserved");
    }
  }

  std::sort(reps.begin(), reps.end(),
            [](const Replacement& a, const Replacement& b) {
              return a.begin < b.begin;
            });
  std::string out;
  std::size_t cursor = 0;
  for (const auto& r : reps) {
    if (r.begin < cursor) continue; // overlaps the FROM replacement
    out += sql.substr(cursor, r.begin - cursor);
    out += r.text;
    cursor = r.end;
  }
  out += sql.substr(cursor);
  return out;
}

} // namespace kwsql
