#include "kwsql/sql_text.hpp"

#include <algorithm>
#include <map>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '$' || c == '#';
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words{
      "select", "from", "where", "group", "having", "order", "by", "limit",
      "fetch", "offset", "join", "inner", "left", "right", "full", "cross",
      "on", "using", "as", "and", "or", "not", "in", "is", "null", "like",
      "between", "case", "when", "then", "else", "end", "union", "intersect",
      "except", "distinct", "all", "exists", "view", "table", "values",
      "index", "create", "insert", "update", "delete"};
  return words;
}

} // namespace

std::vector<SqlToken> tokenize_sql(const std::string& sql) {
  std::vector<SqlToken> out;
  std::size_t i = 0, n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
      std::size_t close = sql.find("*/", i + 2);
      if (close == std::string::npos)
        throw Error("parse", "unterminated comment");
      i = close + 2;
      continue;
    }
    std::size_t begin = i;
    if (c == '\'') {
      std::string value;
      ++i;
      while (true) {
        if (i >= n) throw Error("parse", "unterminated string literal");
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {
            value += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        value += sql[i++];
      }
      out.push_back({SqlTokenType::String, value, begin, i});
      continue;
    }
    if (c == '"' || c == '`') {
      char quote = c;
      std::string value;
      ++i;
      while (i < n && sql[i] != quote) value += sql[i++];
      if (i >= n) throw Error("parse", "unterminated quoted identifier");
      ++i;
      out.push_back({SqlTokenType::QuotedIdentifier, value, begin, i});
      continue;
    }
    if (ident_start(c)) {
      while (i < n && ident_char(sql[i])) ++i;
      out.push_back({SqlTokenType::Identifier, sql.substr(begin, i - begin),
                     begin, i});
      continue;
    }
    if ((c >= '0' && c <= '9') ||
        (c == '.' && i + 1 < n && sql[i + 1] >= '0' && sql[i + 1] <= '9')) {
      while (i < n && ((sql[i] >= '0' && sql[i] <= '9') || sql[i] == '.' ||
                       sql[i] == 'e' || sql[i] == 'E' ||
                       ((sql[i] == '+' || sql[i] == '-') && i > begin &&
                        (sql[i - 1] == 'e' || sql[i - 1] == 'E'))))
        ++i;
      out.push_back({SqlTokenType::Number, sql.substr(begin, i - begin),
                     begin, i});
      continue;
    }
    // Two-character operators, then single punctuation.
    if (i + 1 < n) {
      std::string two = sql.substr(i, 2);
      if (two == "<=" || two == ">=" || two == "<>" || two == "!=" ||
          two == "||") {
        out.push_back({SqlTokenType::Punct, two, begin, i + 2});
        i += 2;
        continue;
      }
    }
    out.push_back({SqlTokenType::Punct, std::string(1, c), begin, i + 1});
    ++i;
  }
  return out;
}

bool is_keyword(const SqlToken& tok, const char* word) {
  return tok.type == SqlTokenType::Identifier && ci_equal(tok.text, word);
}

namespace {

// Strips trailing semicolons; rejects anything after them.
std::vector<SqlToken> tokens_of_statement(const std::string& sql) {
  std::vector<SqlToken> toks = tokenize_sql(sql);
  while (!toks.empty() && toks.back().type == SqlTokenType::Punct &&
         toks.back().text == ";")
    toks.pop_back();
  for (const auto& t : toks)
    if (t.type == SqlTokenType::Punct && t.text == ";")
      throw Error("parse", "multiple statements are not supported");
  return toks;
}

std::size_t matching_paren(const std::vector<SqlToken>& toks, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (toks[i].type == SqlTokenType::Punct) {
      if (toks[i].text == "(") ++depth;
      if (toks[i].text == ")") {
        --depth;
        if (depth == 0) return i;
      }
    }
  }
  throw Error("parse", "unbalanced parentheses");
}

// True when toks[i] starts a clause. ORDER and GROUP only count with a
// following BY, so a table named Order still parses in table position.
bool clause_boundary(const std::vector<SqlToken>& toks, std::size_t i) {
  const SqlToken& t = toks[i];
  if (is_keyword(t, "where") || is_keyword(t, "having") ||
      is_keyword(t, "limit") || is_keyword(t, "fetch") ||
      is_keyword(t, "offset"))
    return true;
  if ((is_keyword(t, "group") || is_keyword(t, "order")) &&
      i + 1 < toks.size() && is_keyword(toks[i + 1], "by"))
    return true;
  return false;
}

bool is_join_related(const SqlToken& t) {
  static const char* kws[] = {"join", "inner", "left",  "right", "full",
                              "cross", "on",   "using", "as"};
  for (const char* k : kws)
    if (is_keyword(t, k)) return true;
  return false;
}

bool is_name_token(const SqlToken& t) {
  return t.type == SqlTokenType::Identifier ||
         t.type == SqlTokenType::QuotedIdentifier;
}

// Usable in table/alias position: a name that does not start a clause and is
// not join punctuation-by-keyword.
bool usable_name(const std::vector<SqlToken>& toks, std::size_t i) {
  if (i >= toks.size() || !is_name_token(toks[i])) return false;
  if (clause_boundary(toks, i) || is_join_related(toks[i])) return false;
  if (is_keyword(toks[i], "select") || is_keyword(toks[i], "union") ||
      is_keyword(toks[i], "intersect") || is_keyword(toks[i], "except"))
    return false;
  return true;
}

} // namespace

void ensure_supported_select(const std::string& sql) {
  std::vector<SqlToken> toks = tokens_of_statement(sql);
  if (toks.empty()) throw Error("parse", "empty SQL statement");
  if (is_keyword(toks[0], "with"))
    throw Error("parse", "CTEs (WITH) are not supported");
  if (!is_keyword(toks[0], "select"))
    throw Error("parse", "statement must be a single SELECT");
  int depth = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.type == SqlTokenType::Punct) {
      if (t.text == "(") ++depth;
      if (t.text == ")") {
        --depth;
        if (depth < 0) throw Error("parse", "unbalanced parentheses");
      }
      continue;
    }
    if (is_keyword(t, "union") || is_keyword(t, "intersect") ||
        is_keyword(t, "except"))
      throw Error("parse", "set operators are not supported");
    if (is_keyword(t, "over") && i + 1 < toks.size() &&
        toks[i + 1].type == SqlTokenType::Punct && toks[i + 1].text == "(")
      throw Error("parse", "window functions are not supported");
  }
  if (depth != 0) throw Error("parse", "unbalanced parentheses");
}

std::vector<TableRefSpan> table_ref_spans(const std::string& sql) {
  ensure_supported_select(sql);
  std::vector<SqlToken> toks = tokens_of_statement(sql);
  std::vector<TableRefSpan> refs;

  std::vector<int> depth_before(toks.size() + 1, 0);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    int d = depth_before[i];
    if (toks[i].type == SqlTokenType::Punct) {
      if (toks[i].text == "(") ++d;
      if (toks[i].text == ")") --d;
    }
    depth_before[i + 1] = d;
  }

  // Single pass; every FROM/JOIN token triggers one reference-list parse.
  // Derived tables are skipped by the list parse (their inner FROM tokens
  // are reached by the outer cursor later), so nothing is double-counted.
  for (std::size_t i = 0; i < toks.size(); ++i) {
    bool from_kw = is_keyword(toks[i], "from");
    bool join_kw = is_keyword(toks[i], "join");
    if (!from_kw && !join_kw) continue;
    bool comma_list = from_kw;
    std::size_t j = i + 1;
    while (j < toks.size()) {
      long parsed_ref = -1;
      if (toks[j].type == SqlTokenType::Punct && toks[j].text == "(") {
        j = matching_paren(toks, j) + 1;
      } else if (usable_name(toks, j)) {
        std::size_t name_tok = j;
        // Dotted names keep the last segment.
        while (j + 2 < toks.size() && toks[j + 1].type == SqlTokenType::Punct &&
               toks[j + 1].text == "." && is_name_token(toks[j + 2])) {
          j += 2;
          name_tok = j;
        }
        TableRefSpan ref;
        ref.table = toks[name_tok].text;
        ref.token_index = name_tok;
        ref.begin = toks[name_tok].begin;
        ref.end = toks[name_tok].end;
        ref.top_level = depth_before[name_tok] == 0;
        refs.push_back(std::move(ref));
        parsed_ref = static_cast<long>(refs.size()) - 1;
        ++j;
      } else {
        break;
      }
      // Optional alias.
      if (j < toks.size() && is_keyword(toks[j], "as")) ++j;
      if (usable_name(toks, j)) {
        if (parsed_ref >= 0) refs[parsed_ref].alias = toks[j].text;
        ++j;
      }
      if (comma_list && j < toks.size() &&
          toks[j].type == SqlTokenType::Punct && toks[j].text == ",") {
        ++j;
        continue;
      }
      break;
    }
  }
  return refs;
}

std::set<std::string> from_tables(const std::string& sql) {
  std::set<std::string> out;
  std::set<std::string> seen;
  for (const auto& ref : table_ref_spans(sql)) {
    if (seen.insert(to_lower(ref.table)).second) out.insert(ref.table);
  }
  return out;
}

bool top_level_from_span(const std::string& sql, std::size_t& begin,
                         std::size_t& end) {
  std::vector<SqlToken> toks = tokens_of_statement(sql);
  int depth = 0;
  std::size_t from_idx = toks.size();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.type == SqlTokenType::Punct) {
      if (t.text == "(") ++depth;
      if (t.text == ")") --depth;
      continue;
    }
    if (depth == 0 && is_keyword(t, "from")) {
      from_idx = i;
      break;
    }
  }
  if (from_idx == toks.size()) return false;
  begin = toks[from_idx].begin;
  end = sql.size();
  depth = 0;
  for (std::size_t i = from_idx + 1; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.type == SqlTokenType::Punct) {
      if (t.text == "(") ++depth;
      if (t.text == ")") --depth;
      continue;
    }
    if (depth == 0 && clause_boundary(toks, i)) {
      end = t.begin;
      break;
    }
  }
  return true;
}

bool has_order_by(const std::string& sql) {
  std::vector<SqlToken> toks = tokenize_sql(sql);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    if (is_keyword(toks[i], "order") && is_keyword(toks[i + 1], "by"))
      return true;
  return false;
}

int count_sql_constructs(const std::string& sql) {
  ensure_supported_select(sql);
  std::vector<SqlToken> toks = tokens_of_statement(sql);
  int group_by = 0, order_by = 0, set_ops = 0, aggregates = 0, limits = 0;
  static const char* agg_names[] = {"count", "sum", "avg", "min", "max",
                                    "total", "group_concat"};
  int selects = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (is_keyword(t, "group") && i + 1 < toks.size() &&
        is_keyword(toks[i + 1], "by"))
      ++group_by;
    else if (is_keyword(t, "order") && i + 1 < toks.size() &&
             is_keyword(toks[i + 1], "by"))
      ++order_by;
    else if (is_keyword(t, "union") || is_keyword(t, "intersect") ||
             is_keyword(t, "except"))
      ++set_ops;
    else if (is_keyword(t, "limit") || is_keyword(t, "fetch"))
      ++limits;
    else if (is_keyword(t, "select"))
      ++selects;
    else if (t.type == SqlTokenType::Identifier && i + 1 < toks.size() &&
             toks[i + 1].type == SqlTokenType::Punct &&
             toks[i + 1].text == "(") {
      for (const char* a : agg_names)
        if (ci_equal(t.text, a)) {
          ++aggregates;
          break;
        }
    }
  }
  int nested = std::max(0, selects - 1);

  // Top-level select-list arity: commas at depth zero before the top FROM.
  int depth = 0;
  int items = 1;
  bool star_only = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.type == SqlTokenType::Punct) {
      if (t.text == "(") ++depth;
      else if (t.text == ")") --depth;
      else if (t.text == "," && depth == 0) ++items;
      else if (t.text == "*" && depth == 0 && i == 1) star_only = true;
      continue;
    }
    if (depth == 0 && (is_keyword(t, "from") || clause_boundary(toks, i)))
      break;
  }
  int extra_columns = (!star_only && items > 2) ? 1 : 0;

  return group_by + order_by + set_ops + nested +
         std::max(0, aggregates - 1) + limits + extra_columns;
}

std::string quote_identifier_if_needed(const std::string& name) {
  bool plain = !name.empty() && ident_start(name[0]);
  for (char c : name)
    if (!ident_char(c)) plain = false;
  if (plain && !reserved_words().count(to_lower(name))) return name;
  return "\"" + name + "\"";
}

} // namespace kwsql
