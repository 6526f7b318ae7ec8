#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace kwsql {

// Shallow SQL analysis for the supported subset: a single SELECT with
// optional WHERE / GROUP BY / HAVING / ORDER BY / LIMIT, INNER JOIN ... ON,
// derived tables, and scalar/aggregate expressions. No CTEs, set operators,
// or window functions. This is a tokenizer plus a clause tracker, not a
// grammar.

enum class SqlTokenType { Identifier, QuotedIdentifier, String, Number, Punct };

struct SqlToken {
  SqlTokenType type;
  std::string text;   // unquoted value for identifiers, raw text otherwise
  std::size_t begin;  // byte offsets into the original statement
  std::size_t end;
};

std::vector<SqlToken> tokenize_sql(const std::string& sql);

// True when the token is an identifier (quoted or not) spelling `word`
// case-insensitively. Quoted identifiers never count as keywords.
bool is_keyword(const SqlToken& tok, const char* word);

// Throws a parse Error when the statement is empty, is not a single SELECT,
// or uses a construct outside the supported subset.
void ensure_supported_select(const std::string& sql);

// Tables named in FROM and JOIN clauses at any nesting depth. Aliases are
// excluded; derived tables contribute the tables of their inner SELECT.
std::set<std::string> from_tables(const std::string& sql);

// A direct table reference in some FROM/JOIN clause.
struct TableRefSpan {
  std::string table;
  std::string alias;       // empty when none
  std::size_t token_index; // index of the table-name token
  std::size_t begin;       // byte span of the table-name token
  std::size_t end;
  bool top_level;          // paren depth 0
};

std::vector<TableRefSpan> table_ref_spans(const std::string& sql);

// Byte span [begin, end) of the outermost FROM block: from the FROM keyword
// up to the next top-level clause keyword (WHERE, GROUP, HAVING, ORDER,
// LIMIT, FETCH, OFFSET) or end of statement. Returns false when the
// statement has no top-level FROM.
bool top_level_from_span(const std::string& sql, std::size_t& begin,
                         std::size_t& end);

bool has_order_by(const std::string& sql);

// Difficulty-classification construct count: GROUP BY + ORDER BY + set
// operators + nested sub-selects + aggregates beyond the first + LIMIT/FETCH
// clauses + one extra point when more than two columns are selected.
int count_sql_constructs(const std::string& sql);

// Double-quotes `name` when it collides with a reserved word or contains
// characters outside [A-Za-z0-9_].
std::string quote_identifier_if_needed(const std::string& name);

} // namespace kwsql
