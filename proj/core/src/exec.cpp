#include "kwsql/exec.hpp"

#include <sqlite3.h>

#include <set>

#include "kwsql/error.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

std::string cell_to_string(const CellValue& v) {
  if (std::holds_alternative<std::monostate>(v)) return "NULL";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", *d);
    return buf;
  }
  return std::get<std::string>(v);
}

SqliteBackend::SqliteBackend(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    if (db_) sqlite3_close(db_);
    throw Error("execution", "cannot open database '" + path + "': " + msg);
  }
}

SqliteBackend::~SqliteBackend() {
  if (db_) sqlite3_close(db_);
}

ResultTable SqliteBackend::execute(const std::string& sql) {
  std::lock_guard<std::mutex> lock(mutex_);
  sqlite3_stmt* stmt = nullptr;
  if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
    std::string msg = sqlite3_errmsg(db_);
    throw Error("execution", "query failed: " + msg);
  }
  ResultTable table;
  int cols = sqlite3_column_count(stmt);
  for (int c = 0; c < cols; ++c) {
    const char* name = sqlite3_column_name(stmt, c);
    table.columns.push_back(name ? name : "");
  }
  int rc;
  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    std::vector<CellValue> row;
    row.reserve(cols);
    for (int c = 0; c < cols; ++c) {
      switch (sqlite3_column_type(stmt, c)) {
        case SQLITE_NULL: row.emplace_back(std::monostate{}); break;
        case SQLITE_INTEGER:
          row.emplace_back(static_cast<std::int64_t>(
              sqlite3_column_int64(stmt, c)));
          break;
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(stmt, c)); break;
        default: {
          const unsigned char* text = sqlite3_column_text(stmt, c);
          row.emplace_back(std::string(text ? reinterpret_cast<const char*>(text)
                                            : ""));
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (rc != SQLITE_DONE) {
    std::string msg = sqlite3_errmsg(db_);
    sqlite3_finalize(stmt);
    throw Error("execution", "query failed: " + msg);
  }
  sqlite3_finalize(stmt);
  return table;
}

void SqliteBackend::execute_script(const std::string& script) {
  std::lock_guard<std::mutex> lock(mutex_);
  char* errmsg = nullptr;
  if (sqlite3_exec(db_, script.c_str(), nullptr, nullptr, &errmsg) != SQLITE_OK) {
    std::string msg = errmsg ? errmsg : "unknown error";
    sqlite3_free(errmsg);
    throw Error("execution", "script failed: " + msg);
  }
}

void SqliteBackend::create_tables(const RelationalSchema& schema) {
  for (const auto& t : schema.tables) {
    std::string stmt = "CREATE TABLE IF NOT EXISTS " +
                       quote_identifier_if_needed(t.name) + " (";
    bool first = true;
    for (const auto& c : t.columns) {
      if (!first) stmt += ", ";
      first = false;
      stmt += quote_identifier_if_needed(c.name);
      stmt += ' ';
      stmt += data_type_sql(c.data_type);
      if (c.is_primary_key) stmt += " PRIMARY KEY";
    }
    stmt += ");";
    execute_script(stmt);
  }
}

std::vector<std::string> BackendValueSampler::sample_values(
    const std::string& table, const std::string& column, std::size_t limit) {
  const TableDef& t = schema_.table_or_throw(table);
  const ColumnDef* col = t.find_column(column);
  if (!col)
    throw Error("validation", "unknown column '" + table + "." + column + "'");
  const ColumnDef* pk = t.primary_key();
  std::string sql = "SELECT " + quote_identifier_if_needed(col->name) +
                    " FROM " + quote_identifier_if_needed(t.name);
  if (pk) sql += " ORDER BY " + quote_identifier_if_needed(pk->name);
  ResultTable rows = backend_.execute(sql);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& row : rows.rows) {
    if (row.empty() || std::holds_alternative<std::monostate>(row[0])) continue;
    std::string v = cell_to_string(row[0]);
    if (!seen.insert(v).second) continue;
    out.push_back(v);
    if (out.size() >= limit) break;
  }
  return out;
}

} // namespace kwsql
