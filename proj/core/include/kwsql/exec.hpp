#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "kwsql/schema.hpp"

struct sqlite3;

namespace kwsql {

using CellValue = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CellValue>> rows;
};

std::string cell_to_string(const CellValue& v);

class ExecutionBackend {
public:
  virtual ~ExecutionBackend() = default;
  // Throws an execution Error on engine failures; callers that need the
  // captured-verdict behavior catch it.
  virtual ResultTable execute(const std::string& sql) = 0;
};

// Embedded SQLite engine. One connection, internally serialized, so shared
// use from the evaluation harness's worker threads is safe.
class SqliteBackend : public ExecutionBackend {
public:
  explicit SqliteBackend(const std::string& path); // ":memory:" works
  ~SqliteBackend() override;
  SqliteBackend(const SqliteBackend&) = delete;
  SqliteBackend& operator=(const SqliteBackend&) = delete;

  ResultTable execute(const std::string& sql) override;

  // Runs a multi-statement script (fixture seeding).
  void execute_script(const std::string& script);

  // Creates the schema's tables (empty) in the connected database.
  void create_tables(const RelationalSchema& schema);

private:
  sqlite3* db_ = nullptr;
  std::mutex mutex_;
};

// Deterministic per-column sample values for prompt context.
class ValueSampler {
public:
  virtual ~ValueSampler() = default;
  virtual std::vector<std::string> sample_values(const std::string& table,
                                                 const std::string& column,
                                                 std::size_t limit) = 0;
};

// Samples through the execution backend: rows in primary-key order,
// distinct values kept in first-seen order.
class BackendValueSampler : public ValueSampler {
public:
  BackendValueSampler(ExecutionBackend& backend, const RelationalSchema& schema)
      : backend_(backend), schema_(schema) {}

  std::vector<std::string> sample_values(const std::string& table,
                                         const std::string& column,
                                         std::size_t limit) override;

private:
  ExecutionBackend& backend_;
  const RelationalSchema& schema_;
};

} // namespace kwsql
