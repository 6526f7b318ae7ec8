#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kwsql {

enum class DataType { String, Integer, Decimal, Date, Timestamp, Boolean };

const char* data_type_name(DataType t);       // "string", "integer", ...
const char* data_type_sql(DataType t);        // "TEXT", "INTEGER", ...
DataType data_type_from_name(const std::string& name);

struct ColumnDef {
  std::string name;
  DataType data_type = DataType::String;
  bool is_primary_key = false;
  bool is_indexed_for_values = false;
  std::string description;
  std::vector<std::string> synonyms;
  double selection_weight = 1.0;
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
  std::string description;
  std::vector<std::string> synonyms;
  double selection_weight = 1.0;

  const ColumnDef* find_column(const std::string& name) const;
  const ColumnDef* primary_key() const; // first declared PK column, if any
};

struct ForeignKey {
  std::string from_table;
  std::string to_table;
  std::vector<std::pair<std::string, std::string>> column_pairs; // (from, to)
};

class RelationalSchema {
public:
  std::vector<TableDef> tables;
  std::vector<ForeignKey> foreign_keys;

  const TableDef* find_table(const std::string& name) const;
  const TableDef& table_or_throw(const std::string& name) const;

  // Checks every invariant (unique names, resolvable FKs, ...) and throws a
  // validation Error naming the first violation.
  void validate() const;

  bool operator==(const RelationalSchema&) const = default;
};

bool operator==(const ColumnDef&, const ColumnDef&);
bool operator==(const TableDef&, const TableDef&);
bool operator==(const ForeignKey&, const ForeignKey&);

// Schema JSON document (see README for the format).
RelationalSchema load_schema(const std::string& json_text);
RelationalSchema load_schema_file(const std::string& path);
std::string serialize_schema(const RelationalSchema& schema);

// One CREATE TABLE statement per requested table, schema declaration order,
// restricted to the requested columns. The only constraint emitted is the
// PRIMARY KEY marker.
std::string render_ddl(const RelationalSchema& schema,
                       const std::vector<std::string>& tables,
                       const std::map<std::string, std::set<std::string>>& columns);

// All columns of the listed tables.
std::string render_full_ddl(const RelationalSchema& schema,
                            const std::vector<std::string>& tables);

} // namespace kwsql
