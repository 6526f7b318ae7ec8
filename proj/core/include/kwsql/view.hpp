#pragma once

#include <string>
#include <vector>

#include "kwsql/schema.hpp"
#include "kwsql/steiner.hpp"

namespace kwsql {

struct ViewColumn {
  std::string alias;         // base-table alias inside the view body
  std::string source_column;
  std::string output_name;   // "<Label>_<column>"
  DataType data_type = DataType::String;
};

struct JoinPair {
  std::string left;  // "<alias>.<column>", side already in the join chain
  std::string right; // newly attached side
};

// The single equijoin view V: no filters, no grouping, no ordering. One join
// group per Steiner-tree edge; every column of every base table projected.
struct ViewDefinition {
  std::string name;
  std::vector<std::pair<std::string, std::string>> base_tables; // (table, alias)
  std::vector<std::vector<JoinPair>> join_conditions;
  std::vector<ViewColumn> projected_columns;

  const std::string* alias_of(const std::string& table) const;
  const std::string* table_of_alias(const std::string& alias) const;
  // Output column for (base table, source column), nullptr when unknown.
  const ViewColumn* find_output(const std::string& table,
                                const std::string& column) const;

  std::string to_json() const;
};

struct ViewOptions {
  // Prefixes stripped (case-insensitively) from table names when forming
  // column-alias labels and the default view name.
  std::vector<std::string> strip_prefixes{"Maintenance_"};
};

// Table-name label after prefix stripping, first letter uppercased.
std::string view_label(const std::string& table, const ViewOptions& opts);

ViewDefinition synthesize_view(const RelationalSchema& schema,
                               const std::vector<std::string>& terminals,
                               const std::string& name = "",
                               const ViewOptions& opts = {});

// "CREATE VIEW <name> AS <select body>".
std::string render_view_sql(const ViewDefinition& view);

// The SELECT body alone (used for derived-table inlining and row samples).
std::string render_view_select(const ViewDefinition& view);

// The view presented as a table in DDL form for prompt context.
std::string render_view_ddl(const ViewDefinition& view);

// Rewrites a query over the view into an equivalent query over base tables
// by substituting every reference to the view with its defining SELECT as a
// parenthesized derived table. The query may reference nothing but the view.
std::string inline_view(const std::string& sql, const ViewDefinition& view);

} // namespace kwsql
