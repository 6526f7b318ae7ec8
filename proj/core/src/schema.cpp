#include "kwsql/schema.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

using nlohmann::json;

const char* data_type_name(DataType t) {
  switch (t) {
    case DataType::String: return "string";
    case DataType::Integer: return "integer";
    case DataType::Decimal: return "decimal";
    case DataType::Date: return "date";
    case DataType::Timestamp: return "timestamp";
    case DataType::Boolean: return "boolean";
  }
  return "string";
}

const char* data_type_sql(DataType t) {
  switch (t) {
    case DataType::String: return "TEXT";
    case DataType::Integer: return "INTEGER";
    case DataType::Decimal: return "DECIMAL";
    case DataType::Date: return "DATE";
    case DataType::Timestamp: return "TIMESTAMP";
    case DataType::Boolean: return "BOOLEAN";
  }
  return "TEXT";
}

DataType data_type_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "string" || n == "text" || n == "varchar") return DataType::String;
  if (n == "integer" || n == "int") return DataType::Integer;
  if (n == "decimal" || n == "number" || n == "float" || n == "double")
    return DataType::Decimal;
  if (n == "date") return DataType::Date;
  if (n == "timestamp" || n == "datetime") return DataType::Timestamp;
  if (n == "boolean" || n == "bool") return DataType::Boolean;
  throw Error("parse", "unknown column type '" + name + "'");
}

bool operator==(const ColumnDef& a, const ColumnDef& b) {
  return a.name == b.name && a.data_type == b.data_type &&
         a.is_primary_key == b.is_primary_key &&
         a.is_indexed_for_values == b.is_indexed_for_values &&
         a.description == b.description && a.synonyms == b.synonyms &&
         a.selection_weight == b.selection_weight;
}

bool operator==(const TableDef& a, const TableDef& b) {
  return a.name == b.name && a.columns == b.columns &&
         a.description == b.description && a.synonyms == b.synonyms &&
         a.selection_weight == b.selection_weight;
}

bool operator==(const ForeignKey& a, const ForeignKey& b) {
  return a.from_table == b.from_table && a.to_table == b.to_table &&
         a.column_pairs == b.column_pairs;
}

const ColumnDef* TableDef::find_column(const std::string& name) const {
  for (const auto& c : columns)
    if (ci_equal(c.name, name)) return &c;
  return nullptr;
}

const ColumnDef* TableDef::primary_key() const {
  for (const auto& c : columns)
    if (c.is_primary_key) return &c;
  return nullptr;
}

const TableDef* RelationalSchema::find_table(const std::string& name) const {
  for (const auto& t : tables)
    if (ci_equal(t.name, name)) return &t;
  return nullptr;
}

const TableDef& RelationalSchema::table_or_throw(const std::string& name) const {
  const TableDef* t = find_table(name);
  if (!t) throw Error("validation", "unknown table '" + name + "'");
  return *t;
}

namespace {

void check_no_duplicate_synonyms(const std::vector<std::string>& synonyms,
                                 const std::string& owner) {
  std::set<std::string> seen;
  for (const auto& s : synonyms) {
    if (!seen.insert(normalize_term(s)).second)
      throw Error("validation", "duplicate synonym '" + s + "' on " + owner);
  }
}

} // namespace

void RelationalSchema::validate() const {
  if (tables.empty()) throw Error("validation", "schema has no tables");
  std::set<std::string> names;
  for (const auto& t : tables) {
    if (t.name.empty()) throw Error("validation", "table with empty name");
    if (!names.insert(to_lower(t.name)).second)
      throw Error("validation", "duplicate table '" + t.name + "'");
    if (t.columns.empty())
      throw Error("validation", "table '" + t.name + "' has no columns");
    if (t.selection_weight < 0.0)
      throw Error("validation", "table '" + t.name + "' has negative weight");
    check_no_duplicate_synonyms(t.synonyms, "table " + t.name);
    std::set<std::string> colnames;
    for (const auto& c : t.columns) {
      if (c.name.empty())
        throw Error("validation", "empty column name in table '" + t.name + "'");
      if (!colnames.insert(to_lower(c.name)).second)
        throw Error("validation",
                    "duplicate column '" + c.name + "' in table '" + t.name + "'");
      if (c.selection_weight < 0.0)
        throw Error("validation", "column '" + t.name + "." + c.name +
                                      "' has negative weight");
      check_no_duplicate_synonyms(c.synonyms, t.name + "." + c.name);
    }
  }
  for (const auto& fk : foreign_keys) {
    const TableDef* from = find_table(fk.from_table);
    if (!from)
      throw Error("validation",
                  "foreign key references unknown table '" + fk.from_table + "'");
    const TableDef* to = find_table(fk.to_table);
    if (!to)
      throw Error("validation",
                  "foreign key references unknown table '" + fk.to_table + "'");
    if (fk.column_pairs.empty())
      throw Error("validation", "foreign key " + fk.from_table + "->" +
                                    fk.to_table + " has no column pairs");
    for (const auto& [fc, tc] : fk.column_pairs) {
      if (!from->find_column(fc))
        throw Error("validation", "foreign key references unknown column '" +
                                      fk.from_table + "." + fc + "'");
      if (!to->find_column(tc))
        throw Error("validation", "foreign key references unknown column '" +
                                      fk.to_table + "." + tc + "'");
    }
  }
}

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  }
  return out;
}

ColumnDef parse_column(const json& j) {
  ColumnDef c;
  c.name = j.at("name").get<std::string>();
  c.data_type = data_type_from_name(j.at("type").get<std::string>());
  c.is_primary_key = j.value("pk", false);
  c.is_indexed_for_values = j.value("indexed", false);
  c.description = j.value("description", std::string());
  c.synonyms = string_list(j, "synonyms");
  c.selection_weight = j.value("weight", 1.0);
  return c;
}

} // namespace

RelationalSchema load_schema(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error("parse", std::string("malformed schema document: ") + e.what());
  }
  RelationalSchema schema;
  try {
    for (const auto& jt : doc.at("tables")) {
      TableDef t;
      t.name = jt.at("name").get<std::string>();
      t.description = jt.value("description", std::string());
      t.synonyms = string_list(jt, "synonyms");
      t.selection_weight = jt.value("weight", 1.0);
      for (const auto& jc : jt.at("columns")) t.columns.push_back(parse_column(jc));
      schema.tables.push_back(std::move(t));
    }
    if (doc.contains("foreign_keys")) {
      for (const auto& jf : doc.at("foreign_keys")) {
        ForeignKey fk;
        fk.from_table = jf.at("from_table").get<std::string>();
        fk.to_table = jf.at("to_table").get<std::string>();
        for (const auto& jp : jf.at("columns"))
          fk.column_pairs.emplace_back(jp.at("from").get<std::string>(),
                                       jp.at("to").get<std::string>());
        schema.foreign_keys.push_back(std::move(fk));
      }
    }
  } catch (const json::exception& e) {
    throw Error("parse", std::string("malformed schema document: ") + e.what());
  }
  schema.validate();
  return schema;
}

RelationalSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_schema(ss.str());
}

std::string serialize_schema(const RelationalSchema& schema) {
  json tables = json::array();
  for (const auto& t : schema.tables) {
    json cols = json::array();
    for (const auto& c : t.columns) {
      cols.push_back({{"name", c.name},
                      {"type", data_type_name(c.data_type)},
                      {"pk", c.is_primary_key},
                      {"indexed", c.is_indexed_for_values},
                      {"description", c.description},
                      {"synonyms", c.synonyms},
                      {"weight", c.selection_weight}});
    }
    tables.push_back({{"name", t.name},
                      {"description", t.description},
                      {"synonyms", t.synonyms},
                      {"weight", t.selection_weight},
                      {"columns", cols}});
  }
  json fks = json::array();
  for (const auto& fk : schema.foreign_keys) {
    json pairs = json::array();
    for (const auto& [f, t] : fk.column_pairs)
      pairs.push_back({{"from", f}, {"to", t}});
    fks.push_back({{"from_table", fk.from_table},
                   {"to_table", fk.to_table},
                   {"columns", pairs}});
  }
  return json{{"tables", tables}, {"foreign_keys", fks}}.dump(2);
}

std::string render_ddl(const RelationalSchema& schema,
                       const std::vector<std::string>& tables,
                       const std::map<std::string, std::set<std::string>>& columns) {
  // Requested tables rendered in schema declaration order.
  std::set<std::string> wanted;
  for (const auto& t : tables) {
    schema.table_or_throw(t);
    wanted.insert(to_lower(t));
  }
  std::string out;
  for (const auto& t : schema.tables) {
    if (!wanted.count(to_lower(t.name))) continue;
    const std::set<std::string>* cols = nullptr;
    for (const auto& [name, set] : columns) {
      if (ci_equal(name, t.name)) {
        cols = &set;
        break;
      }
    }
    if (!cols || cols->empty())
      throw Error("validation", "no columns requested for table '" + t.name + "'");
    std::set<std::string> lower;
    for (const auto& c : *cols) {
      if (!t.find_column(c))
        throw Error("validation",
                    "unknown column '" + t.name + "." + c + "'");
      lower.insert(to_lower(c));
    }
    std::string stmt = "CREATE TABLE " + t.name + " (";
    bool first = true;
    for (const auto& c : t.columns) {
      if (!lower.count(to_lower(c.name))) continue;
      if (!first) stmt += ", ";
      first = false;
      stmt += c.name;
      stmt += ' ';
      stmt += data_type_sql(c.data_type);
      if (c.is_primary_key) stmt += " PRIMARY KEY";
    }
    stmt += ")";
    if (!out.empty()) out += "\n";
    out += stmt;
  }
  return out;
}

std::string render_full_ddl(const RelationalSchema& schema,
                            const std::vector<std::string>& tables) {
  std::map<std::string, std::set<std::string>> columns;
  for (const auto& name : tables) {
    const TableDef& t = schema.table_or_throw(name);
    std::set<std::string>& cols = columns[t.name];
    for (const auto& c : t.columns) cols.insert(c.name);
  }
  return render_ddl(schema, tables, columns);
}

} // namespace kwsql
