#include "kwsql/view.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/graph.hpp"
#include "kwsql/sql_text.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

const std::string* ViewDefinition::alias_of(const std::string& table) const {
  for (const auto& [t, a] : base_tables)
    if (ci_equal(t, table)) return &a;
  return nullptr;
}

const std::string* ViewDefinition::table_of_alias(const std::string& alias) const {
  for (const auto& [t, a] : base_tables)
    if (ci_equal(a, alias)) return &t;
  return nullptr;
}

const ViewColumn* ViewDefinition::find_output(const std::string& table,
                                              const std::string& column) const {
  const std::string* alias = alias_of(table);
  if (!alias) return nullptr;
  for (const auto& c : projected_columns)
    if (ci_equal(c.alias, *alias) && ci_equal(c.source_column, column))
      return &c;
  return nullptr;
}

std::string ViewDefinition::to_json() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& [t, a] : base_tables)
    tables.push_back({{"table", t}, {"alias", a}});
  nlohmann::json joins = nlohmann::json::array();
  for (const auto& group : join_conditions) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& p : group) g.push_back({{"left", p.left}, {"right", p.right}});
    joins.push_back(std::move(g));
  }
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : projected_columns)
    columns.push_back(
        {{"alias", c.alias}, {"column", c.source_column}, {"as", c.output_name}});
  return nlohmann::json{{"name", name},
                        {"tables", tables},
                        {"joins", joins},
                        {"columns", columns}}
      .dump();
}

std::string view_label(const std::string& table, const ViewOptions& opts) {
  std::string label = table;
  for (const auto& prefix : opts.strip_prefixes) {
    if (label.size() > prefix.size() &&
        ci_equal(label.substr(0, prefix.size()), prefix)) {
      label = label.substr(prefix.size());
      break;
    }
  }
  if (!label.empty() && label[0] >= 'a' && label[0] <= 'z')
    label[0] = static_cast<char>(label[0] - 'a' + 'A');
  return label;
}

ViewDefinition synthesize_view(const RelationalSchema& schema,
                               const std::vector<std::string>& terminals,
                               const std::string& name,
                               const ViewOptions& opts) {
  ReferentialGraph graph = ReferentialGraph::build(schema);
  SteinerTree tree = steiner_tree(graph, terminals);

  // Traversal: start at the first terminal, attach tree edges breadth-first,
  // neighbors in edge-key order. This fixes base-table order, join order,
  // and the default name.
  std::size_t start = graph.node_index(terminals.front());
  std::vector<std::size_t> sorted_edges = tree.edges;
  std::sort(sorted_edges.begin(), sorted_edges.end(),
            [&](std::size_t a, std::size_t b) {
              return graph.edge_sort_key(a) < graph.edge_sort_key(b);
            });

  std::vector<std::size_t> visit_order{start};
  struct Attach {
    std::size_t edge;
    std::size_t existing;
    std::size_t added;
  };
  std::vector<Attach> attaches;
  std::vector<bool> in_tree(graph.nodes().size(), false);
  in_tree[start] = true;
  std::vector<bool> edge_used(sorted_edges.size(), false);
  for (std::size_t round = 0; round < sorted_edges.size(); ++round) {
    bool progressed = false;
    for (std::size_t k = 0; k < sorted_edges.size(); ++k) {
      if (edge_used[k]) continue;
      std::size_t e = sorted_edges[k];
      std::size_t a = graph.edge_endpoint_a(e);
      std::size_t b = graph.edge_endpoint_b(e);
      if (in_tree[a] == in_tree[b]) continue;
      std::size_t existing = in_tree[a] ? a : b;
      std::size_t added = in_tree[a] ? b : a;
      in_tree[added] = true;
      visit_order.push_back(added);
      attaches.push_back({e, existing, added});
      edge_used[k] = true;
      progressed = true;
    }
    if (!progressed) break;
  }

  ViewDefinition view;

  // Aliases: leading letter of the label, numbered from 2 on collision.
  std::map<std::string, int> letter_use;
  std::map<std::size_t, std::string> alias_by_node;
  for (std::size_t node : visit_order) {
    const std::string& table = graph.nodes()[node];
    std::string label = view_label(table, opts);
    std::string letter(1, label.empty() ? 't' : ascii_lower(label[0]));
    int n = ++letter_use[letter];
    std::string alias = n == 1 ? letter : letter + std::to_string(n);
    alias_by_node[node] = alias;
    view.base_tables.emplace_back(table, alias);
  }

  for (const auto& at : attaches) {
    const ForeignKey& fk = schema.foreign_keys[graph.edges()[at.edge].fk_index];
    bool existing_is_from = ci_equal(graph.nodes()[at.existing], fk.from_table);
    std::vector<JoinPair> group;
    for (const auto& [fc, tc] : fk.column_pairs) {
      const std::string& ex_col = existing_is_from ? fc : tc;
      const std::string& new_col = existing_is_from ? tc : fc;
      group.push_back({alias_by_node[at.existing] + "." + ex_col,
                       alias_by_node[at.added] + "." + new_col});
    }
    view.join_conditions.push_back(std::move(group));
  }

  // Projection: the primary key of each base table first (paper-style view
  // heads like Request_id, Recommendation_id, Order_id), then the remaining
  // columns per table in declaration order.
  std::map<std::string, int> name_use;
  auto add_column = [&](const std::string& table, const std::string& alias,
                        const ColumnDef& col) {
    std::string out = view_label(table, opts) + "_" + col.name;
    int n = ++name_use[to_lower(out)];
    if (n > 1) out += "_" + std::to_string(n);
    view.projected_columns.push_back({alias, col.name, out, col.data_type});
  };
  for (std::size_t node : visit_order) {
    const TableDef& t = schema.table_or_throw(graph.nodes()[node]);
    for (const auto& c : t.columns)
      if (c.is_primary_key) add_column(t.name, alias_by_node[node], c);
  }
  for (std::size_t node : visit_order) {
    const TableDef& t = schema.table_or_throw(graph.nodes()[node]);
    for (const auto& c : t.columns)
      if (!c.is_primary_key) add_column(t.name, alias_by_node[node], c);
  }

  if (!name.empty()) {
    view.name = name;
  } else {
    std::string joined;
    for (std::size_t node : visit_order) {
      if (!joined.empty()) joined += "_";
      joined += view_label(graph.nodes()[node], opts);
    }
    if (joined.size() > 120) joined.resize(120);
    // A view must not shadow one of its own base tables (a label can equal
    // the table name when there is no prefix to strip).
    for (const auto& [table, alias] : view.base_tables)
      if (ci_equal(table, joined)) {
        joined += "_V";
        break;
      }
    view.name = joined;
  }
  return view;
}

std::string render_view_select(const ViewDefinition& view) {
  std::string out = "SELECT ";
  bool first = true;
  for (const auto& c : view.projected_columns) {
    if (!first) out += ", ";
    first = false;
    out += c.alias + "." + c.source_column + " AS " + c.output_name;
  }
  out += " FROM " + view.base_tables[0].first + " " + view.base_tables[0].second;
  for (std::size_t i = 1; i < view.base_tables.size(); ++i) {
    out += " JOIN " + view.base_tables[i].first + " " +
           view.base_tables[i].second + " ON ";
    const auto& group = view.join_conditions[i - 1];
    for (std::size_t p = 0; p < group.size(); ++p) {
      if (p > 0) out += " AND ";
      out += group[p].left + " = " + group[p].right;
    }
  }
  return out;
}

std::string render_view_sql(const ViewDefinition& view) {
  return "CREATE VIEW " + quote_identifier_if_needed(view.name) + " AS " +
         render_view_select(view);
}

std::string render_view_ddl(const ViewDefinition& view) {
  std::string out = "CREATE TABLE " + quote_identifier_if_needed(view.name) + " (";
  bool first = true;
  for (const auto& c : view.projected_columns) {
    if (!first) out += ", ";
    first = false;
    out += c.output_name;
    out += ' ';
    out += data_type_sql(c.data_type);
  }
  out += ")";
  return out;
}

std::string inline_view(const std::string& sql, const ViewDefinition& view) {
  std::vector<TableRefSpan> refs = table_ref_spans(sql);
  if (refs.empty())
    throw Error("validation", "query does not reference the view '" +
                                  view.name + "'");
  for (const auto& ref : refs) {
    if (!ci_equal(ref.table, view.name))
      throw Error("validation",
                  "query references a table other than the view: '" +
                      ref.table + "'");
  }
  std::string body = render_view_select(view);
  std::string out;
  std::size_t cursor = 0;
  for (const auto& ref : refs) {
    out += sql.substr(cursor, ref.begin - cursor);
    out += "(" + body + ")";
    if (ref.alias.empty()) out += " " + quote_identifier_if_needed(view.name);
    cursor = ref.end;
  }
  out += sql.substr(cursor);
  return out;
}

} // namespace kwsql
