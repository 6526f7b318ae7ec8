#include <doctest.h>

#include "kwsql/error.hpp"
#include "kwsql/sql_text.hpp"

using namespace kwsql;

namespace {

// The open-orders query shape from the motivating example.
const char* kOpenOrdersSql =
    "SELECT t.name, COUNT(*) AS number_open_orders "
    "FROM Installation t JOIN Order o ON t.code = o.installation_code "
    "WHERE (t.name = 'P-X' OR t.name = 'P-Y') "
    "AND LOWER(o.status) LIKE LOWER('%open%') "
    "GROUP BY t.code ORDER BY number_open_orders DESC FETCH 1";

} // namespace

TEST_CASE("from_tables on the open-orders query") {
  CHECK(from_tables(kOpenOrdersSql) ==
        std::set<std::string>{"Installation", "Order"});
}

TEST_CASE("from_tables with no FROM clause") {
  CHECK(from_tables("SELECT 1").empty());
}

TEST_CASE("from_tables recurses into derived tables") {
  std::string sql =
      "SELECT x.a, c.z FROM (SELECT a, b FROM A JOIN B ON A.id = B.a_id) x "
      "JOIN C c ON x.b = c.id";
  CHECK(from_tables(sql) == std::set<std::string>{"A", "B", "C"});
}

TEST_CASE("from_tables sees subqueries in WHERE") {
  std::string sql =
      "SELECT name FROM Installation WHERE name IN "
      "(SELECT installation_name FROM Maintenance_order)";
  CHECK(from_tables(sql) ==
        std::set<std::string>{"Installation", "Maintenance_order"});
}

TEST_CASE("from_tables excludes aliases and handles comma lists") {
  CHECK(from_tables("SELECT * FROM A a, B b WHERE a.x = b.y") ==
        std::set<std::string>{"A", "B"});
  CHECK(from_tables("SELECT a.x FROM A AS a") == std::set<std::string>{"A"});
}

TEST_CASE("from_tables reads quoted identifiers") {
  CHECK(from_tables("SELECT Order_id FROM \"Order\" WHERE Order_id = 1") ==
        std::set<std::string>{"Order"});
}

TEST_CASE("from_tables dedupes case-insensitively") {
  CHECK(from_tables("SELECT * FROM A x JOIN a y ON x.i = y.j").size() == 1);
}

TEST_CASE("unsupported constructs are rejected") {
  CHECK_THROWS_AS(ensure_supported_select("WITH t AS (SELECT 1) SELECT * FROM t"),
                  Error);
  CHECK_THROWS_AS(ensure_supported_select("SELECT a FROM t UNION SELECT b FROM u"),
                  Error);
  CHECK_THROWS_AS(
      ensure_supported_select("SELECT RANK() OVER (ORDER BY x) FROM t"), Error);
  CHECK_THROWS_AS(ensure_supported_select("DELETE FROM t"), Error);
  CHECK_THROWS_AS(ensure_supported_select(""), Error);
  CHECK_THROWS_AS(ensure_supported_select("SELECT 1; SELECT 2"), Error);
  CHECK_THROWS_AS(from_tables("SELECT * FROM (SELECT a FROM t"), Error);
}

TEST_CASE("trailing semicolon is tolerated") {
  CHECK_NOTHROW(ensure_supported_select("SELECT name FROM Installation;"));
}

TEST_CASE("construct counting") {
  // Zero constructs.
  CHECK(count_sql_constructs("SELECT name FROM Installation WHERE type = 'rig'") ==
        0);
  // Single GROUP BY.
  CHECK(count_sql_constructs(
            "SELECT a, COUNT(*) FROM t GROUP BY a") == 1);
  // The open-orders query: GROUP BY + ORDER BY + FETCH.
  CHECK(count_sql_constructs(kOpenOrdersSql) == 3);
  // Aggregates beyond the first.
  CHECK(count_sql_constructs("SELECT COUNT(*) FROM t") == 0);
  CHECK(count_sql_constructs("SELECT MIN(a), MAX(a) FROM t") == 1);
  // Nested sub-select.
  CHECK(count_sql_constructs(
            "SELECT a FROM t WHERE a > (SELECT AVG(a) FROM t)") == 1);
  // More than two selected columns counts once.
  CHECK(count_sql_constructs("SELECT a, b, c FROM t") == 1);
  CHECK(count_sql_constructs("SELECT a, b FROM t") == 0);
}

TEST_CASE("has_order_by") {
  CHECK(has_order_by("SELECT a FROM t ORDER BY a"));
  CHECK(!has_order_by("SELECT a FROM t"));
  CHECK(!has_order_by("SELECT a FROM Order_list"));
}

TEST_CASE("top_level_from_span covers the join block only") {
  std::string sql =
      "SELECT r.situation FROM Maintenance_recommendation r "
      "JOIN Installation p ON r.installation_name = p.name "
      "WHERE p.name = 'E-176'";
  std::size_t begin = 0, end = 0;
  REQUIRE(top_level_from_span(sql, begin, end));
  std::string block = sql.substr(begin, end - begin);
  CHECK(block.find("FROM") == 0);
  CHECK(block.find("JOIN") != std::string::npos);
  CHECK(block.find("WHERE") == std::string::npos);
  CHECK(sql.substr(end).find("WHERE") == 0);
}

TEST_CASE("top_level_from_span ignores nested FROM") {
  std::string sql = "SELECT a FROM (SELECT a FROM X) y WHERE a > 0";
  std::size_t begin = 0, end = 0;
  REQUIRE(top_level_from_span(sql, begin, end));
  CHECK(sql.substr(begin, 4) == "FROM");
  CHECK(begin < sql.find("(SELECT"));
}

TEST_CASE("a table named Order parses in table position") {
  // ORDER only terminates a reference list when followed by BY.
  CHECK(from_tables("SELECT * FROM Order WHERE id = 1") ==
        std::set<std::string>{"Order"});
  CHECK(from_tables("SELECT * FROM Order ORDER BY id") ==
        std::set<std::string>{"Order"});
}

TEST_CASE("quote_identifier_if_needed") {
  CHECK(quote_identifier_if_needed("Installation") == "Installation");
  CHECK(quote_identifier_if_needed("Order") == "\"Order\"");
  CHECK(quote_identifier_if_needed("Group") == "\"Group\"");
  CHECK(quote_identifier_if_needed("weird name") == "\"weird name\"");
}

TEST_CASE("tokenizer handles strings comments and operators") {
  auto toks = tokenize_sql(
      "SELECT 'it''s', x /* c */ FROM t -- tail\nWHERE a <> 1.5e3");
  REQUIRE(!toks.empty());
  bool found_string = false;
  for (const auto& t : toks)
    if (t.type == SqlTokenType::String && t.text == "it's") found_string = true;
  CHECK(found_string);
  CHECK_THROWS_AS(tokenize_sql("SELECT 'open"), Error);
}
