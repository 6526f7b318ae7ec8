#include <doctest.h>

#include <cstdio>

#include "helpers.hpp"
#include "kwsql/error.hpp"
#include "kwsql/keyword_index.hpp"
#include "kwsql/random.hpp"
#include "kwsql/text.hpp"

using namespace kwsql;

TEST_CASE("normalize_term") {
  CHECK(normalize_term("E-176") == "e176");
  CHECK(normalize_term("") == "");
  CHECK(normalize_term("Criticity_Level") == "criticitylevel");
  CHECK(normalize_term("Instalação") == "instalacao");
  CHECK(normalize_term("  open   orders ") == "openorders");
}

TEST_CASE("normalize_term is idempotent") {
  Rng rng(7);
  const char charset[] =
      "abcXYZ0189-_ .?!'\"çãéÉ";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    std::size_t len = rng.next_below(24);
    for (std::size_t j = 0; j < len; ++j)
      s += charset[rng.next_below(sizeof(charset) - 1)];
    std::string once = normalize_term(s);
    CHECK(normalize_term(once) == once);
  }
}

TEST_CASE("build_dictionary over the fixture") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  int tables = 0, columns = 0, values = 0;
  for (const auto& e : dict.entries()) {
    switch (e.kind) {
      case EntryKind::Table: ++tables; break;
      case EntryKind::Column: ++columns; break;
      case EntryKind::Value: ++values; break;
    }
  }
  CHECK(tables == 4);
  CHECK(columns == 17); // every column of every fixture table
  CHECK(values == 6);   // the seeded installation names
}

TEST_CASE("build_dictionary with no indexed values") {
  KeywordDictionary dict =
      KeywordDictionary::build(testutil::fixture_schema(), {});
  for (const auto& e : dict.entries()) CHECK(e.kind != EntryKind::Value);
}

TEST_CASE("duplicate value rows collapse to one entry") {
  std::vector<ValueTriple> values{{"Installation", "name", "E-176"},
                                  {"Installation", "name", "E-176"}};
  KeywordDictionary dict =
      KeywordDictionary::build(testutil::fixture_schema(), values);
  int count = 0;
  for (const auto& e : dict.entries())
    if (e.kind == EntryKind::Value) ++count;
  CHECK(count == 1);
}

TEST_CASE("value triples for non-indexed or unknown columns are rejected") {
  CHECK_THROWS_AS(KeywordDictionary::build(
                      testutil::fixture_schema(),
                      {{"Maintenance_order", "status", "open"}}),
                  Error);
  CHECK_THROWS_AS(KeywordDictionary::build(testutil::fixture_schema(),
                                           {{"Nope", "x", "1"}}),
                  Error);
  CHECK_THROWS_AS(KeywordDictionary::build(testutil::fixture_schema(),
                                           {{"Installation", "nope", "1"}}),
                  Error);
}

TEST_CASE("E176 resolves to the stored value E-176 as a normalized match") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"E176"});
  REQUIRE(ms.matches.size() == 1);
  const KeywordMatch& m = ms.matches[0];
  const DictionaryEntry& e = dict.entry(m.entry_index);
  CHECK(e.kind == EntryKind::Value);
  CHECK(e.value == "E-176");
  CHECK(e.table == "Installation");
  CHECK(e.column == "name");
  CHECK(m.match_class == MatchClass::Normalized);
  CHECK(m.score == doctest::Approx(0.8));
}

TEST_CASE("a table name matches itself as exact_name") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"installation"});
  REQUIRE(ms.matches.size() == 1);
  const DictionaryEntry& e = dict.entry(ms.matches[0].entry_index);
  CHECK(e.kind == EntryKind::Table);
  CHECK(e.table == "Installation");
  CHECK(ms.matches[0].match_class == MatchClass::ExactName);
}

TEST_CASE("exact value beats everything") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"P-X"});
  REQUIRE(ms.matches.size() == 1);
  CHECK(ms.matches[0].match_class == MatchClass::ExactValue);
  CHECK(ms.matches[0].score == doctest::Approx(1.0));
}

TEST_CASE("tie-break prefers values over columns over tables") {
  // Schema where the same term is a value in two different columns.
  RelationalSchema s = load_schema(R"({
    "tables": [
      {"name": "Alpha", "columns": [
        {"name": "id", "type": "integer", "pk": true},
        {"name": "code", "type": "string", "indexed": true}]},
      {"name": "Beta", "columns": [
        {"name": "id", "type": "integer", "pk": true},
        {"name": "tag", "type": "string", "indexed": true}]}
    ]
  })");
  KeywordDictionary dict = KeywordDictionary::build(
      s, {{"Beta", "tag", "X-9"}, {"Alpha", "code", "X-9"}});
  MatchSet ms = dict.match_keywords({"X-9"});
  REQUIRE(ms.matches.size() == 1);
  const DictionaryEntry& e = dict.entry(ms.matches[0].entry_index);
  // Both candidates score 1.0 (exact_value); the documented tie-break is
  // lexicographic on the (table, column, value) target, so Alpha wins.
  CHECK(e.table == "Alpha");
  CHECK(ms.matches[0].score == doctest::Approx(1.0));

  // Enumerate both candidates to confirm the tie really exists.
  int exact_candidates = 0;
  for (const auto& entry : dict.entries())
    if (entry.kind == EntryKind::Value && entry.value == "X-9")
      ++exact_candidates;
  CHECK(exact_candidates == 2);
}

TEST_CASE("synonyms match with the synonym class") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"work order"});
  REQUIRE(ms.matches.size() == 1);
  CHECK(dict.entry(ms.matches[0].entry_index).table == "Maintenance_order");
  CHECK(ms.matches[0].match_class == MatchClass::Synonym);
  CHECK(ms.matches[0].score == doctest::Approx(0.9));
}

TEST_CASE("prefix matches carry a ratio-scaled score") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"maintenance requests"});
  REQUIRE(ms.matches.size() == 1);
  const KeywordMatch& m = ms.matches[0];
  CHECK(dict.entry(m.entry_index).table == "Maintenance_request");
  CHECK(m.match_class == MatchClass::PrefixPartial);
  CHECK(m.score == doctest::Approx(0.5 * 18.0 / 19.0));
}

TEST_CASE("keywords without a candidate above the floor go unmatched") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"zzz", "ins"});
  // "ins" is a prefix of "installation" with ratio 3/12 < 0.5.
  CHECK(ms.matches.empty());
  CHECK(ms.unmatched == std::vector<std::string>{"zzz", "ins"});
}

TEST_CASE("multi-word keywords fall back to their best token") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"open orders"});
  REQUIRE(ms.matches.size() == 1);
  CHECK(dict.entry(ms.matches[0].entry_index).table == "Maintenance_order");
  CHECK(ms.matches[0].match_class == MatchClass::Synonym);
}

TEST_CASE("every keyword lands in matches or unmatched exactly once") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  std::vector<std::string> keywords{"installation", "E176",   "zzz",
                                    "orders",       "status", "??"};
  MatchSet ms = dict.match_keywords(keywords);
  CHECK(ms.matches.size() + ms.unmatched.size() == keywords.size());
}

TEST_CASE("exact-name self-match holds for every table and column") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  for (const auto& t : testutil::fixture_schema().tables) {
    MatchSet ms = dict.match_keywords({t.name});
    REQUIRE(ms.matches.size() == 1);
    bool exact = ms.matches[0].match_class == MatchClass::ExactName ||
                 ms.matches[0].match_class == MatchClass::ExactValue;
    CHECK(exact);
    for (const auto& c : t.columns) {
      MatchSet cm = dict.match_keywords({c.name});
      REQUIRE(cm.matches.size() == 1);
      bool cexact = cm.matches[0].match_class == MatchClass::ExactName ||
                    cm.matches[0].match_class == MatchClass::ExactValue;
      CHECK(cexact);
    }
  }
}

TEST_CASE("an exact value candidate is never beaten by a prefix candidate") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  // "P-133" has an exact value entry and is not a prefix of anything else.
  MatchSet ms = dict.match_keywords({"P-133"});
  REQUIRE(ms.matches.size() == 1);
  CHECK(ms.matches[0].match_class == MatchClass::ExactValue);
}

TEST_CASE("tables_of unions owning tables") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  MatchSet ms = dict.match_keywords({"E-176", "status"});
  CHECK(tables_of(dict, ms) ==
        std::set<std::string>{"Installation", "Maintenance_order"});

  MatchSet empty;
  CHECK(tables_of(dict, empty).empty());

  MatchSet same = dict.match_keywords({"order", "status"});
  CHECK(tables_of(dict, same) == std::set<std::string>{"Maintenance_order"});
}

TEST_CASE("dictionary file round-trips and matches identically") {
  const KeywordDictionary& dict = testutil::fixture_dictionary();
  std::string path = "/tmp/kwsql_test_dict.json";
  dict.save_file(path);
  KeywordDictionary loaded = KeywordDictionary::load_file(path);
  CHECK(loaded.entries().size() == dict.entries().size());
  for (const auto& kw : {"E176", "installation", "orders", "work order"}) {
    MatchSet a = dict.match_keywords({kw});
    MatchSet b = loaded.match_keywords({kw});
    REQUIRE(a.matches.size() == b.matches.size());
    if (!a.matches.empty()) {
      CHECK(a.matches[0].score == b.matches[0].score);
      CHECK(a.matches[0].match_class == b.matches[0].match_class);
    }
  }
  std::remove(path.c_str());
}
