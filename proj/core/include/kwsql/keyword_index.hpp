#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kwsql/schema.hpp"

namespace kwsql {

enum class EntryKind { Table, Column, Value };

struct DictionaryEntry {
  EntryKind kind = EntryKind::Table;
  std::string table;
  std::string column; // column and value kinds
  std::string value;  // value kind only
  std::vector<std::string> forms; // normalized surface forms, sorted, deduped

  // The element's own name (or the stored value text for value entries).
  const std::string& primary() const;
};

enum class MatchClass { ExactValue, ExactName, Synonym, Normalized, PrefixPartial };
const char* match_class_name(MatchClass c);

struct KeywordMatch {
  std::string keyword;
  std::size_t entry_index = 0;
  double score = 0.0;
  MatchClass match_class = MatchClass::Normalized;
};

struct MatchSet {
  std::vector<KeywordMatch> matches;
  std::vector<std::string> unmatched;
};

struct ValueTriple {
  std::string table;
  std::string column;
  std::string value;
};

// Scoring ladder. The paper's "matching optimization heuristic" is never
// specified; this fixed, documented ladder stands in for it.
//   exact_value 1.0 > exact_name 0.95 > synonym 0.9 > normalized 0.8
//   > prefix_partial 0.5 * overlap-ratio (ratio floor 0.5).
class KeywordDictionary {
public:
  static KeywordDictionary build(const RelationalSchema& schema,
                                 const std::vector<ValueTriple>& values);

  const std::vector<DictionaryEntry>& entries() const { return entries_; }
  const DictionaryEntry& entry(std::size_t i) const { return entries_.at(i); }

  MatchSet match_keywords(const std::vector<std::string>& keywords) const;

  std::string to_json() const;
  static KeywordDictionary from_json(const std::string& text);
  void save_file(const std::string& path) const;
  static KeywordDictionary load_file(const std::string& path);

private:
  void rebuild_index();
  struct Scored {
    bool found = false;
    std::size_t entry = 0;
    double score = 0.0;
    MatchClass cls = MatchClass::PrefixPartial;
  };
  Scored best_candidate(const std::string& keyword) const;

  std::vector<DictionaryEntry> entries_;
  std::map<std::string, std::vector<std::size_t>> index_; // form -> entries
};

std::vector<ValueTriple> load_value_triples_file(const std::string& path);

// Union of the owning tables of every match.
std::set<std::string> tables_of(const KeywordDictionary& dict, const MatchSet& ms);

} // namespace kwsql
