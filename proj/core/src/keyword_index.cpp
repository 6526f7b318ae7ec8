#include "kwsql/keyword_index.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

using nlohmann::json;

const std::string& DictionaryEntry::primary() const {
  switch (kind) {
    case EntryKind::Table: return table;
    case EntryKind::Column: return column;
    case EntryKind::Value: return value;
  }
  return table;
}

const char* match_class_name(MatchClass c) {
  switch (c) {
    case MatchClass::ExactValue: return "exact_value";
    case MatchClass::ExactName: return "exact_name";
    case MatchClass::Synonym: return "synonym";
    case MatchClass::Normalized: return "normalized";
    case MatchClass::PrefixPartial: return "prefix_partial";
  }
  return "normalized";
}

namespace {

const char* entry_kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::Table: return "table";
    case EntryKind::Column: return "column";
    case EntryKind::Value: return "value";
  }
  return "table";
}

EntryKind entry_kind_from_name(const std::string& n) {
  if (n == "table") return EntryKind::Table;
  if (n == "column") return EntryKind::Column;
  if (n == "value") return EntryKind::Value;
  throw Error("parse", "unknown dictionary entry kind '" + n + "'");
}

std::vector<std::string> collect_forms(const std::string& primary,
                                       const std::vector<std::string>& synonyms) {
  std::set<std::string> forms;
  std::string p = normalize_term(primary);
  if (!p.empty()) forms.insert(p);
  for (const auto& s : synonyms) {
    std::string f = normalize_term(s);
    if (!f.empty()) forms.insert(f);
  }
  return {forms.begin(), forms.end()};
}

// Kind priority for tie-breaking: value beats column beats table.
int kind_rank(EntryKind k) {
  switch (k) {
    case EntryKind::Value: return 0;
    case EntryKind::Column: return 1;
    case EntryKind::Table: return 2;
  }
  return 3;
}

std::string target_key(const DictionaryEntry& e) {
  return to_lower(e.table) + "|" + to_lower(e.column) + "|" + e.value;
}

} // namespace

KeywordDictionary KeywordDictionary::build(
    const RelationalSchema& schema, const std::vector<ValueTriple>& values) {
  KeywordDictionary dict;
  for (const auto& t : schema.tables) {
    DictionaryEntry e;
    e.kind = EntryKind::Table;
    e.table = t.name;
    e.forms = collect_forms(t.name, t.synonyms);
    dict.entries_.push_back(std::move(e));
  }
  for (const auto& t : schema.tables) {
    for (const auto& c : t.columns) {
      DictionaryEntry e;
      e.kind = EntryKind::Column;
      e.table = t.name;
      e.column = c.name;
      e.forms = collect_forms(c.name, c.synonyms);
      dict.entries_.push_back(std::move(e));
    }
  }
  std::set<std::string> seen_values;
  for (const auto& v : values) {
    const TableDef* t = schema.find_table(v.table);
    if (!t)
      throw Error("validation",
                  "value triple references unknown table '" + v.table + "'");
    const ColumnDef* c = t->find_column(v.column);
    if (!c)
      throw Error("validation", "value triple references unknown column '" +
                                    v.table + "." + v.column + "'");
    if (!c->is_indexed_for_values)
      throw Error("validation", "value triple for non-indexed column '" +
                                    v.table + "." + v.column + "'");
    std::string key = v.value + "|" + to_lower(v.table) + "|" + to_lower(v.column);
    if (!seen_values.insert(key).second) continue;
    DictionaryEntry e;
    e.kind = EntryKind::Value;
    e.table = t->name;
    e.column = c->name;
    e.value = v.value;
    e.forms = collect_forms(v.value, {});
    if (e.forms.empty()) continue; // value with no alphanumeric content
    dict.entries_.push_back(std::move(e));
  }
  dict.rebuild_index();
  return dict;
}

void KeywordDictionary::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (const auto& f : entries_[i].forms) index_[f].push_back(i);
}

KeywordDictionary::Scored KeywordDictionary::best_candidate(
    const std::string& keyword) const {
  std::string nk = normalize_term(keyword);
  if (nk.empty()) return {};

  auto classify = [&](std::size_t idx) -> Scored {
    const DictionaryEntry& e = entries_[idx];
    if (e.kind == EntryKind::Value && ci_equal(keyword, e.value))
      return {true, idx, 1.0, MatchClass::ExactValue};
    if (e.kind != EntryKind::Value && ci_equal(keyword, e.primary()))
      return {true, idx, 0.95, MatchClass::ExactName};
    if (std::find(e.forms.begin(), e.forms.end(), nk) != e.forms.end()) {
      if (nk == normalize_term(e.primary()))
        return {true, idx, 0.8, MatchClass::Normalized};
      return {true, idx, 0.9, MatchClass::Synonym};
    }
    return {};
  };

  Scored best;
  auto consider = [&](Scored s) {
    if (!s.found) return;
    if (!best.found) {
      best = s;
      return;
    }
    const DictionaryEntry& a = entries_[s.entry];
    const DictionaryEntry& b = entries_[best.entry];
    auto key = [&](const Scored& sc, const DictionaryEntry& e) {
      return std::tuple<double, int, std::string>(-sc.score, kind_rank(e.kind),
                                                  target_key(e));
    };
    if (key(s, a) < key(best, b)) best = s;
  };

  auto it = index_.find(nk);
  if (it != index_.end())
    for (std::size_t idx : it->second) consider(classify(idx));

  if (!best.found) {
    // Prefix fallback: one side a proper prefix of the other, overlap ratio
    // (shorter/longer) at least 0.5.
    for (auto form_it = index_.begin(); form_it != index_.end(); ++form_it) {
      const std::string& form = form_it->first;
      const std::string& shorter = form.size() < nk.size() ? form : nk;
      const std::string& longer = form.size() < nk.size() ? nk : form;
      if (shorter.size() == longer.size()) continue; // equal handled above
      if (longer.compare(0, shorter.size(), shorter) != 0) continue;
      double ratio = static_cast<double>(shorter.size()) /
                     static_cast<double>(longer.size());
      if (ratio < 0.5) continue;
      for (std::size_t idx : form_it->second)
        consider({true, idx, 0.5 * ratio, MatchClass::PrefixPartial});
    }
  }
  return best;
}

MatchSet KeywordDictionary::match_keywords(
    const std::vector<std::string>& keywords) const {
  MatchSet out;
  for (const auto& kw : keywords) {
    Scored best = best_candidate(kw);
    if (!best.found) {
      // Multi-word keywords fall back to per-token matching; the keyword
      // keeps the single best-scoring token's entry.
      std::istringstream ss(kw);
      std::string token;
      while (ss >> token) {
        Scored s = best_candidate(token);
        if (!s.found) continue;
        if (!best.found || s.score > best.score) best = s;
      }
    }
    if (best.found)
      out.matches.push_back({kw, best.entry, best.score, best.cls});
    else
      out.unmatched.push_back(kw);
  }
  return out;
}

std::string KeywordDictionary::to_json() const {
  json entries = json::array();
  for (const auto& e : entries_) {
    json je{{"kind", entry_kind_name(e.kind)},
            {"forms", e.forms},
            {"table", e.table}};
    if (e.kind != EntryKind::Table) je["column"] = e.column;
    if (e.kind == EntryKind::Value) je["value"] = e.value;
    entries.push_back(std::move(je));
  }
  return json{{"entries", entries}}.dump(2);
}

KeywordDictionary KeywordDictionary::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("parse", std::string("malformed dictionary: ") + e.what());
  }
  KeywordDictionary dict;
  try {
    for (const auto& je : doc.at("entries")) {
      DictionaryEntry e;
      e.kind = entry_kind_from_name(je.at("kind").get<std::string>());
      e.table = je.at("table").get<std::string>();
      e.column = je.value("column", std::string());
      e.value = je.value("value", std::string());
      for (const auto& f : je.at("forms")) e.forms.push_back(f.get<std::string>());
      std::sort(e.forms.begin(), e.forms.end());
      e.forms.erase(std::unique(e.forms.begin(), e.forms.end()), e.forms.end());
      dict.entries_.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error("parse", std::string("malformed dictionary: ") + e.what());
  }
  dict.rebuild_index();
  return dict;
}

void KeywordDictionary::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("config", "cannot write dictionary file '" + path + "'");
  out << to_json() << "\n";
}

KeywordDictionary KeywordDictionary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open dictionary file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<ValueTriple> load_value_triples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open value file '" + path + "'");
  std::vector<ValueTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      out.push_back({j.at("table").get<std::string>(),
                     j.at("column").get<std::string>(),
                     j.at("value").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error("parse", "value file line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return out;
}

std::set<std::string> tables_of(const KeywordDictionary& dict,
                                const MatchSet& ms) {
  std::set<std::string> out;
  std::set<std::string> seen;
  for (const auto& m : ms.matches) {
    const std::string& t = dict.entry(m.entry_index).table;
    if (seen.insert(to_lower(t)).second) out.insert(t);
  }
  return out;
}

} // namespace kwsql
