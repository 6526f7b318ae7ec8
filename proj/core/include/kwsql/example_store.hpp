#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kwsql/embedding.hpp"
#include "kwsql/view.hpp"

namespace kwsql {

struct ExamplePair {
  std::string id;
  std::string question;
  std::string sql;
  std::set<std::string> tables; // from_tables(sql), kept in sync
};

// The synthetic dataset D plus exhaustive-cosine similarity retrieval.
class ExampleStore {
public:
  explicit ExampleStore(std::size_t dimension = 256);
  ExampleStore(EmbedFn embedder, std::size_t dimension);

  void add(const std::string& id, const std::string& question,
           const std::string& sql);

  const std::vector<ExamplePair>& examples() const { return examples_; }
  const std::vector<EmbeddingVector>& vectors() const { return vectors_; }
  std::size_t size() const { return examples_.size(); }
  std::size_t dimension() const { return dimension_; }

  // Top-k by cosine similarity, descending; ties broken by example id. With
  // a table filter only examples whose tables are a subset qualify.
  std::vector<ExamplePair> retrieve_similar(
      const std::string& question, std::size_t k,
      const std::optional<std::set<std::string>>& table_filter = {}) const;

  void save_file(const std::string& path) const;
  static ExampleStore load_file(const std::string& path,
                                std::size_t dimension = 256);
  static ExampleStore load_file(const std::string& path, EmbedFn embedder,
                                std::size_t dimension);

private:
  std::vector<ExamplePair> examples_;
  std::vector<EmbeddingVector> vectors_;
  EmbedFn embedder_;
  std::size_t dimension_;
};

// Round-robin merge of per-sub-question lists: first elements in list order,
// then seconds, ...; duplicate ids keep their first position; truncated to k.
std::vector<ExamplePair> intercalate(
    const std::vector<std::vector<ExamplePair>>& lists, std::size_t k);

// Replaces the top-level FROM/JOIN block with the view name, drops the join
// conditions, and re-qualifies column references to the view's output names
// where the view provides a mapping. Unmapped qualifiers are left untouched
// and reported through `warnings`.
std::string rewrite_from_clause(const std::string& sql,
                                const ViewDefinition& view,
                                std::vector<std::string>* warnings = nullptr);

} // namespace kwsql
