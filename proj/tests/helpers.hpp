#pragma once

#include <doctest.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "kwsql/example_store.hpp"
#include "kwsql/exec.hpp"
#include "kwsql/keyword_index.hpp"
#include "kwsql/llm.hpp"
#include "kwsql/pipeline.hpp"
#include "kwsql/prompts.hpp"
#include "kwsql/schema.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(KWSQL_FIXTURE_DIR) + "/" + name;
}

inline std::string template_dir() { return KWSQL_TEMPLATE_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const kwsql::RelationalSchema& fixture_schema() {
  static kwsql::RelationalSchema schema =
      kwsql::load_schema_file(fixture_path("fixture_schema.json"));
  return schema;
}

inline const kwsql::KeywordDictionary& fixture_dictionary() {
  static kwsql::KeywordDictionary dict = kwsql::KeywordDictionary::build(
      fixture_schema(),
      kwsql::load_value_triples_file(fixture_path("fixture_values.jsonl")));
  return dict;
}

inline const kwsql::ExampleStore& fixture_store() {
  static kwsql::ExampleStore store =
      kwsql::ExampleStore::load_file(fixture_path("fixture_examples.jsonl"));
  return store;
}

inline const kwsql::TemplateSet& fixture_templates() {
  static kwsql::TemplateSet templates =
      kwsql::TemplateSet::load_dir(template_dir());
  return templates;
}

// Fresh in-memory database seeded with the fixture rows.
inline std::unique_ptr<kwsql::SqliteBackend> seeded_backend() {
  auto backend = std::make_unique<kwsql::SqliteBackend>(":memory:");
  backend->execute_script(read_file(fixture_path("fixture_seed.sql")));
  return backend;
}

// Scripted gateway from a fixture transcript (optionally with extra rules
// prepended, for ablation variants).
inline kwsql::ScriptedBackend fixture_gateway(
    const std::string& transcript = "transcript_complete.jsonl",
    const std::vector<kwsql::TranscriptRule>& prepend = {}) {
  auto rules = kwsql::ScriptedBackend::load_rules(fixture_path(transcript));
  std::vector<kwsql::TranscriptRule> all = prepend;
  all.insert(all.end(), rules.begin(), rules.end());
  return kwsql::ScriptedBackend(std::move(all));
}

struct PipelineFixture {
  kwsql::ScriptedBackend gateway;
  std::unique_ptr<kwsql::SqliteBackend> exec;
  kwsql::PipelineDeps deps;

  explicit PipelineFixture(
      const std::string& transcript = "transcript_complete.jsonl",
      const std::vector<kwsql::TranscriptRule>& prepend = {})
      : gateway(fixture_gateway(transcript, prepend)), exec(seeded_backend()) {
    deps.schema = &fixture_schema();
    deps.dictionary = &fixture_dictionary();
    deps.store = &fixture_store();
    deps.gateway = &gateway;
    deps.templates = &fixture_templates();
    deps.exec = exec.get();
  }
};

} // namespace testutil
