#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kwsql/example_store.hpp"
#include "kwsql/exec.hpp"
#include "kwsql/graph.hpp"
#include "kwsql/keyword_index.hpp"
#include "kwsql/llm.hpp"
#include "kwsql/prompts.hpp"
#include "kwsql/schema.hpp"
#include "kwsql/trace.hpp"
#include "kwsql/view.hpp"

namespace kwsql {

// The six schema-linking strategy variants compared in the evaluation.
enum class AblationMode {
  LlmOnly,
  DankeOnly,
  LlmDfe,
  LlmDanke,
  LlmDfeDanke,
  Complete,
};

const char* ablation_mode_name(AblationMode mode);
AblationMode ablation_mode_from_name(const std::string& name);

struct PipelineDeps {
  const RelationalSchema* schema = nullptr;
  const KeywordDictionary* dictionary = nullptr;
  const ExampleStore* store = nullptr;
  LlmBackend* gateway = nullptr;
  const TemplateSet* templates = nullptr;
  ExecutionBackend* exec = nullptr; // optional; row samples degrade without it
  int k = 8;                        // example budget for both DFE sites
  int max_sub_questions = 4;
  int row_sample_count = 3;
  bool verbose_trace = false;
  ViewOptions view_options;
};

struct LinkResult {
  std::vector<std::string> tables; // S', in discovery order
  MatchSet matches;                // K_M
  Trace trace;
};

struct CompilationResult {
  ViewDefinition view;
  std::string sql_over_view;
  std::string sql_over_base;
  std::vector<std::string> sub_questions;
  std::vector<std::string> examples_used; // ids, at most k
  Trace trace;
};

// Whitespace tokens with quoted phrases kept together; how keywords reach
// the dictionary when no LLM extracts them.
std::vector<std::string> split_keywords(const std::string& question);

std::vector<std::string> extract_keywords(const std::string& question,
                                          PipelineDeps& deps, Trace& trace);

LinkResult schema_link(const std::string& question, AblationMode mode,
                       PipelineDeps& deps);

std::vector<std::string> decompose(const std::string& question,
                                   PipelineDeps& deps, Trace& trace);

CompilationResult compile_question(const std::string& question,
                                   const LinkResult& link, PipelineDeps& deps);

CompilationResult answer(const std::string& question, AblationMode mode,
                         PipelineDeps& deps);

// Prompt-context renderers (exposed for tests).
std::string render_schema_listing(const RelationalSchema& schema);
std::string render_match_set(const KeywordDictionary& dict, const MatchSet& ms);
std::string render_question_tables(
    const std::vector<std::pair<std::string, std::set<std::string>>>& pairs);
std::string render_example_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs);
std::string render_row_samples(const ResultTable& rows);

} // namespace kwsql
