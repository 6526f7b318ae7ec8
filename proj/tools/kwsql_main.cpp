// kwsql - keyword-search-augmented text-to-SQL compiler.
//
// Subcommands: index, gen-dataset, link, view, ask, eval, repl.
// Exit codes: 0 success, 1 runtime failure, 2 configuration failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kwsql/error.hpp"
#include "kwsql/eval.hpp"
#include "kwsql/example_store.hpp"
#include "kwsql/exec.hpp"
#include "kwsql/graph.hpp"
#include "kwsql/keyword_index.hpp"
#include "kwsql/llm.hpp"
#include "kwsql/pipeline.hpp"
#include "kwsql/prompts.hpp"
#include "kwsql/schema.hpp"
#include "kwsql/synth.hpp"
#include "kwsql/text.hpp"
#include "kwsql/view.hpp"

namespace {

using nlohmann::json;

struct AppConfig {
  std::string schema_path;
  std::string dictionary_path;
  std::string examples_path;
  std::string templates_dir;
  std::string scripted_backend;
  std::string http_endpoint;
  std::string http_model;
  std::string execution_backend; // sqlite path or ":memory:"
  std::string seed_sql;          // optional script run at open
  int k = 8;
  std::uint64_t seed = 0;
  std::string mode = "complete";
  int concurrency_cap = 4;
  int verbosity = 0;
};

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kwsql::Error("config", "cannot open config file '" + path + "'");
  json doc;
  try {
    std::stringstream ss;
    ss << in.rdbuf();
    doc = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw kwsql::Error("config", std::string("malformed config: ") + e.what());
  }
  AppConfig cfg;
  cfg.schema_path = doc.value("schema_path", std::string());
  cfg.dictionary_path = doc.value("dictionary_path", std::string());
  cfg.examples_path = doc.value("examples_path", std::string());
  cfg.templates_dir = doc.value("templates_dir", std::string());
  cfg.scripted_backend = doc.value("scripted_backend", std::string());
  if (doc.contains("http_backend")) {
    cfg.http_endpoint = doc["http_backend"].value("endpoint", std::string());
    cfg.http_model = doc["http_backend"].value("model", std::string());
  }
  cfg.execution_backend = doc.value("execution_backend", std::string());
  cfg.seed_sql = doc.value("seed_sql", std::string());
  cfg.k = doc.value("k", 8);
  cfg.seed = doc.value("seed", 0ULL);
  cfg.mode = doc.value("mode", std::string("complete"));
  cfg.concurrency_cap = doc.value("concurrency_cap", 4);
  cfg.verbosity = doc.value("verbosity", 0);
  if (!cfg.scripted_backend.empty() && !cfg.http_endpoint.empty())
    throw kwsql::Error("config",
                       "select exactly one LLM backend (scripted or http)");
  return cfg;
}

// Lazily wired application state.
struct App {
  AppConfig cfg;
  std::optional<kwsql::RelationalSchema> schema;
  std::optional<kwsql::KeywordDictionary> dictionary;
  std::optional<kwsql::ExampleStore> store;
  std::optional<kwsql::TemplateSet> templates;
  std::unique_ptr<kwsql::LlmBackend> gateway;
  std::unique_ptr<kwsql::SqliteBackend> exec;

  const kwsql::RelationalSchema& get_schema() {
    if (!schema) {
      if (cfg.schema_path.empty())
        throw kwsql::Error("config", "schema_path is not configured");
      schema = kwsql::load_schema_file(cfg.schema_path);
    }
    return *schema;
  }

  const kwsql::KeywordDictionary& get_dictionary() {
    if (!dictionary) {
      if (cfg.dictionary_path.empty())
        throw kwsql::Error("config", "dictionary_path is not configured");
      dictionary = kwsql::KeywordDictionary::load_file(cfg.dictionary_path);
    }
    return *dictionary;
  }

  const kwsql::ExampleStore& get_store() {
    if (!store) {
      if (cfg.examples_path.empty())
        throw kwsql::Error("config", "examples_path is not configured");
      store = kwsql::ExampleStore::load_file(cfg.examples_path);
    }
    return *store;
  }

  const kwsql::TemplateSet& get_templates() {
    if (!templates) {
      if (cfg.templates_dir.empty())
        throw kwsql::Error("config", "templates_dir is not configured");
      templates = kwsql::TemplateSet::load_dir(cfg.templates_dir);
    }
    return *templates;
  }

  kwsql::LlmBackend& get_gateway() {
    if (!gateway) {
      if (!cfg.scripted_backend.empty()) {
        gateway = std::make_unique<kwsql::ScriptedBackend>(
            kwsql::ScriptedBackend::from_file(cfg.scripted_backend));
      } else if (!cfg.http_endpoint.empty()) {
        kwsql::HttpBackendConfig http;
        http.endpoint = cfg.http_endpoint;
        http.model = cfg.http_model;
        if (const char* key = std::getenv("LLM_API_KEY")) http.api_key = key;
        http.max_in_flight = cfg.concurrency_cap;
        gateway = std::make_unique<kwsql::HttpBackend>(http);
      } else {
        throw kwsql::Error("config", "no LLM backend configured");
      }
    }
    return *gateway;
  }

  kwsql::SqliteBackend* get_exec() {
    if (!exec) {
      if (cfg.execution_backend.empty()) return nullptr;
      exec = std::make_unique<kwsql::SqliteBackend>(cfg.execution_backend);
      if (!cfg.seed_sql.empty()) {
        std::ifstream in(cfg.seed_sql);
        if (!in)
          throw kwsql::Error("config",
                             "cannot open seed script '" + cfg.seed_sql + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        exec->execute_script(ss.str());
      }
    }
    return exec.get();
  }

  kwsql::PipelineDeps deps() {
    kwsql::PipelineDeps d;
    d.schema = &get_schema();
    d.dictionary = &get_dictionary();
    d.store = &get_store();
    d.gateway = &get_gateway();
    d.templates = &get_templates();
    d.exec = get_exec();
    d.k = cfg.k;
    d.verbose_trace = cfg.verbosity > 0;
    return d;
  }
};

std::string strip_suffix(const std::string& path, const std::string& suffix) {
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return path.substr(0, path.size() - suffix.size());
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kwsql::Error("config", "cannot write '" + path + "'");
  out << content;
}

json link_to_json(const kwsql::KeywordDictionary& dict,
                  const kwsql::LinkResult& link) {
  json matches = json::array();
  for (const auto& m : link.matches.matches) {
    const auto& e = dict.entry(m.entry_index);
    json jm{{"keyword", m.keyword},
            {"class", kwsql::match_class_name(m.match_class)},
            {"score", m.score},
            {"table", e.table}};
    if (!e.column.empty()) jm["column"] = e.column;
    if (!e.value.empty()) jm["value"] = e.value;
    matches.push_back(std::move(jm));
  }
  json unmatched = json::array();
  for (const auto& u : link.matches.unmatched) unmatched.push_back(u);
  return json{{"tables", link.tables},
              {"matches", matches},
              {"unmatched", unmatched}};
}

std::map<int, double> parse_distribution(const std::string& text) {
  std::map<int, double> dist;
  for (const auto& part : kwsql::split(text, ',')) {
    auto kv = kwsql::split(part, ':');
    if (kv.size() != 2)
      throw kwsql::Error("config", "bad distribution entry '" + part + "'");
    dist[std::stoi(kv[0])] = std::stod(kv[1]);
  }
  return dist;
}

int run(int argc, char** argv) {
  CLI::App cli{"keyword-search-augmented text-to-SQL compiler"};
  cli.require_subcommand(1);
  // Global flags may follow the subcommand (kwsql eval suite --mode ...).
  cli.fallthrough();

  std::string config_path;
  std::string mode_override, question, tables_arg, benchmark_path;
  std::string values_path, output_path, dist_text = "1:1.0";
  int k_override = -1, concurrency = -1, target = 10;
  long long seed_override = -1;
  bool dump_trace = false;

  cli.add_option("--config", config_path, "Path to the JSON config file");
  cli.add_option("--mode", mode_override, "Ablation mode override");
  cli.add_option("--k", k_override, "Example budget override");
  cli.add_option("--seed", seed_override, "RNG seed override");
  cli.add_flag("--trace", dump_trace, "Dump the question trace");
  cli.add_option("--concurrency", concurrency, "Worker cap for eval");

  auto* index_cmd = cli.add_subcommand(
      "index", "Build the keyword dictionary from schema and values");
  index_cmd->add_option("values", values_path, "Value-triples JSONL file");

  auto* gen_cmd =
      cli.add_subcommand("gen-dataset", "Generate the synthetic example store");
  gen_cmd->add_option("output", output_path, "Output JSONL path");
  gen_cmd->add_option("--target", target, "Number of examples to generate");
  gen_cmd->add_option("--dist", dist_text,
                      "Table-count distribution, e.g. 1:0.5,2:0.5");

  auto* link_cmd =
      cli.add_subcommand("link", "Schema-link a question to its tables");
  link_cmd->add_option("question", question)->required();

  auto* view_cmd =
      cli.add_subcommand("view", "Synthesize the joining view for tables");
  view_cmd->add_option("tables", tables_arg, "Comma-separated table list")
      ->required();

  auto* ask_cmd = cli.add_subcommand("ask", "Compile a question to SQL");
  ask_cmd->add_option("question", question)->required();

  auto* eval_cmd = cli.add_subcommand("eval", "Run the benchmark suite");
  eval_cmd->add_option("benchmark", benchmark_path)->required();

  auto* repl_cmd = cli.add_subcommand("repl", "Interactive ask loop");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? 0 : 2;
  }

  App app;
  if (!config_path.empty()) app.cfg = load_config(config_path);
  if (!mode_override.empty()) app.cfg.mode = mode_override;
  if (k_override > 0) app.cfg.k = k_override;
  if (seed_override >= 0) app.cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (concurrency > 0) app.cfg.concurrency_cap = concurrency;

  kwsql::AblationMode mode = kwsql::ablation_mode_from_name(app.cfg.mode);

  if (*index_cmd) {
    const auto& schema = app.get_schema();
    std::vector<kwsql::ValueTriple> values;
    if (!values_path.empty())
      values = kwsql::load_value_triples_file(values_path);
    auto dict = kwsql::KeywordDictionary::build(schema, values);
    if (app.cfg.dictionary_path.empty())
      throw kwsql::Error("config", "dictionary_path is not configured");
    dict.save_file(app.cfg.dictionary_path);
    std::cout << "wrote " << dict.entries().size() << " entries to "
              << app.cfg.dictionary_path << "\n";
    return 0;
  }

  if (*gen_cmd) {
    kwsql::GenerationConfig gen;
    gen.examples_target = target;
    gen.rng_seed = app.cfg.seed;
    gen.table_count_distribution = parse_distribution(dist_text);
    kwsql::SqliteBackend* db = app.get_exec();
    if (!db)
      throw kwsql::Error("config",
                         "gen-dataset needs an execution backend for samples");
    kwsql::BackendValueSampler sampler(*db, app.get_schema());
    kwsql::SynthDeps deps;
    deps.schema = &app.get_schema();
    deps.values = &sampler;
    deps.gateway = &app.get_gateway();
    deps.templates = &app.get_templates();
    kwsql::GenerationResult result = kwsql::generate_dataset(gen, deps);
    std::string out =
        output_path.empty() ? app.cfg.examples_path : output_path;
    if (out.empty())
      throw kwsql::Error("config", "no output path for the example store");
    result.store.save_file(out);
    kwsql::write_discard_log(out + ".discards.jsonl", result.discards);
    std::cout << "stored " << result.store.size() << " examples ("
              << result.discards.size() << " discards) in " << out << "\n";
    if (!result.target_reached)
      std::cerr << "warning: attempt budget exhausted below target\n";
    return 0;
  }

  if (*view_cmd) {
    std::vector<std::string> tables;
    for (const auto& t : kwsql::split(tables_arg, ','))
      if (!kwsql::trim(t).empty()) tables.push_back(kwsql::trim(t));
    kwsql::ViewDefinition view = kwsql::synthesize_view(app.get_schema(), tables);
    std::cout << kwsql::render_view_sql(view) << "\n";
    return 0;
  }

  if (*link_cmd) {
    kwsql::PipelineDeps deps = app.deps();
    kwsql::LinkResult link = kwsql::schema_link(question, mode, deps);
    std::cout << link_to_json(app.get_dictionary(), link).dump(2) << "\n";
    return 0;
  }

  if (*ask_cmd) {
    kwsql::PipelineDeps deps = app.deps();
    deps.verbose_trace = deps.verbose_trace || dump_trace;
    kwsql::CompilationResult result = kwsql::answer(question, mode, deps);
    std::cout << result.sql_over_base << "\n";
    if (dump_trace) {
      std::string trace_path =
          "trace-" + kwsql::fnv1a64_hex(question).substr(0, 12) + ".json";
      write_file(trace_path, result.trace.to_json());
      std::cout << result.trace.to_json() << "\n";
    }
    return 0;
  }

  if (*eval_cmd) {
    kwsql::PipelineDeps deps = app.deps();
    auto questions = kwsql::load_benchmark_file(benchmark_path);
    kwsql::EvalReport report = kwsql::run_benchmark(
        questions, mode, deps, app.cfg.concurrency_cap);
    std::string base = strip_suffix(benchmark_path, ".jsonl");
    write_file(base + ".report.json", kwsql::report_to_json(report));
    std::string text = kwsql::render_report_text(report);
    write_file(base + ".report.txt", text);
    write_file(base + ".review.jsonl", kwsql::render_manual_review(report));
    std::cout << text;
    return 0;
  }

  if (*repl_cmd) {
    kwsql::PipelineDeps deps = app.deps();
    std::string line;
    std::cout << "kwsql> " << std::flush;
    while (std::getline(std::cin, line)) {
      std::string q = kwsql::trim(line);
      if (q == "exit" || q == "quit") break;
      if (!q.empty()) {
        try {
          kwsql::CompilationResult result = kwsql::answer(q, mode, deps);
          std::cout << result.sql_over_base << "\n";
        } catch (const kwsql::Error& e) {
          std::cout << "ERROR " << e.step() << ": " << e.what() << "\n";
        }
      }
      std::cout << "kwsql> " << std::flush;
    }
    return 0;
  }

  return 2;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kwsql::Error& e) {
    std::cerr << "ERROR " << e.step() << ": " << e.what() << "\n";
    return e.step() == "config" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR internal: " << e.what() << "\n";
    return 1;
  }
}
