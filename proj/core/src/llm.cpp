#include "kwsql/llm.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "kwsql/error.hpp"
#include "kwsql/text.hpp"

namespace kwsql {

using nlohmann::json;

const char* prompt_kind_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::KeywordExtraction: return "keyword_extraction";
    case PromptKind::SchemaLinking: return "schema_linking";
    case PromptKind::QuestionDecomposition: return "question_decomposition";
    case PromptKind::SqlCompilation: return "sql_compilation";
    case PromptKind::SynthCreateQuestion: return "synth_create_question";
    case PromptKind::SynthGenerateSql: return "synth_generate_sql";
    case PromptKind::SynthImproveQuestion: return "synth_improve_question";
  }
  return "unknown";
}

PromptKind prompt_kind_from_name(const std::string& name) {
  static const std::pair<const char*, PromptKind> table[] = {
      {"keyword_extraction", PromptKind::KeywordExtraction},
      {"schema_linking", PromptKind::SchemaLinking},
      {"question_decomposition", PromptKind::QuestionDecomposition},
      {"sql_compilation", PromptKind::SqlCompilation},
      {"synth_create_question", PromptKind::SynthCreateQuestion},
      {"synth_generate_sql", PromptKind::SynthGenerateSql},
      {"synth_improve_question", PromptKind::SynthImproveQuestion},
  };
  for (const auto& [n, k] : table)
    if (name == n) return k;
  throw Error("config", "unknown prompt kind '" + name + "'");
}

std::string join_messages(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n";
    out += m.content;
  }
  return out;
}

ScriptedBackend::ScriptedBackend(std::vector<TranscriptRule> rules)
    : rules_(std::move(rules)) {}

std::vector<TranscriptRule> ScriptedBackend::load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open transcript file '" + path + "'");
  std::vector<TranscriptRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      TranscriptRule rule;
      const json& match = j.at("match");
      if (match.contains("kind")) rule.kind = match.at("kind").get<std::string>();
      if (match.contains("contains"))
        rule.contains = match.at("contains").get<std::string>();
      if (match.contains("hash")) rule.hash = match.at("hash").get<std::string>();
      if (!rule.kind && !rule.contains && !rule.hash)
        throw Error("parse", "rule without match criteria");
      rule.response = j.at("response").get<std::string>();
      rules.push_back(std::move(rule));
    } catch (const json::exception& e) {
      throw Error("parse", "transcript line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return rules;
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
  return ScriptedBackend(load_rules(path));
}

std::string ScriptedBackend::complete(PromptKind kind,
                                      const std::vector<ChatMessage>& messages,
                                      const CallParams&) {
  std::string text = join_messages(messages);
  std::string kind_name = prompt_kind_name(kind);
  for (const auto& rule : rules_) {
    if (rule.kind && *rule.kind != kind_name) continue;
    if (rule.contains && text.find(*rule.contains) == std::string::npos)
      continue;
    if (rule.hash && *rule.hash != fnv1a64_hex(text)) continue;
    return rule.response;
  }
  throw Error("gateway",
              "no transcript rule matches a " + kind_name + " prompt", text);
}

// ---------------------------------------------------------------------------
// HTTP backend

struct HttpBackend::Impl {
  HttpBackendConfig config;
  std::string scheme_host; // "http://host:port"
  std::string path;
  std::mutex mutex;
  std::condition_variable cv;
  int in_flight = 0;
};

namespace {

void split_endpoint(const std::string& endpoint, std::string& scheme_host,
                    std::string& path) {
  std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw Error("config", "endpoint URL must include a scheme: " + endpoint);
  std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) {
    scheme_host = endpoint;
    path = "/v1/chat/completions";
  } else {
    scheme_host = endpoint.substr(0, slash);
    path = endpoint.substr(slash);
  }
}

const char* role_name(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

} // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  split_endpoint(impl_->config.endpoint, impl_->scheme_host, impl_->path);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::complete(PromptKind kind,
                                  const std::vector<ChatMessage>& messages,
                                  const CallParams& params) {
  json body;
  body["model"] = impl_->config.model;
  json msgs = json::array();
  for (const auto& m : messages)
    msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  if (params.seed) body["seed"] = *params.seed;
  std::string payload = body.dump();

  {
    std::unique_lock<std::mutex> lock(impl_->mutex);
    impl_->cv.wait(lock, [&] {
      return impl_->in_flight < impl_->config.max_in_flight;
    });
    ++impl_->in_flight;
  }
  struct Release {
    Impl* impl;
    ~Release() {
      std::lock_guard<std::mutex> lock(impl->mutex);
      --impl->in_flight;
      impl->cv.notify_one();
    }
  } release{impl_.get()};

  std::string last_error;
  for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(250L << (attempt - 1)));
    }
    httplib::Client client(impl_->scheme_host);
    client.set_connection_timeout(impl_->config.timeout_seconds, 0);
    client.set_read_timeout(impl_->config.timeout_seconds, 0);
    httplib::Headers headers;
    if (!impl_->config.api_key.empty())
      headers.emplace("Authorization", "Bearer " + impl_->config.api_key);
    auto res = client.Post(impl_->path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure against " + impl_->scheme_host + ": " +
                   httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status) + " from " +
                   impl_->config.endpoint;
      continue;
    }
    if (res->status != 200)
      throw Error("gateway",
                  "chat completion failed with status " +
                      std::to_string(res->status) + " for a " +
                      std::string(prompt_kind_name(kind)) + " prompt",
                  res->body);
    try {
      json doc = json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception& e) {
      throw Error("gateway",
                  std::string("malformed chat-completion response: ") + e.what(),
                  res->body);
    }
  }
  throw Error("gateway", last_error.empty() ? "chat completion failed"
                                            : last_error);
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// First fenced block, if any; tolerates a language tag after the fence.
bool extract_fenced(const std::string& text, std::string& inner) {
  std::size_t open = text.find("```");
  if (open == std::string::npos) return false;
  std::size_t body = open + 3;
  while (body < text.size() && text[body] != '\n' && text[body] != '`') ++body;
  if (body < text.size() && text[body] == '\n') ++body;
  std::size_t close = text.find("```", body);
  if (close == std::string::npos) return false;
  inner = trim(text.substr(body, close - body));
  return true;
}

// First balanced JSON array/object, string-aware.
bool extract_json_region(const std::string& text, char open_c, char close_c,
                         std::string& region) {
  std::size_t open = text.find(open_c);
  if (open == std::string::npos) return false;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == open_c) ++depth;
    else if (c == close_c) {
      --depth;
      if (depth == 0) {
        region = text.substr(open, i - open + 1);
        return true;
      }
    }
  }
  return false;
}

} // namespace

nlohmann::json parse_structured(const std::string& response, PayloadType type) {
  std::string fenced;
  bool has_fence = extract_fenced(response, fenced);
  const std::string& source = has_fence ? fenced : response;

  switch (type) {
    case PayloadType::FencedSql: {
      std::string candidate = has_fence ? fenced : trim(response);
      if (!has_fence && !starts_with_ci(candidate, "select"))
        throw Error("parse", "no SQL payload found in response", response);
      return json(candidate);
    }
    case PayloadType::JsonArrayOfStrings: {
      std::string region;
      if (!extract_json_region(source, '[', ']', region))
        throw Error("parse", "no JSON array found in response", response);
      json arr;
      try {
        arr = json::parse(region);
      } catch (const json::exception& e) {
        throw Error("parse", std::string("malformed JSON array: ") + e.what(),
                    response);
      }
      for (const auto& v : arr)
        if (!v.is_string())
          throw Error("parse", "JSON array contains a non-string element",
                      response);
      return arr;
    }
    case PayloadType::JsonObject: {
      std::string region;
      if (!extract_json_region(source, '{', '}', region))
        throw Error("parse", "no JSON object found in response", response);
      try {
        return json::parse(region);
      } catch (const json::exception& e) {
        throw Error("parse", std::string("malformed JSON object: ") + e.what(),
                    response);
      }
    }
  }
  throw Error("parse", "unsupported payload type", response);
}

std::string parse_fenced_sql(const std::string& response) {
  return parse_structured(response, PayloadType::FencedSql).get<std::string>();
}

std::vector<std::string> parse_string_array(const std::string& response) {
  json arr = parse_structured(response, PayloadType::JsonArrayOfStrings);
  std::vector<std::string> out;
  for (const auto& v : arr) out.push_back(v.get<std::string>());
  return out;
}

} // namespace kwsql
