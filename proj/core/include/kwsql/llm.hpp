#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kwsql {

enum class Role { System, User, Assistant };

struct ChatMessage {
  Role role = Role::User;
  std::string content;
};

enum class PromptKind {
  KeywordExtraction,
  SchemaLinking,
  QuestionDecomposition,
  SqlCompilation,
  SynthCreateQuestion,
  SynthGenerateSql,
  SynthImproveQuestion,
};

const char* prompt_kind_name(PromptKind kind);
PromptKind prompt_kind_from_name(const std::string& name);

struct CallParams {
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;
};

// Message contents joined by newlines; the text transcript rules and hashes
// match against.
std::string join_messages(const std::vector<ChatMessage>& messages);

class LlmBackend {
public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(PromptKind kind,
                               const std::vector<ChatMessage>& messages,
                               const CallParams& params) = 0;
};

// One transcript rule; all present criteria must hold. First match wins.
struct TranscriptRule {
  std::optional<std::string> kind;     // prompt kind name
  std::optional<std::string> contains; // substring of the joined prompt
  std::optional<std::string> hash;     // fnv1a64 hex of the joined prompt
  std::string response;
};

// Deterministic LLM stand-in answering from an ordered rule list.
class ScriptedBackend : public LlmBackend {
public:
  explicit ScriptedBackend(std::vector<TranscriptRule> rules);
  static ScriptedBackend from_file(const std::string& path);
  static std::vector<TranscriptRule> load_rules(const std::string& path);

  std::string complete(PromptKind kind,
                       const std::vector<ChatMessage>& messages,
                       const CallParams& params) override;

  const std::vector<TranscriptRule>& rules() const { return rules_; }

private:
  std::vector<TranscriptRule> rules_;
};

struct HttpBackendConfig {
  std::string endpoint; // full chat-completions URL
  std::string model;
  std::string api_key;  // usually from LLM_API_KEY
  int max_retries = 2;
  int timeout_seconds = 30;
  int max_in_flight = 4;
};

// Chat-completions HTTP client (OpenAI-compatible wire shape). Retries
// transient transport failures and 429/5xx with exponential backoff.
class HttpBackend : public LlmBackend {
public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  std::string complete(PromptKind kind,
                       const std::vector<ChatMessage>& messages,
                       const CallParams& params) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class PayloadType { JsonArrayOfStrings, FencedSql, JsonObject };

// Tolerant extraction: prose around the first fenced block or first JSON
// token is stripped. Failures raise a parse Error carrying the raw response.
nlohmann::json parse_structured(const std::string& response, PayloadType type);

std::string parse_fenced_sql(const std::string& response);
std::vector<std::string> parse_string_array(const std::string& response);

} // namespace kwsql
