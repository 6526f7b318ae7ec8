#pragma once

#include <string>
#include <vector>

namespace kwsql {

struct StepRecord {
  std::string step;
  std::string input_digest;
  std::string output_digest;
  std::string raw; // kept only when the trace is verbose
};

struct TraceWarning {
  std::string step;
  std::string message;
};

// Ordered log of pipeline steps for one question. Every LLM call is recorded
// with a digest of the rendered prompt and of the raw response.
class Trace {
public:
  explicit Trace(bool verbose = false) : verbose_(verbose) {}

  void record(const std::string& step, const std::string& input,
              const std::string& output);
  void warn(const std::string& step, const std::string& message);

  // Appends another trace's records verbatim (digests preserved).
  void append(const Trace& other);

  const std::vector<StepRecord>& steps() const { return steps_; }
  const std::vector<TraceWarning>& warnings() const { return warnings_; }
  bool verbose() const { return verbose_; }

  bool has_step(const std::string& step) const;

  std::string to_json() const;

private:
  bool verbose_ = false;
  std::vector<StepRecord> steps_;
  std::vector<TraceWarning> warnings_;
};

} // namespace kwsql
