#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kwsql {

// All failures surface as Error. `step` is a short machine-readable label
// (config, parse, validation, gateway, execution, ...) used by the CLI for
// its "ERROR <step>:" prefix and by traces.
class Error : public std::runtime_error {
public:
  Error(std::string step, const std::string& message)
      : std::runtime_error(message), step_(std::move(step)) {}

  Error(std::string step, const std::string& message, std::string raw)
      : std::runtime_error(message), step_(std::move(step)), raw_(std::move(raw)) {}

  const std::string& step() const noexcept { return step_; }

  // Raw payload attached to the failure (e.g. an unparsable LLM response).
  const std::string& raw() const noexcept { return raw_; }

private:
  std::string step_;
  std::string raw_;
};

} // namespace kwsql
