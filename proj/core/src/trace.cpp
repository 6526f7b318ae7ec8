#include "kwsql/trace.hpp"

#include <json.hpp>

#include "kwsql/text.hpp"

namespace kwsql {

void Trace::record(const std::string& step, const std::string& input,
                   const std::string& output) {
  StepRecord rec;
  rec.step = step;
  rec.input_digest = fnv1a64_hex(input);
  rec.output_digest = fnv1a64_hex(output);
  if (verbose_) rec.raw = output;
  steps_.push_back(std::move(rec));
}

void Trace::warn(const std::string& step, const std::string& message) {
  warnings_.push_back({step, message});
}

void Trace::append(const Trace& other) {
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
  warnings_.insert(warnings_.end(), other.warnings_.begin(),
                   other.warnings_.end());
}

bool Trace::has_step(const std::string& step) const {
  for (const auto& s : steps_)
    if (s.step == step) return true;
  return false;
}

std::string Trace::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : steps_) {
    nlohmann::json rec{{"step", s.step},
                       {"input_digest", s.input_digest},
                       {"output_digest", s.output_digest}};
    if (verbose_) rec["raw"] = s.raw;
    steps.push_back(std::move(rec));
  }
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : warnings_)
    warnings.push_back({{"step", w.step}, {"message", w.message}});
  return nlohmann::json{{"steps", steps}, {"warnings", warnings}}.dump(2);
}

} // namespace kwsql
