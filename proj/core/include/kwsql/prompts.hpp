#pragma once

#include <map>
#include <string>
#include <vector>

#include "kwsql/llm.hpp"

namespace kwsql {

using PromptContext = std::map<std::string, std::string>;

// Prompt templates live as plain-text files, one "<kind>.txt" per prompt
// kind, with "{{name}}" placeholders. Every placeholder must be fed a
// non-empty context value and every context value must be consumed, so a
// rendered prompt always carries all of its inputs.
class TemplateSet {
public:
  static TemplateSet load_dir(const std::string& dir);

  std::vector<ChatMessage> build_prompt(PromptKind kind,
                                        const PromptContext& context) const;

  const std::string& text(PromptKind kind) const;

private:
  std::map<std::string, std::string> texts_; // kind name -> template text
};

} // namespace kwsql
