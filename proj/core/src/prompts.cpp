#include "kwsql/prompts.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "kwsql/error.hpp"

namespace kwsql {

namespace {

const PromptKind kAllKinds[] = {
    PromptKind::KeywordExtraction,   PromptKind::SchemaLinking,
    PromptKind::QuestionDecomposition, PromptKind::SqlCompilation,
    PromptKind::SynthCreateQuestion, PromptKind::SynthGenerateSql,
    PromptKind::SynthImproveQuestion,
};

} // namespace

TemplateSet TemplateSet::load_dir(const std::string& dir) {
  TemplateSet set;
  for (PromptKind kind : kAllKinds) {
    std::string name = prompt_kind_name(kind);
    std::string path = dir + "/" + name + ".txt";
    std::ifstream in(path);
    if (!in) throw Error("config", "missing prompt template '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    set.texts_[name] = ss.str();
  }
  return set;
}

const std::string& TemplateSet::text(PromptKind kind) const {
  return texts_.at(prompt_kind_name(kind));
}

std::vector<ChatMessage> TemplateSet::build_prompt(
    PromptKind kind, const PromptContext& context) const {
  const std::string& tpl = text(kind);
  std::string kind_name = prompt_kind_name(kind);
  std::string rendered;
  rendered.reserve(tpl.size());
  std::set<std::string> used;
  std::size_t i = 0;
  while (i < tpl.size()) {
    std::size_t open = tpl.find("{{", i);
    if (open == std::string::npos) {
      rendered += tpl.substr(i);
      break;
    }
    std::size_t close = tpl.find("}}", open + 2);
    if (close == std::string::npos)
      throw Error("config", "unterminated placeholder in " + kind_name +
                                " template");
    rendered += tpl.substr(i, open - i);
    std::string slot = tpl.substr(open + 2, close - open - 2);
    auto it = context.find(slot);
    if (it == context.end() || it->second.empty())
      throw Error("gateway", kind_name + " prompt is missing the '" + slot +
                                 "' slot");
    rendered += it->second;
    used.insert(slot);
    i = close + 2;
  }
  for (const auto& [slot, value] : context) {
    if (!used.count(slot))
      throw Error("gateway", kind_name + " template has no '" + slot +
                                 "' placeholder");
  }
  return {ChatMessage{Role::User, rendered}};
}

} // namespace kwsql
