#pragma once

#include <map>
#include <string>
#include <vector>

#include "socsim/llm/templates.hpp"
#include "socsim/types.hpp"

namespace socsim::llm {

struct Message {
  std::string role;
  std::string content;
  bool operator==(const Message&) const = default;
};

struct PromptVars {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;  // rendered one item per line
  std::vector<std::string> truncatable;  // lists that may lose their oldest items, in drop order

  PromptVars& set(const std::string& k, std::string v) {
    scalars[k] = std::move(v);
    return *this;
  }
  PromptVars& list(const std::string& k, std::vector<std::string> v, bool can_truncate = false) {
    lists[k] = std::move(v);
    if (can_truncate) truncatable.push_back(k);
    return *this;
  }
};

namespace detail {

inline std::string lookup(const PromptVars& vars, const std::string& key, bool& found) {
  found = true;
  if (auto it = vars.scalars.find(key); it != vars.scalars.end()) return it->second;
  if (auto it = vars.lists.find(key); it != vars.lists.end()) {
    if (it->second.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      if (i) out += '\n';
      out += it->second[i];
    }
    return out;
  }
  found = false;
  return {};
}

inline bool bound_nonempty(const PromptVars& vars, const std::string& key) {
  if (auto it = vars.scalars.find(key); it != vars.scalars.end()) return !it->second.empty();
  if (auto it = vars.lists.find(key); it != vars.lists.end()) return !it->second.empty();
  return false;
}

inline std::string expand(const std::string& text, const PromptVars& vars, const std::string& tpl) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      out += '{';
      i += 2;
    } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      out += '}';
      i += 2;
    } else if (c == '{') {
      const auto close = text.find('}', i);
      if (close == std::string::npos) throw RenderError(tpl + ": unterminated placeholder");
      std::string key = text.substr(i + 1, close - i - 1);
      if (!key.empty() && key[0] == '?') {
        key.erase(0, 1);
        const std::string end_tag = "{/" + key + "}";
        const auto end = text.find(end_tag, close);
        if (end == std::string::npos) throw RenderError(tpl + ": optional block '" + key + "' not closed");
        if (bound_nonempty(vars, key)) out += expand(text.substr(close + 1, end - close - 1), vars, tpl);
        i = end + end_tag.size();
        continue;
      }
      bool found = false;
      auto value = lookup(vars, key, found);
      if (!found) throw RenderError(tpl + ": unbound placeholder '" + key + "'");
      out += value;
      i = close + 1;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

}  // namespace detail

// Expands a template into system and user messages. When `char_budget` is non-zero and the
// prompt is longer, truncatable lists drop their oldest entries until it fits.
inline std::vector<Message> render(const PromptTemplate& tpl, PromptVars vars,
                                   std::size_t char_budget = 0) {
  for (const auto& name : tpl.required_lists) {
    auto it = vars.lists.find(name);
    if (it == vars.lists.end()) throw RenderError(tpl.name + ": unbound placeholder '" + name + "'");
    if (it->second.empty()) throw RenderError(tpl.name + ": list '" + name + "' must not be empty");
  }
  while (true) {
    std::vector<Message> msgs{{"system", detail::expand(tpl.system, vars, tpl.name)},
                              {"user", detail::expand(tpl.user, vars, tpl.name)}};
    const std::size_t size = msgs[0].content.size() + msgs[1].content.size();
    if (char_budget == 0 || size <= char_budget) return msgs;
    bool dropped = false;
    for (const auto& name : vars.truncatable) {
      auto& items = vars.lists[name];
      const std::size_t keep = tpl.required_lists.count(name) ? 1 : 0;
      if (items.size() > keep) {
        items.erase(items.begin());
        dropped = true;
        break;
      }
    }
    if (!dropped)
      throw RenderError(tpl.name + ": prompt of " + std::to_string(size) +
                        " characters exceeds the budget of " + std::to_string(char_budget));
  }
}

}  // namespace socsim::llm
