#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "socsim/types.hpp"

namespace socsim {

// Lowercase, trim, collapse inner whitespace and keep at most five words.
inline std::string canonical_topic(std::string_view raw) {
  std::istringstream in{std::string(raw)};
  std::string word, out;
  int words = 0;
  while (in >> word && words < 5) {
    for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (!out.empty()) out += ' ';
    out += word;
    ++words;
  }
  return out;
}

// Everything u can see in a batch: all public content plus DMs addressed to u, ordered by id.
inline std::vector<Action> visible_content(const UserId& u, const RoundBatch& batch) {
  std::vector<Action> out;
  for (const auto& a : batch.actions) {
    if (is_public(a.type) || (a.type == ActionType::Dm && a.recipient == u)) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const Action& x, const Action& y) { return x.id < y.id; });
  return out;
}

inline std::vector<const Action*> actions_of(const UserId& u, const RoundBatch& batch) {
  std::vector<const Action*> out;
  for (const auto& a : batch.actions)
    if (a.sender == u) out.push_back(&a);
  return out;
}

// Topic exposure per user plus the platform-wide topic vocabulary seen so far.
struct TopicState {
  std::map<UserId, std::set<std::string>> seen;
  std::set<std::string> platform;

  const std::set<std::string>& seen_by(const UserId& u) const {
    static const std::set<std::string> empty;
    auto it = seen.find(u);
    return it == seen.end() ? empty : it->second;
  }

  std::size_t num_platform_topics() const { return platform.size(); }

  void record_platform(const RoundBatch& batch) {
    for (const auto& a : batch.actions)
      if (a.topic) platform.insert(*a.topic);
  }

  void record_exposure(const UserId& u, const std::vector<Action>& shown) {
    auto& s = seen[u];
    for (const auto& a : shown)
      if (a.topic) s.insert(*a.topic);
  }

  bool operator==(const TopicState&) const = default;
};

// Structural checks on a finalized batch. Unknown users mean the state is corrupt.
inline void check_batch(const RoundBatch& batch, const std::set<UserId>& users) {
  auto known = [&](const UserId& u) {
    if (!users.count(u)) throw CorruptionError("unknown user id '" + u + "' in round " +
                                               std::to_string(batch.round));
  };
  for (const auto& a : batch.actions) {
    known(a.sender);
    if (a.recipient) known(*a.recipient);
    if (a.target_author) known(*a.target_author);
    for (const auto& m : a.mentions) known(m);
    if (a.round != batch.round) throw CorruptionError("action round mismatch");
    if (a.mentions.count(a.sender)) throw CorruptionError("sender mentions itself");
    if (a.sentiment < -1.0 || a.sentiment > 1.0) throw CorruptionError("sentiment out of range");
    switch (a.type) {
      case ActionType::Post:
        if (a.recipient || a.target_id || !a.topic) throw CorruptionError("malformed POST");
        break;
      case ActionType::Com:
        if (a.recipient || !a.target_id || !a.target_author) throw CorruptionError("malformed COM");
        break;
      case ActionType::Dm:
        if (!a.recipient) throw CorruptionError("DM without recipient");
        break;
      case ActionType::Not:
        if (a.recipient || a.topic || a.target_id || !a.mentions.empty())
          throw CorruptionError("malformed NOT");
        break;
    }
  }
  for (const auto& v : batch.votes) {
    known(v.voter);
    known(v.author);
    if (v.voter == v.author) throw CorruptionError("self vote");
    if (v.value < -1 || v.value > 1) throw CorruptionError("vote value out of range");
    const Action* c = batch.find(v.content_id);
    if (!c || !is_public(c->type)) throw CorruptionError("vote on non-public content");
  }
}

}  // namespace socsim
