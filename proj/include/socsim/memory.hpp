#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "socsim/batch.hpp"
#include "socsim/matrix.hpp"
#include "socsim/types.hpp"

namespace socsim {

// Folds one finished round into every agent's memory. Depends only on the two batches, so
// replaying logged batches rebuilds identical stores.
inline void update_memories(std::map<UserId, MemoryStores>& memories, const Roster& roster,
                            const RoundBatch& prev, const RoundBatch& batch, double beta_rec) {
  const int t = batch.round;

  for (const auto& u : roster.users()) {
    auto& mem = memories[u];
    for (const auto& a : visible_content(u, prev))
      mem.conversation.push_back({t, a.id, ConversationRole::Saw});
  }

  auto touch = [&](const UserId& self, const UserId& peer) -> RelationshipEntry& {
    auto& rel = memories[self].relationship[peer];
    rel.last_round = t;
    return rel;
  };

  for (const auto& a : batch.actions) {
    if (a.type == ActionType::Not) continue;
    auto& own = memories[a.sender];
    own.conversation.push_back({t, a.id, ConversationRole::Sent});

    std::set<UserId> reached;
    if (auto r = a.receiver()) reached.insert(*r);
    for (const auto& m : a.mentions) reached.insert(m);
    reached.erase(a.sender);
    for (const auto& peer : reached) {
      memories[peer].conversation.push_back({t, a.id, ConversationRole::Received});
      auto& out = touch(a.sender, peer);
      ++out.sent;
      out.note = std::string(to_string(a.type)) + " sent in round " + std::to_string(t);
      auto& in = touch(peer, a.sender);
      ++in.received;
      in.note = std::string(to_string(a.type)) + " received in round " + std::to_string(t);
    }

    if (a.topic) {
      auto& op = own.opinion[*a.topic];
      op.strength = std::clamp(op.strength + 0.1 * a.sentiment, -1.0, 1.0);
      op.text = std::string(to_string(a.tone)) + " on " + *a.topic;
    }
  }

  std::map<std::pair<UserId, UserId>, int> likes;
  for (const auto& v : batch.votes)
    if (v.value > 0) ++likes[{v.voter, v.author}];
  for (const auto& [pair, _] : likes) {
    touch(pair.first, pair.second);
    touch(pair.second, pair.first);
  }
  auto count = [&](const UserId& from, const UserId& to) {
    auto it = likes.find({from, to});
    return it == likes.end() ? 0 : it->second;
  };
  for (auto& [self, mem] : memories)
    for (auto& [peer, rel] : mem.relationship) {
      rel.likes_given_ema = beta_rec * rel.likes_given_ema + (1.0 - beta_rec) * count(self, peer);
      rel.likes_received_ema =
          beta_rec * rel.likes_received_ema + (1.0 - beta_rec) * count(peer, self);
    }
}

// Peers ordered by most recent interaction, then id.
inline std::vector<UserId> recent_partners(const MemoryStores& mem, std::size_t limit = 5) {
  std::vector<std::pair<int, UserId>> order;
  for (const auto& [peer, rel] : mem.relationship)
    if (rel.sent + rel.received > 0) order.emplace_back(rel.last_round, peer);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<UserId> out;
  for (const auto& [_, peer] : order) {
    if (out.size() >= limit) break;
    out.push_back(peer);
  }
  return out;
}

}  // namespace socsim
