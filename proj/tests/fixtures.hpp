#pragma once

// Small builders shared by the test binaries.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "socsim/batch.hpp"
#include "socsim/config.hpp"
#include "socsim/serialize.hpp"
#include "socsim/types.hpp"

namespace fx {

using namespace socsim;

inline std::filesystem::path source_dir() { return SOCSIM_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path test_data_dir() { return source_dir() / "tests" / "data"; }

struct BatchBuilder {
  RoundBatch batch;
  ActionId next = 1;

  explicit BatchBuilder(int round = 1, ActionId first_id = 1) : next(first_id) { batch.round = round; }

  Action& add(ActionType type, const UserId& sender) {
    Action a;
    a.id = next++;
    a.round = batch.round;
    a.type = type;
    a.sender = sender;
    batch.actions.push_back(a);
    return batch.actions.back();
  }
  Action& post(const UserId& s, const std::string& topic, std::set<UserId> mentions = {}) {
    auto& a = add(ActionType::Post, s);
    a.topic = topic;
    a.mentions = std::move(mentions);
    return a;
  }
  Action& dm(const UserId& s, const UserId& r, double sentiment = 0.0, const std::string& topic = "chat") {
    auto& a = add(ActionType::Dm, s);
    a.recipient = r;
    a.topic = topic;
    a.sentiment = sentiment;
    return a;
  }
  Action& com(const UserId& s, const UserId& target_author, ActionId target, double sentiment = 0.0,
              const std::string& topic = "chat", std::set<UserId> mentions = {}) {
    auto& a = add(ActionType::Com, s);
    a.target_id = target;
    a.target_author = target_author;
    a.topic = topic;
    a.sentiment = sentiment;
    a.mentions = std::move(mentions);
    return a;
  }
  Action& nothing(const UserId& s) { return add(ActionType::Not, s); }
  void vote(const UserId& voter, const Action& item, int value) {
    batch.votes.push_back({voter, item.id, item.sender, value, batch.round});
  }
  void vote(const UserId& voter, ActionId id, const UserId& author, int value) {
    batch.votes.push_back({voter, id, author, value, batch.round});
  }
};

inline std::vector<UserId> users(int n) {
  std::vector<UserId> out;
  for (int i = 1; i <= n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%02d", i);
    out.push_back(buf);
  }
  return out;
}

// Random but structurally valid pair of consecutive batches over `n` users, each acting
// `slots` times. Comments target the previous batch; votes target this batch's public items.
struct FuzzRound {
  RoundBatch prev;
  RoundBatch batch;
  TopicState topics;
};

inline FuzzRound fuzz_round(std::mt19937_64& rng, int n, int slots) {
  const auto ids = users(n);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  std::uniform_int_distribution<int> pick_user(0, n - 1), pick_type(0, 3), pick_topic(0, 5),
      pick_vote(-1, 1);
  std::uniform_real_distribution<double> senti(-1.0, 1.0), unit(0.0, 1.0);

  auto other = [&](const UserId& u) {
    UserId v;
    do v = ids[pick_user(rng)];
    while (v == u);
    return v;
  };
  auto fill = [&](BatchBuilder& b, const RoundBatch* target_pool) {
    for (const auto& u : ids)
      for (int k = 0; k < slots; ++k) {
        int type = pick_type(rng);
        std::vector<const Action*> pool;
        if (target_pool)
          for (const auto& a : target_pool->actions)
            if (is_public(a.type) && a.sender != u) pool.push_back(&a);
        if (type == 1 && pool.empty()) type = 0;
        std::set<UserId> mentions;
        if (unit(rng) < 0.3) mentions.insert(other(u));
        switch (type) {
          case 0: b.post(u, vocab[pick_topic(rng)], mentions); break;
          case 1: {
            const Action* t = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
            b.com(u, t->sender, t->id, senti(rng), vocab[pick_topic(rng)], mentions);
            break;
          }
          case 2: b.dm(u, other(u), senti(rng), vocab[pick_topic(rng)]); break;
          default: b.nothing(u); break;
        }
      }
    for (const auto& u : ids)
      for (const auto& a : b.batch.actions)
        if (is_public(a.type) && a.sender != u && unit(rng) < 0.4) b.vote(u, a, pick_vote(rng));
  };

  FuzzRound out;
  BatchBuilder p(1, 1);
  fill(p, nullptr);
  BatchBuilder c(2, p.next);
  fill(c, &p.batch);
  out.prev = p.batch;
  out.batch = c.batch;
  out.topics.record_platform(out.prev);
  for (const auto& u : ids)
    for (const auto& t : vocab)
      if (out.topics.platform.count(t) && unit(rng) < 0.5) out.topics.seen[u].insert(t);
  return out;
}

inline RewardWeights random_weights(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  RewardWeights w;
  double s = 0.0;
  for (auto& x : w.values) s += (x = e(rng));
  for (auto& x : w.values) x /= s;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < w.values.size(); ++i) sum += w.values[i];
  w.values.back() = 1.0 - sum;
  if (w.values.back() < 0.0) w.values.back() = 0.0;
  return w;
}

}  // namespace fx
