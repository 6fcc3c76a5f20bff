#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "socsim/batch.hpp"
#include "socsim/types.hpp"

namespace socsim::rewards {

struct Params {
  double beta_soc = 0.5;
  double beta_inf = 0.5;
  double beta_pre = 0.5;
  double beta_coord = 0.5;
  double beta_emo = 1.0;
  double epsilon = 1e-6;
};

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Social interaction: share of own slots spent on direct exchanges, and share of all
// direct exchanges that landed on u.
inline double soc(const UserId& u, const RoundBatch& batch, int actions_per_round, double beta) {
  if (actions_per_round < 1) throw DomainError("actions_per_round must be >= 1");
  int sent = 0, received = 0, direct = 0;
  for (const auto& a : batch.actions) {
    if (!is_direct(a.type)) continue;
    ++direct;
    if (a.sender == u) ++sent;
    if (a.receiver() == u) ++received;
  }
  const double sent_term = static_cast<double>(sent) / actions_per_round;
  const double rec_term = direct == 0 ? 0.0 : static_cast<double>(received) / direct;
  return (1.0 - beta) * sent_term + beta * rec_term;
}

// Information seeking over an explicit recommendation list. `num_topics` is the platform
// vocabulary size; every topic in `recommended` must belong to it.
inline double inf(const std::vector<Action>& recommended, const std::set<std::string>& history,
                  std::size_t num_topics, double beta) {
  std::map<std::string, int> counts;
  int total = 0;
  for (const auto& a : recommended) {
    if (!a.topic) continue;
    ++counts[*a.topic];
    ++total;
  }
  if (total == 0) return 0.0;
  if (counts.size() > num_topics)
    throw DomainError("recommended topics exceed the platform vocabulary size");

  int unseen = 0;
  double entropy = 0.0;
  for (const auto& [topic, n] : counts) {
    if (!history.count(topic)) ++unseen;
    const double p = static_cast<double>(n) / total;
    entropy -= p * std::log(p);
  }
  const double k = static_cast<double>(num_topics);
  const double novelty = unseen / k;
  // a uniform spread over all k topics can round one ulp past 1
  const double diversity = num_topics > 1 ? std::min(1.0, entropy / std::log(k)) : 0.0;
  return (1.0 - beta) * novelty + beta * diversity;
}

inline double inf(const UserId& u, const std::vector<Action>& recommended, const TopicState& topics,
                  double beta) {
  for (const auto& a : recommended)
    if (a.topic && !topics.platform.count(*a.topic))
      throw DomainError("recommended topic '" + *a.topic + "' unknown to the platform");
  return inf(recommended, topics.seen_by(u), topics.num_platform_topics(), beta);
}

// Likes and dislikes received on u's round-t posts.
struct Feedback {
  int likes = 0;
  int dislikes = 0;
};

inline Feedback post_feedback(const UserId& u, const RoundBatch& batch) {
  std::set<ActionId> posts;
  for (const auto& a : batch.actions)
    if (a.sender == u && a.type == ActionType::Post) posts.insert(a.id);
  Feedback f;
  for (const auto& v : batch.votes) {
    if (!posts.count(v.content_id)) continue;
    if (v.value > 0) ++f.likes;
    if (v.value < 0) ++f.dislikes;
  }
  return f;
}

// Unclamped self-presentation value; the feedback term may push it below zero.
inline double pre_raw(int posts, int own_actions, Feedback fb, int num_agents, int actions_per_round,
                      double beta) {
  if (num_agents < 2) throw DomainError("self-presentation needs at least two agents");
  const double post_share = own_actions == 0 ? 0.0 : static_cast<double>(posts) / own_actions;
  const double feedback = static_cast<double>(fb.likes - fb.dislikes) /
                          (static_cast<double>(num_agents - 1) * actions_per_round);
  return (1.0 - beta) * post_share + beta * feedback;
}

inline double pre(const UserId& u, const RoundBatch& batch, int num_agents, int actions_per_round,
                  double beta) {
  int posts = 0, own = 0;
  for (const auto& a : batch.actions) {
    if (a.sender != u) continue;
    ++own;
    if (a.type == ActionType::Post) ++posts;
  }
  return clamp01(pre_raw(posts, own, post_feedback(u, batch), num_agents, actions_per_round, beta));
}

// Coordination: visibility through mentions and reciprocity toward last round's DM senders.
inline double coord(const UserId& u, const RoundBatch& batch, const RoundBatch& prev, double beta) {
  int public_items = 0, mentioned = 0;
  for (const auto& a : batch.actions) {
    if (!is_public(a.type)) continue;
    ++public_items;
    if (a.mentions.count(u)) ++mentioned;
  }
  std::set<UserId> prior_senders;
  for (const auto& a : prev.actions)
    if (a.type == ActionType::Dm && a.recipient == u) prior_senders.insert(a.sender);
  int replies = 0;
  for (const auto& a : batch.actions)
    if (a.type == ActionType::Dm && a.sender == u && a.recipient && prior_senders.count(*a.recipient))
      ++replies;

  const double mention_term = public_items == 0 ? 0.0 : static_cast<double>(mentioned) / public_items;
  // Several DMs to the same prior sender can outnumber the sender set; cap at full reciprocity.
  const double reply_term =
      prior_senders.empty() ? 0.0
                            : std::min(1.0, static_cast<double>(replies) / prior_senders.size());
  return (1.0 - beta) * mention_term + beta * reply_term;
}

inline double emo_from_sums(double positive, double negative, double beta, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  return 0.5 * (1.0 + (positive + beta * negative) / (positive + std::abs(beta) * negative + epsilon));
}

inline double emo(const UserId& u, const RoundBatch& batch, double beta, double epsilon) {
  double positive = 0.0, negative = 0.0;
  for (const auto& a : batch.actions) {
    if (!is_direct(a.type) || a.receiver() != u) continue;
    positive += std::max(0.0, a.sentiment);
    negative += std::max(0.0, -a.sentiment);
  }
  return emo_from_sums(positive, negative, beta, epsilon);
}

inline double total(const std::array<double, 5>& components, const RewardWeights& weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) sum += weights.values[i] * components[i];
  return sum;
}

// All five components for u in round t. `recommended` is what u was shown this round.
inline RewardVector evaluate(const UserId& u, int round, const RoundBatch& batch,
                             const RoundBatch& prev, const std::vector<Action>& recommended,
                             const TopicState& topics, int num_agents, int actions_per_round,
                             const Params& p, const RewardWeights& weights) {
  RewardVector r;
  r.user = u;
  r.round = round;
  r[RewardComponent::Soc] = soc(u, batch, actions_per_round, p.beta_soc);
  r[RewardComponent::Inf] = inf(u, recommended, topics, p.beta_inf);
  r[RewardComponent::Pre] = pre(u, batch, num_agents, actions_per_round, p.beta_pre);
  r[RewardComponent::Coord] = coord(u, batch, prev, p.beta_coord);
  r[RewardComponent::Emo] = emo(u, batch, p.beta_emo, p.epsilon);
  r.total = total(r.components, weights);
  return r;
}

}  // namespace socsim::rewards
