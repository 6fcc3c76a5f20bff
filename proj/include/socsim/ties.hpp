#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "socsim/batch.hpp"
#include "socsim/matrix.hpp"
#include "socsim/types.hpp"

namespace socsim::ties {

// Directed tie strengths. weights(u, v) holds the tie from v to u.
struct TieGraph {
  Matrix weights;
  int round = 0;

  TieGraph() = default;
  explicit TieGraph(std::size_t n) : weights(n) {}

  bool operator==(const TieGraph&) const = default;
};

struct EvidenceSignals {
  double novelty = 0.0;      // {0, 1}
  double approval = 0.0;     // [-1, 1]
  double reciprocity = 0.0;  // [0, 1]
  double affect = 0.0;       // [-1, 1]
};

using EvidenceWeights = std::array<double, 4>;

// Smoothed like counts per ordered (from, to) pair; absent pairs are zero.
struct ReciprocityState {
  std::map<std::pair<UserId, UserId>, double> likes;

  double get(const UserId& from, const UserId& to) const {
    auto it = likes.find({from, to});
    return it == likes.end() ? 0.0 : it->second;
  }
  bool operator==(const ReciprocityState&) const = default;
};

// Which EMA values the reciprocity signal reads within a round.
enum class ReciprocityTiming { PostUpdate, PreUpdate };

// --- activation predicates ------------------------------------------------

inline bool is_dm_to(const Action& a, const UserId& u, const UserId& v) {
  return a.type == ActionType::Dm && a.sender == v && a.recipient == u;
}
inline bool is_mention(const Action& a, const UserId& u, const UserId& v) {
  return is_public(a.type) && a.sender == v && a.mentions.count(u) > 0;
}
inline bool is_com_to(const Action& a, const UserId& u, const UserId& v) {
  return a.type == ActionType::Com && a.sender == v && a.target_author == u;
}
inline bool is_vote_for(const Vote& vote, const UserId& u, const UserId& v) {
  return vote.value != 0 && vote.voter == v && vote.author == u;
}

inline bool address(const UserId& v, const UserId& u, const RoundBatch& batch) {
  return std::any_of(batch.actions.begin(), batch.actions.end(),
                     [&](const Action& a) { return is_dm_to(a, u, v) || is_mention(a, u, v); });
}

inline bool engage(const UserId& v, const UserId& u, const RoundBatch& batch) {
  return std::any_of(batch.actions.begin(), batch.actions.end(),
                     [&](const Action& a) { return is_com_to(a, u, v); }) ||
         std::any_of(batch.votes.begin(), batch.votes.end(),
                     [&](const Vote& x) { return is_vote_for(x, u, v); });
}

// Did v address or engage u this round?
inline bool activation(const UserId& v, const UserId& u, const RoundBatch& batch) {
  if (v == u) throw DomainError("activation is defined for distinct users only");
  return address(v, u, batch) || engage(v, u, batch);
}

// Activation for every ordered pair in one pass; result(u, v) is the gate for v -> u.
inline std::vector<std::vector<bool>> activations(const Roster& roster, const RoundBatch& batch) {
  const std::size_t n = roster.size();
  std::vector<std::vector<bool>> on(n, std::vector<bool>(n, false));
  auto mark = [&](const UserId& v, const UserId& u) {
    if (v == u) return;
    on[roster.index(u)][roster.index(v)] = true;
  };
  for (const auto& a : batch.actions) {
    if (a.type == ActionType::Dm && a.recipient) mark(a.sender, *a.recipient);
    if (is_public(a.type))
      for (const auto& m : a.mentions) mark(a.sender, m);
    if (a.type == ActionType::Com && a.target_author) mark(a.sender, *a.target_author);
  }
  for (const auto& vote : batch.votes)
    if (vote.value != 0) mark(vote.voter, vote.author);
  return on;
}

// --- evidence ---------------------------------------------------------------

// Topics v put in front of u this round: DMs to u, comments on u's content, and public
// items mentioning u.
inline std::set<std::string> topics_introduced(const UserId& v, const UserId& u,
                                               const RoundBatch& batch) {
  std::set<std::string> out;
  for (const auto& a : batch.actions) {
    if (!a.topic) continue;
    if (is_dm_to(a, u, v) || is_com_to(a, u, v) || is_mention(a, u, v)) out.insert(*a.topic);
  }
  return out;
}

inline ReciprocityState update_reciprocity(const ReciprocityState& prev, const RoundBatch& batch,
                                           double beta_rec) {
  if (!(beta_rec > 0.0 && beta_rec < 1.0)) throw DomainError("beta_rec must lie in (0, 1)");
  std::map<std::pair<UserId, UserId>, int> round_likes;
  for (const auto& vote : batch.votes)
    if (vote.value > 0) ++round_likes[{vote.voter, vote.author}];

  ReciprocityState next;
  for (const auto& [pair, value] : prev.likes) next.likes[pair] = beta_rec * value;
  for (const auto& [pair, count] : round_likes) next.likes[pair] += (1.0 - beta_rec) * count;
  return next;
}

inline EvidenceSignals evidence_signals(const UserId& v, const UserId& u, const RoundBatch& batch,
                                        const TopicState& topics, const ReciprocityState& recip,
                                        double epsilon) {
  if (v == u) throw DomainError("evidence is defined for distinct users only");
  EvidenceSignals s;

  const auto& history = topics.seen_by(u);
  for (const auto& t : topics_introduced(v, u, batch))
    if (!history.count(t)) s.novelty = 1.0;

  int likes = 0, dislikes = 0;
  for (const auto& vote : batch.votes) {
    if (vote.voter != v || vote.author != u) continue;
    if (vote.value > 0) ++likes;
    if (vote.value < 0) ++dislikes;
  }
  if (likes + dislikes > 0)
    s.approval = static_cast<double>(likes - dislikes) / std::max(1, likes + dislikes);

  const double forward = recip.get(v, u);
  const double backward = recip.get(u, v);
  s.reciprocity = 1.0 - std::abs((forward - backward) / (forward + backward + epsilon));

  if (likes + dislikes == 0) {
    double sum = 0.0;
    int dms = 0;
    for (const auto& a : batch.actions) {
      if (!is_dm_to(a, u, v)) continue;
      sum += a.sentiment;
      ++dms;
    }
    if (dms > 0) s.affect = sum / dms;
  }
  return s;
}

// Convex combination of the signals after shifting signed ones onto [0, 1].
inline double aggregate_evidence(const EvidenceSignals& s, const EvidenceWeights& w) {
  const double e = w[0] * s.novelty + w[1] * (s.approval + 1.0) / 2.0 + w[2] * s.reciprocity +
                   w[3] * (s.affect + 1.0) / 2.0;
  return std::clamp(e, 0.0, 1.0);
}

inline void validate_evidence_weights(const EvidenceWeights& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ConfigError("evidence weights must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("evidence weights must sum to 1");
}

// --- update -------------------------------------------------------------

struct UpdateParams {
  double xi = 0.1;         // minimum evidence
  double delta_max = 0.2;  // per-round growth cap
  double delta = 0.1;      // passive decay
};

inline double update_one(double weight, bool active, double evidence, const UpdateParams& p) {
  if (active)
    return weight + std::min(p.delta_max, (1.0 - weight) * std::max(0.0, evidence - p.xi));
  return (1.0 - p.delta) * weight;
}

// active(u, v) and evidence(u, v) refer to the v -> u direction, matching the weight layout.
inline TieGraph tie_update(const TieGraph& g, const std::vector<std::vector<bool>>& active,
                           const Matrix& evidence, const UpdateParams& p) {
  if (!(p.xi >= 0.0 && p.xi < 1.0)) throw DomainError("xi must lie in [0, 1)");
  if (!(p.delta_max >= 0.0)) throw DomainError("delta_max must be non-negative");
  if (!(p.delta >= 0.0 && p.delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  const std::size_t n = g.weights.size();
  TieGraph out(n);
  out.round = g.round + 1;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double e = evidence(u, v);
      if (active[u][v] && !(e >= 0.0 && e <= 1.0)) throw DomainError("evidence outside [0, 1]");
      out.weights(u, v) = std::clamp(update_one(g.weights(u, v), active[u][v], e, p), 0.0, 1.0);
    }
  }
  return out;
}

inline double half_life_to_delta(double h) {
  if (!(h > 0.0)) throw DomainError("half-life must be positive");
  return 1.0 - std::exp2(-1.0 / h);
}

// --- text-mode ratings ----------------------------------------------------

struct Rating {
  UserId peer;
  int score = 0;
  std::string reason;
};

struct TextEvidence {
  std::map<UserId, double> evidence;
  std::vector<std::string> diagnostics;
};

// Normalize 0..5 ratings onto [0, 1]. Out-of-range scores are dropped with a diagnostic;
// peers without a usable rating fall back to zero.
inline TextEvidence text_evidence(const std::vector<Rating>& ratings,
                                  const std::vector<UserId>& peers = {}) {
  TextEvidence out;
  for (const auto& p : peers) out.evidence[p] = 0.0;
  for (const auto& r : ratings) {
    if (r.score < 0 || r.score > 5) {
      out.diagnostics.push_back("rating for " + r.peer + " has score " + std::to_string(r.score) +
                                " outside 0..5; dropped");
      continue;
    }
    out.evidence[r.peer] = r.score / 5.0;
  }
  return out;
}

// --- reporting transforms -------------------------------------------------

inline Matrix symmetrize(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) out(u, v) = 0.5 * (a(u, v) + a(v, u));
  return out;
}

// Undirected 0/1 adjacency: edge {u, v} iff weight >= theta, no self-loops.
inline Matrix binarize(const Matrix& undirected, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("threshold must lie in [0, 1]");
  const std::size_t n = undirected.size();
  Matrix out(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && undirected(u, v) >= theta) out(u, v) = 1.0;
  return out;
}

inline std::size_t undirected_edge_count(const Matrix& adjacency) {
  std::size_t count = 0;
  for (std::size_t u = 0; u < adjacency.size(); ++u)
    for (std::size_t v = u + 1; v < adjacency.size(); ++v)
      if (adjacency(u, v) > 0.0) ++count;
  return count;
}

}  // namespace socsim::ties
