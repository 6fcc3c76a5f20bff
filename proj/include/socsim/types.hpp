#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace socsim {

inline constexpr int kSchemaVersion = 1;

// Error hierarchy. Every failure the CLI maps onto an exit code derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct RenderError : Error {
  using Error::Error;
};
struct TransportError : Error {
  using Error::Error;
};
struct ArtifactError : Error {
  using Error::Error;
};
struct CorruptionError : Error {
  using Error::Error;
};

using UserId = std::string;
using ActionId = std::int64_t;

enum class ActionType { Post, Com, Dm, Not };
enum class Tone { Supportive, Neutral, Critical };

inline std::string_view to_string(ActionType t) {
  switch (t) {
    case ActionType::Post: return "POST";
    case ActionType::Com: return "COM";
    case ActionType::Dm: return "DM";
    case ActionType::Not: return "NOT";
  }
  return "NOT";
}

inline std::optional<ActionType> parse_action_type(std::string_view s) {
  if (s == "POST") return ActionType::Post;
  if (s == "COM") return ActionType::Com;
  if (s == "DM") return ActionType::Dm;
  if (s == "NOT") return ActionType::Not;
  return std::nullopt;
}

inline std::string_view to_string(Tone t) {
  switch (t) {
    case Tone::Supportive: return "supportive";
    case Tone::Neutral: return "neutral";
    case Tone::Critical: return "critical";
  }
  return "neutral";
}

inline std::optional<Tone> parse_tone(std::string_view s) {
  if (s == "supportive") return Tone::Supportive;
  if (s == "neutral") return Tone::Neutral;
  if (s == "critical") return Tone::Critical;
  return std::nullopt;
}

inline bool is_public(ActionType t) { return t == ActionType::Post || t == ActionType::Com; }
inline bool is_direct(ActionType t) { return t == ActionType::Dm || t == ActionType::Com; }

struct Action {
  ActionId id = 0;
  int round = 0;
  ActionType type = ActionType::Not;
  UserId sender;
  std::optional<UserId> recipient;      // DM only
  std::optional<ActionId> target_id;    // COM target, or the DM being replied to
  std::optional<UserId> target_author;  // author of target content, resolved at execution
  std::optional<std::string> topic;
  std::set<UserId> mentions;
  Tone tone = Tone::Neutral;
  std::string content;
  double sentiment = 0.0;

  bool operator==(const Action&) const = default;

  // The user a direct exchange lands on: DM recipient, or the author of commented content.
  std::optional<UserId> receiver() const {
    if (type == ActionType::Dm) return recipient;
    if (type == ActionType::Com) return target_author;
    return std::nullopt;
  }
};

struct Vote {
  UserId voter;
  ActionId content_id = 0;
  UserId author;  // author of the voted content, resolved at execution
  int value = 0;
  int round = 0;

  bool operator==(const Vote&) const = default;
};

struct RoundBatch {
  int round = 0;
  std::vector<Action> actions;
  std::vector<Vote> votes;

  const Action* find(ActionId id) const {
    for (const auto& a : actions)
      if (a.id == id) return &a;
    return nullptr;
  }
};

enum class RewardComponent { Soc, Inf, Pre, Coord, Emo };
inline constexpr std::array<RewardComponent, 5> kRewardComponents = {
    RewardComponent::Soc, RewardComponent::Inf, RewardComponent::Pre, RewardComponent::Coord,
    RewardComponent::Emo};

inline std::string_view to_string(RewardComponent c) {
  switch (c) {
    case RewardComponent::Soc: return "SOC";
    case RewardComponent::Inf: return "INF";
    case RewardComponent::Pre: return "PRE";
    case RewardComponent::Coord: return "COORD";
    case RewardComponent::Emo: return "EMO";
  }
  return "SOC";
}

inline std::optional<RewardComponent> parse_reward_component(std::string_view s) {
  for (auto c : kRewardComponents)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

// Component weights lambda, indexed in SOC, INF, PRE, COORD, EMO order.
struct RewardWeights {
  std::array<double, 5> values{0.2, 0.2, 0.2, 0.2, 0.2};

  double operator[](RewardComponent c) const { return values[static_cast<std::size_t>(c)]; }
  double& operator[](RewardComponent c) { return values[static_cast<std::size_t>(c)]; }

  static RewardWeights pure(RewardComponent c) {
    RewardWeights w;
    w.values.fill(0.0);
    w[c] = 1.0;
    return w;
  }

  void validate() const {
    double sum = 0.0;
    for (double v : values) {
      if (!(v >= 0.0)) throw ConfigError("reward weight must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("reward weights must sum to 1");
  }

  // Component with the largest weight; ties resolve to the earliest component.
  RewardComponent dominant() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] > values[best]) best = i;
    return kRewardComponents[best];
  }

  bool operator==(const RewardWeights&) const = default;
};

struct RewardVector {
  UserId user;
  int round = 0;
  std::array<double, 5> components{};
  double total = 0.0;

  double operator[](RewardComponent c) const { return components[static_cast<std::size_t>(c)]; }
  double& operator[](RewardComponent c) { return components[static_cast<std::size_t>(c)]; }
  bool operator==(const RewardVector&) const = default;
};

enum class ConversationRole { Sent, Received, Saw };

inline std::string_view to_string(ConversationRole r) {
  switch (r) {
    case ConversationRole::Sent: return "sent";
    case ConversationRole::Received: return "received";
    case ConversationRole::Saw: return "saw";
  }
  return "saw";
}

struct ConversationEntry {
  int round = 0;
  ActionId action = 0;
  ConversationRole role = ConversationRole::Saw;
  bool operator==(const ConversationEntry&) const = default;
};

struct RelationshipEntry {
  int last_round = 0;
  int sent = 0;
  int received = 0;
  double likes_given_ema = 0.0;     // smoothed likes self -> peer
  double likes_received_ema = 0.0;  // smoothed likes peer -> self
  std::string note;
  bool operator==(const RelationshipEntry&) const = default;
};

struct OpinionEntry {
  std::string text;
  double strength = 0.0;  // signed, clamped to [-1, 1]
  bool operator==(const OpinionEntry&) const = default;
};

struct MemoryStores {
  std::vector<ConversationEntry> conversation;
  std::map<UserId, RelationshipEntry> relationship;
  std::map<std::string, OpinionEntry> opinion;
  bool operator==(const MemoryStores&) const = default;
};

struct BigFive {
  double openness = 0.5;
  double conscientiousness = 0.5;
  double extraversion = 0.5;
  double agreeableness = 0.5;
  double neuroticism = 0.5;
  bool operator==(const BigFive&) const = default;
};

struct Persona {
  UserId user;
  std::string name;
  std::string role;
  std::string description;
  std::string stance;
  double stance_position = 0.0;  // numeric stance in [-1, 1], used for vote alignment
  std::string comm_style;
  BigFive big_five;
  RewardWeights reward_weights;
  MemoryStores memory;
};

}  // namespace socsim
