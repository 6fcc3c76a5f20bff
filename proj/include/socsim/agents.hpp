#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "socsim/batch.hpp"
#include "socsim/config.hpp"
#include "socsim/rng.hpp"
#include "socsim/types.hpp"

namespace socsim::agents {

// One slot of a plan, with exactly the fields of the planning contract.
struct PlannedAction {
  ActionType type = ActionType::Not;
  std::optional<UserId> recipient;
  std::optional<std::string> topic;
  std::optional<ActionId> target_id;
  bool mention_flag = false;
  Tone tone = Tone::Neutral;

  bool operator==(const PlannedAction&) const = default;
};

struct ActionPlan {
  std::vector<PlannedAction> slots;
  bool operator==(const ActionPlan&) const = default;
};

inline ActionPlan all_not_plan(int n) { return ActionPlan{std::vector<PlannedAction>(n)}; }

enum class TargetRule { User, TopLikedPost, NewTopic };

struct CoachTip {
  std::optional<RewardComponent> component;  // empty for generic exploration tips
  ActionType action = ActionType::Post;
  TargetRule target_rule = TargetRule::NewTopic;
  std::optional<UserId> target_user;
  std::string topic_hint;
  bool invite_mention = false;
  Tone tone = Tone::Neutral;

  bool operator==(const CoachTip&) const = default;
};

struct CoachTips {
  std::vector<CoachTip> tips;
  std::vector<RewardComponent> priority;  // components with a positive gap, high to low
};

struct DmCandidate {
  ActionId id = 0;
  UserId author;
  std::optional<std::string> topic;
  std::string content;
};

struct PostCandidate {
  ActionId id = 0;
  UserId author;
  std::optional<std::string> topic;
  std::string content;
  int likes = 0;
};

// Everything a policy may look at when planning round t.
struct PlanContext {
  UserId user;
  int round = 1;
  int actions_per_round = 3;
  std::vector<Action> visible;  // visible_content(user, previous batch)
  std::vector<Action> last_actions;
  std::optional<RewardVector> last_reward;
  RewardWeights weights;
  std::vector<UserId> roster;  // other users, sorted
  std::vector<std::string> known_topics;
  std::vector<std::string> topic_pool;
  std::vector<DmCandidate> dm_replies;
  std::vector<PostCandidate> commentable;
  std::vector<UserId> recent_partners;  // most recent first
  std::optional<CoachTips> tips;
  std::string tip_text;  // coach output handed to an LLM planner

  struct BestRound {
    int round = 0;
    double reward = 0.0;
    std::string summary;
  };
  std::optional<BestRound> best;

  bool in_roster(const UserId& u) const {
    return std::binary_search(roster.begin(), roster.end(), u);
  }
  const PostCandidate* commentable_by_id(ActionId id) const {
    for (const auto& p : commentable)
      if (p.id == id) return &p;
    return nullptr;
  }
  const DmCandidate* dm_by_id(ActionId id) const {
    for (const auto& d : dm_replies)
      if (d.id == id) return &d;
    return nullptr;
  }
};

inline std::vector<std::string> default_topic_pool() {
  return {"carbon tax",          "renewable energy",      "electric vehicles",
          "sea level rise",      "climate finance",       "nuclear power",
          "heat waves",          "wildfire season",       "climate activism",
          "green jobs",          "fossil fuel subsidies", "carbon capture",
          "climate migration",   "plant based diets",     "public transit",
          "net zero targets",    "climate anxiety",       "geoengineering",
          "ocean acidification", "deforestation",         "climate science denial",
          "energy prices",       "solar panels",          "wind farms",
          "climate education",   "extreme weather",       "adaptation funding",
          "cop negotiations",    "emissions trading",     "urban heat islands"};
}

// --- validation ---------------------------------------------------------

struct Violation {
  int slot = -1;  // -1 for whole-plan violations
  std::string code;
  std::string message;
};

inline std::vector<Violation> validate_plan(const ActionPlan& plan, const PlanContext& ctx) {
  std::vector<Violation> out;
  auto add = [&](int slot, std::string code, std::string msg) {
    out.push_back({slot, std::move(code), std::move(msg)});
  };
  if (static_cast<int>(plan.slots.size()) != ctx.actions_per_round)
    add(-1, "slot_count",
        "expected " + std::to_string(ctx.actions_per_round) + " actions, got " +
            std::to_string(plan.slots.size()));

  for (int i = 0; i < static_cast<int>(plan.slots.size()); ++i) {
    const auto& s = plan.slots[i];
    const bool has_topic = s.topic && !canonical_topic(*s.topic).empty();
    if (ctx.round == 1 && s.type != ActionType::Post && s.type != ActionType::Not)
      add(i, "round1_non_post", "round 1 allows only POST (or NOT)");
    if (s.mention_flag && !is_public(s.type))
      add(i, "mention_on_private", "mention_flag must be false for DM and NOT");

    switch (s.type) {
      case ActionType::Post:
        if (s.recipient) add(i, "post_recipient", "POST requires recipient=null");
        if (s.target_id) add(i, "post_target", "POST requires target_id=null");
        if (!has_topic) add(i, "missing_topic", "POST requires a topic");
        break;
      case ActionType::Com:
        if (s.recipient) add(i, "com_recipient", "COM requires recipient=null");
        if (!s.target_id || !ctx.commentable_by_id(*s.target_id))
          add(i, "invalid_com_target", "invalid COM target: target_id must be a listed post ID");
        if (!has_topic) add(i, "missing_topic", "COM requires a topic");
        break;
      case ActionType::Dm:
        if (!has_topic) add(i, "missing_topic", "DM requires a topic");
        if (!s.recipient) {
          add(i, "dm_recipient", "DM requires a recipient");
          break;
        }
        if (s.target_id) {
          const auto* dm = ctx.dm_by_id(*s.target_id);
          if (!dm)
            add(i, "dm_reply_target", "reply DM target_id must be a listed DM id");
          else if (dm->author != *s.recipient)
            add(i, "dm_reply_recipient", "reply DM recipient must be the author of that DM");
        } else if (!ctx.in_roster(*s.recipient)) {
          add(i, "dm_recipient", "cold DM recipient must be a listed user ID");
        }
        break;
      case ActionType::Not:
        if (s.recipient || s.topic || s.target_id)
          add(i, "not_fields", "NOT requires recipient=topic=target_id=null");
        break;
    }
  }
  return out;
}

// --- sentiment ------------------------------------------------------------

inline double tone_sentiment(Tone t) {
  switch (t) {
    case Tone::Supportive: return 0.7;
    case Tone::Neutral: return 0.0;
    case Tone::Critical: return -0.7;
  }
  return 0.0;
}

// Small polarity lexicon for free text; empty when no lexicon word occurs.
inline std::optional<double> lexicon_sentiment(std::string_view text) {
  static const std::set<std::string> positive = {
      "agree", "great", "thanks", "thank", "love", "helpful", "good", "support", "appreciate",
      "excellent", "hope", "glad", "welcome", "nice", "together", "right", "kind"};
  static const std::set<std::string> negative = {
      "disagree", "wrong", "bad", "hate", "awful", "nonsense", "terrible", "fail", "misleading",
      "never", "worse", "ridiculous", "doubt", "against", "problem"};
  int pos = 0, neg = 0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (positive.count(word)) ++pos;
    if (negative.count(word)) ++neg;
    word.clear();
  };
  for (char ch : text) {
    if (std::isalpha(static_cast<unsigned char>(ch)))
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    else
      flush();
  }
  flush();
  if (pos + neg == 0) return std::nullopt;
  return static_cast<double>(pos - neg) / (pos + neg);
}

inline double sentiment_of(Tone tone, const std::optional<std::string>& text = std::nullopt,
                           bool use_lexicon = false) {
  if (use_lexicon && text)
    if (auto s = lexicon_sentiment(*text)) return std::clamp(*s, -1.0, 1.0);
  return tone_sentiment(tone);
}

// --- coach ----------------------------------------------------------------

namespace detail {

inline std::vector<std::string> unseen_topics(const PlanContext& ctx) {
  std::set<std::string> known(ctx.known_topics.begin(), ctx.known_topics.end());
  std::vector<std::string> out;
  for (const auto& t : ctx.topic_pool)
    if (!known.count(t)) out.push_back(t);
  return out;
}

inline const PostCandidate* top_liked(const PlanContext& ctx) {
  const PostCandidate* best = nullptr;
  for (const auto& p : ctx.commentable)
    if (!best || p.likes > best->likes || (p.likes == best->likes && p.id < best->id)) best = &p;
  return best;
}

template <typename T>
const T& rotate(const std::vector<T>& xs, int round, std::size_t offset) {
  return xs[(static_cast<std::size_t>(std::max(round, 0)) + offset) % xs.size()];
}

}  // namespace detail

// Gap between target weight and recent mean reward per component, clamped at zero.
inline std::array<double, 5> reward_gaps(const RewardWeights& weights,
                                         const std::vector<RewardVector>& recent) {
  if (recent.empty()) throw DomainError("coach needs at least one recent reward vector");
  std::array<double, 5> gaps{};
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double mean = 0.0;
    for (const auto& r : recent) mean += r.components[i];
    mean /= static_cast<double>(recent.size());
    gaps[i] = std::max(0.0, weights.values[i] - mean);
  }
  return gaps;
}

// Components with a positive gap, largest first; equal gaps keep SOC, INF, PRE, COORD, EMO order.
inline std::vector<RewardComponent> gap_priority(const std::array<double, 5>& gaps) {
  std::vector<RewardComponent> order;
  for (auto c : kRewardComponents)
    if (gaps[static_cast<std::size_t>(c)] > 0.0) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](RewardComponent a, RewardComponent b) {
    return gaps[static_cast<std::size_t>(a)] > gaps[static_cast<std::size_t>(b)];
  });
  return order;
}

inline CoachTips coach(const Persona& persona, const std::vector<RewardVector>& recent,
                       const PlanContext& ctx) {
  CoachTips out;
  out.priority = gap_priority(reward_gaps(persona.reward_weights, recent));
  if (out.priority.size() > 5) out.priority.resize(5);

  const auto unseen = detail::unseen_topics(ctx);
  const auto* liked = detail::top_liked(ctx);
  const Tone default_tone =
      persona.big_five.agreeableness >= 0.5 ? Tone::Supportive : Tone::Neutral;
  std::vector<UserId> partners = ctx.recent_partners;
  for (const auto& u : ctx.roster)
    if (std::find(partners.begin(), partners.end(), u) == partners.end()) partners.push_back(u);

  auto fresh_topic = [&](std::size_t k) -> std::string {
    if (!unseen.empty()) return detail::rotate(unseen, ctx.round, k);
    if (!ctx.known_topics.empty()) return detail::rotate(ctx.known_topics, ctx.round, k);
    return "";
  };
  auto known_topic = [&](std::size_t k) -> std::string {
    if (!ctx.known_topics.empty()) return detail::rotate(ctx.known_topics, ctx.round, k);
    return fresh_topic(k);
  };
  auto partner = [&](std::size_t k) -> std::optional<UserId> {
    if (partners.empty()) return std::nullopt;
    return detail::rotate(partners, ctx.round, k);
  };

  std::size_t k = 0;
  for (auto c : out.priority) {
    CoachTip tip;
    tip.component = c;
    tip.tone = default_tone;
    switch (c) {
      case RewardComponent::Soc:
        tip.action = ActionType::Dm;
        tip.target_rule = TargetRule::User;
        if (!ctx.dm_replies.empty()) {
          const auto& dm = detail::rotate(ctx.dm_replies, ctx.round, k);
          tip.target_user = dm.author;
          tip.topic_hint = dm.topic.value_or(known_topic(k));
        } else {
          tip.target_user = partner(k);
          tip.topic_hint = known_topic(k);
        }
        break;
      case RewardComponent::Inf:
        tip.action = ActionType::Post;
        tip.target_rule = TargetRule::NewTopic;
        tip.topic_hint = fresh_topic(k);
        break;
      case RewardComponent::Pre:
        tip.action = ActionType::Post;
        tip.target_rule = TargetRule::NewTopic;
        tip.topic_hint = known_topic(k);
        break;
      case RewardComponent::Coord:
        tip.invite_mention = true;
        if (liked) {
          tip.action = ActionType::Com;
          tip.target_rule = TargetRule::TopLikedPost;
          tip.topic_hint = liked->topic.value_or(known_topic(k));
        } else {
          tip.action = ActionType::Post;
          tip.target_rule = TargetRule::User;
          tip.target_user = partner(k);
          tip.topic_hint = known_topic(k);
        }
        break;
      case RewardComponent::Emo:
        tip.tone = Tone::Supportive;
        if (liked) {
          tip.action = ActionType::Com;
          tip.target_rule = TargetRule::TopLikedPost;
          tip.topic_hint = liked->topic.value_or(known_topic(k));
        } else {
          tip.action = ActionType::Dm;
          tip.target_rule = TargetRule::User;
          tip.target_user = partner(k);
          tip.topic_hint = known_topic(k);
        }
        break;
    }
    out.tips.push_back(std::move(tip));
    ++k;
  }

  // Generic exploration tips pad the list to three: new topic, new partner, one POST.
  std::size_t generic = 0;
  while (out.tips.size() < 3) {
    CoachTip tip;
    tip.tone = default_tone;
    switch (generic++ % 3) {
      case 0:
        tip.action = ActionType::Post;
        tip.target_rule = TargetRule::NewTopic;
        tip.topic_hint = fresh_topic(k);
        break;
      case 1:
        tip.action = ActionType::Dm;
        tip.target_rule = TargetRule::User;
        tip.target_user = partner(k + ctx.recent_partners.size());
        tip.topic_hint = known_topic(k);
        break;
      default:
        tip.action = ActionType::Post;
        tip.target_rule = TargetRule::NewTopic;
        tip.topic_hint = known_topic(k);
        break;
    }
    out.tips.push_back(std::move(tip));
    ++k;
  }
  return out;
}

inline std::string describe_tip(const CoachTip& tip) {
  std::ostringstream s;
  s << "- " << to_string(tip.action);
  switch (tip.target_rule) {
    case TargetRule::User:
      s << " to " << tip.target_user.value_or("a new partner");
      break;
    case TargetRule::TopLikedPost: s << " on the top-liked post"; break;
    case TargetRule::NewTopic: s << " as a fresh public post"; break;
  }
  if (!tip.topic_hint.empty()) s << " about \"" << tip.topic_hint << "\"";
  if (tip.invite_mention) s << ", inviting them to @mention you back";
  s << ", " << to_string(tip.tone) << " tone.";
  return s.str();
}

// --- scripted policy -------------------------------------------------------

namespace detail {

inline std::string choose_topic(const PlanContext& ctx, const RewardWeights& w, Stream& rng,
                                std::set<std::string>& used) {
  std::vector<std::string> unseen;
  for (const auto& t : unseen_topics(ctx))
    if (!used.count(t)) unseen.push_back(t);
  const bool explore = ctx.known_topics.empty() || rng.bernoulli(w[RewardComponent::Inf]);
  std::string topic;
  if (explore && !unseen.empty())
    topic = unseen[rng.index(unseen.size())];
  else if (!ctx.known_topics.empty())
    topic = ctx.known_topics[rng.index(ctx.known_topics.size())];
  else
    topic = ctx.topic_pool.empty() ? "open discussion" : ctx.topic_pool[rng.index(ctx.topic_pool.size())];
  used.insert(topic);
  return topic;
}

inline Tone choose_tone(const Persona& p, Stream& rng) {
  if (rng.bernoulli((1.0 + p.reward_weights[RewardComponent::Emo]) / 2.0)) return Tone::Supportive;
  return rng.bernoulli(1.0 - p.big_five.agreeableness) ? Tone::Critical : Tone::Neutral;
}

}  // namespace detail

// LLM-free policy driven by the persona's reward weights. Output always satisfies
// validate_plan for the same context.
inline ActionPlan scripted_plan(const Persona& persona, const PlanContext& ctx, Stream& rng) {
  const auto& w = persona.reward_weights;
  const int n = ctx.actions_per_round;
  ActionPlan plan;
  std::set<std::string> used_topics;

  auto post = [&](std::optional<std::string> topic, std::optional<bool> mention,
                  std::optional<Tone> tone) {
    PlannedAction a;
    a.type = ActionType::Post;
    a.topic = topic ? *topic : detail::choose_topic(ctx, w, rng, used_topics);
    a.mention_flag = mention ? *mention : rng.bernoulli(w[RewardComponent::Coord]);
    a.tone = tone ? *tone : detail::choose_tone(persona, rng);
    return a;
  };

  if (ctx.round == 1) {
    while (static_cast<int>(plan.slots.size()) < n)
      plan.slots.push_back(post(std::nullopt, std::nullopt, std::nullopt));
    return plan;
  }

  std::set<UserId> replied;
  auto reply_to = [&](const DmCandidate& dm, std::optional<Tone> tone) {
    PlannedAction a;
    a.type = ActionType::Dm;
    a.recipient = dm.author;
    a.target_id = dm.id;
    a.topic = dm.topic ? *dm.topic : detail::choose_topic(ctx, w, rng, used_topics);
    a.tone = tone ? *tone : detail::choose_tone(persona, rng);
    replied.insert(dm.author);
    return a;
  };
  auto comment_on = [&](const PostCandidate& p, std::optional<bool> mention,
                        std::optional<Tone> tone) {
    PlannedAction a;
    a.type = ActionType::Com;
    a.target_id = p.id;
    a.topic = p.topic ? *p.topic : detail::choose_topic(ctx, w, rng, used_topics);
    a.mention_flag = mention ? *mention : rng.bernoulli(w[RewardComponent::Coord]);
    a.tone = tone ? *tone : detail::choose_tone(persona, rng);
    return a;
  };
  auto pending_from = [&](const std::optional<UserId>& who) -> const DmCandidate* {
    // latest DM per sender still awaiting a reply
    const DmCandidate* found = nullptr;
    for (const auto& dm : ctx.dm_replies)
      if (!replied.count(dm.author) && (!who || dm.author == *who)) found = &dm;
    return found;
  };
  auto direct_message = [&](std::optional<UserId> to, std::optional<std::string> topic,
                            std::optional<Tone> tone) {
    if (const auto* dm = pending_from(to)) return reply_to(*dm, tone);
    PlannedAction a;
    a.type = ActionType::Dm;
    if (to && ctx.in_roster(*to)) {
      a.recipient = *to;
    } else if (!ctx.recent_partners.empty() && rng.bernoulli(0.5)) {
      a.recipient = ctx.recent_partners[rng.index(ctx.recent_partners.size())];
    } else {
      a.recipient = ctx.roster[rng.index(ctx.roster.size())];
    }
    a.topic = topic ? *topic : detail::choose_topic(ctx, w, rng, used_topics);
    a.tone = tone ? *tone : detail::choose_tone(persona, rng);
    return a;
  };

  // Replies to last round's DM senders come first when social interaction matters.
  if (w[RewardComponent::Soc] >= 0.3) {
    std::set<UserId> senders;
    for (auto it = ctx.dm_replies.rbegin(); it != ctx.dm_replies.rend(); ++it) {
      if (static_cast<int>(plan.slots.size()) >= n) break;
      if (!senders.insert(it->author).second) continue;
      plan.slots.push_back(reply_to(*it, std::nullopt));
    }
  }

  if (ctx.tips) {
    for (const auto& tip : ctx.tips->tips) {
      if (static_cast<int>(plan.slots.size()) >= n) break;
      if (!tip.component) continue;
      const std::optional<std::string> topic =
          tip.topic_hint.empty() ? std::nullopt : std::optional<std::string>(tip.topic_hint);
      switch (tip.action) {
        case ActionType::Com: {
          const PostCandidate* target = detail::top_liked(ctx);
          if (tip.target_rule == TargetRule::User && tip.target_user)
            for (const auto& p : ctx.commentable)
              if (p.author == *tip.target_user) target = &p;
          if (target)
            plan.slots.push_back(comment_on(*target, tip.invite_mention, tip.tone));
          else
            plan.slots.push_back(post(topic, tip.invite_mention, tip.tone));
          break;
        }
        case ActionType::Dm:
          plan.slots.push_back(direct_message(tip.target_user, topic, tip.tone));
          break;
        default:
          plan.slots.push_back(post(topic, tip.invite_mention, tip.tone));
          break;
      }
    }
  }

  const std::vector<double> propensity = {
      w[RewardComponent::Pre] + 0.5 * w[RewardComponent::Inf] + 0.5 * w[RewardComponent::Coord] +
          0.25 * w[RewardComponent::Emo],
      0.5 * w[RewardComponent::Soc] + 0.5 * w[RewardComponent::Coord] +
          0.5 * w[RewardComponent::Inf] + 0.25 * w[RewardComponent::Emo],
      0.5 * w[RewardComponent::Soc] + 0.5 * w[RewardComponent::Emo]};
  while (static_cast<int>(plan.slots.size()) < n) {
    switch (rng.weighted(propensity)) {
      case 1:
        if (!ctx.commentable.empty()) {
          plan.slots.push_back(
              comment_on(ctx.commentable[rng.index(ctx.commentable.size())], std::nullopt, std::nullopt));
          break;
        }
        plan.slots.push_back(post(std::nullopt, std::nullopt, std::nullopt));
        break;
      case 2:
        plan.slots.push_back(direct_message(std::nullopt, std::nullopt, std::nullopt));
        break;
      default:
        plan.slots.push_back(post(std::nullopt, std::nullopt, std::nullopt));
        break;
    }
  }
  return plan;
}

// --- scripted voting --------------------------------------------------------

struct VoteItem {
  ActionId id = 0;
  UserId author;
  int round = 0;
  double tie_weight = 0.0;         // voter's tie toward the author
  double stance_alignment = 0.0;   // in [-1, 1]
};

inline double like_probability(const Persona& voter, const VoteItem& item, const VoteModel& m) {
  return sigmoid(m.tie_coef * item.tie_weight + m.align_coef * item.stance_alignment +
                 m.agree_coef * voter.big_five.agreeableness + m.bias);
}

inline std::vector<Vote> scripted_vote(const Persona& voter, const std::vector<VoteItem>& items,
                                       Stream& rng, const VoteModel& m = {}) {
  for (const auto& item : items)
    if (item.author == voter.user)
      throw DomainError("vote items must not include the voter's own content");
  std::vector<Vote> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    Vote v;
    v.voter = voter.user;
    v.content_id = item.id;
    v.author = item.author;
    v.round = item.round;
    if (rng.uniform() < like_probability(voter, item, m))
      v.value = 1;
    else if (item.stance_alignment < m.dislike_alignment_below &&
             voter.big_five.agreeableness < m.dislike_agreeableness_below)
      v.value = -1;
    out.push_back(v);
  }
  return out;
}

inline double stance_alignment(const Persona& a, const Persona& b) {
  return 1.0 - std::abs(a.stance_position - b.stance_position);
}

}  // namespace socsim::agents
