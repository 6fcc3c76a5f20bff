#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "socsim/agents.hpp"
#include "socsim/config.hpp"
#include "socsim/llm/render.hpp"
#include "socsim/llm/templates.hpp"
#include "socsim/llm/transport.hpp"
#include "socsim/serialize.hpp"
#include "socsim/ties.hpp"

namespace socsim::llm {

using nlohmann::json;

inline constexpr int kMaxAttempts = 3;

// --- strict response parsing -------------------------------------------------

namespace detail {

inline std::string strip_fences(const std::string& text, char open, char close) {
  const auto first = text.find(open);
  const auto last = text.rfind(close);
  if (first == std::string::npos || last == std::string::npos || last < first) return text;
  return text.substr(first, last - first + 1);
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline void exact_keys(const json& obj, const std::vector<std::string>& keys, const std::string& where,
                       bool lenient) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& k : keys)
    if (!obj.contains(k)) throw ParseError(where + ": missing key '" + k + "'");
  if (lenient) return;
  for (const auto& [k, _] : obj.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ParseError(where + ": unexpected key '" + k + "'");
}

inline std::optional<std::string> opt_string(const json& v, const std::string& where) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw ParseError(where + ": expected string or null");
  return v.get<std::string>();
}

inline std::optional<ActionId> opt_id(const json& v, const std::string& where, bool lenient) {
  if (v.is_null()) return std::nullopt;
  if (v.is_number_integer()) return v.get<ActionId>();
  if (lenient && v.is_string()) {
    try {
      return std::stoll(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw ParseError(where + ": expected integer or null");
}

}  // namespace detail

inline agents::ActionPlan parse_plan(const std::string& text, bool lenient = false) {
  const json j = detail::parse_json(lenient ? detail::strip_fences(text, '[', ']') : text);
  if (!j.is_array()) throw ParseError("plan: expected a JSON array");
  agents::ActionPlan plan;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "plan item " + std::to_string(i);
    const auto& o = j[i];
    detail::exact_keys(o, {"type", "recipient", "topic", "target_id", "mention_flag", "tone"}, where,
                       lenient);
    agents::PlannedAction a;
    if (!o["type"].is_string()) throw ParseError(where + ": type must be a string");
    auto type = parse_action_type(o["type"].get<std::string>());
    if (!type) throw ParseError(where + ": unknown type '" + o["type"].get<std::string>() + "'");
    a.type = *type;
    a.recipient = detail::opt_string(o["recipient"], where + " recipient");
    a.topic = detail::opt_string(o["topic"], where + " topic");
    a.target_id = detail::opt_id(o["target_id"], where + " target_id", lenient);
    if (!o["mention_flag"].is_boolean()) throw ParseError(where + ": mention_flag must be boolean");
    a.mention_flag = o["mention_flag"].get<bool>();
    if (!o["tone"].is_string()) throw ParseError(where + ": tone must be a string");
    auto tone = parse_tone(o["tone"].get<std::string>());
    if (!tone) throw ParseError(where + ": unknown tone '" + o["tone"].get<std::string>() + "'");
    a.tone = *tone;
    plan.slots.push_back(a);
  }
  return plan;
}

// Votes for exactly the offered items; items the model skipped count as neutral.
inline std::vector<Vote> parse_votes(const std::string& text, const UserId& voter,
                                     const std::vector<agents::VoteItem>& items, bool lenient = false) {
  const json j = detail::parse_json(lenient ? detail::strip_fences(text, '[', ']') : text);
  if (!j.is_array()) throw ParseError("votes: expected a JSON array");
  std::map<ActionId, int> values;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "vote item " + std::to_string(i);
    detail::exact_keys(j[i], {"id", "vote"}, where, lenient);
    if (!j[i]["id"].is_number_integer()) throw ParseError(where + ": id must be an integer");
    if (!j[i]["vote"].is_number_integer()) throw ParseError(where + ": vote must be an integer");
    const auto id = j[i]["id"].get<ActionId>();
    const int value = j[i]["vote"].get<int>();
    if (value < -1 || value > 1) throw ParseError(where + ": vote must be -1, 0 or 1");
    if (std::none_of(items.begin(), items.end(), [&](const auto& it) { return it.id == id; }))
      throw ParseError(where + ": id " + std::to_string(id) + " was not offered");
    if (!values.emplace(id, value).second)
      throw ParseError(where + ": duplicate vote for id " + std::to_string(id));
  }
  std::vector<Vote> out;
  for (const auto& it : items) {
    auto v = values.find(it.id);
    out.push_back({voter, it.id, it.author, v == values.end() ? 0 : v->second, it.round});
  }
  return out;
}

inline std::vector<ties::Rating> parse_tie_ratings(const std::string& text, bool lenient = false) {
  const json j = detail::parse_json(lenient ? detail::strip_fences(text, '{', '}') : text);
  detail::exact_keys(j, {"ratings"}, "ratings", lenient);
  if (!j["ratings"].is_array()) throw ParseError("ratings: expected an array");
  std::vector<ties::Rating> out;
  for (std::size_t i = 0; i < j["ratings"].size(); ++i) {
    const std::string where = "rating " + std::to_string(i);
    const auto& o = j["ratings"][i];
    detail::exact_keys(o, {"peer", "score", "reason"}, where, lenient);
    if (!o["peer"].is_string()) throw ParseError(where + ": peer must be a string");
    if (!o["score"].is_number_integer()) throw ParseError(where + ": score must be an integer");
    if (!o["reason"].is_string()) throw ParseError(where + ": reason must be a string");
    out.push_back({o["peer"].get<std::string>(), o["score"].get<int>(), o["reason"].get<std::string>()});
  }
  return out;
}

// --- prompt variables --------------------------------------------------------

inline std::string fmt2(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << x;
  return s.str();
}

inline std::string join(const std::vector<std::string>& xs, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out.empty() ? "(none)" : out;
}

inline std::string reward_doc(RewardComponent c) {
  switch (c) {
    case RewardComponent::Soc:
      return "SOC (social interaction): grows with the direct exchanges (DMs and comments) you send and the ones others direct at you.";
    case RewardComponent::Inf:
      return "INF (information seeking): grows when the content you see carries topics new to you and spans a diverse mix of topics.";
    case RewardComponent::Pre:
      return "PRE (self-presentation): grows with the share of your actions that are posts and with net likes on those posts.";
    case RewardComponent::Coord:
      return "COORD (coordination): grows when others @mention you in public and when you reply by DM to those who messaged you last round.";
    case RewardComponent::Emo:
      return "EMO (emotional support): grows when the DMs and comments you receive share one clear sentiment, ideally supportive.";
  }
  return "";
}

inline std::string describe_action(const Action& a) {
  std::ostringstream s;
  s << to_string(a.type);
  if (a.recipient) s << " to " << *a.recipient;
  if (a.target_author && a.type == ActionType::Com) s << " on " << *a.target_author << "'s item " << *a.target_id;
  if (a.topic) s << " about '" << *a.topic << "'";
  if (a.type != ActionType::Not) s << " (" << to_string(a.tone) << ")";
  return s.str();
}

inline std::string describe_rewards(const RewardVector& r) {
  std::string s;
  for (auto c : kRewardComponents) s += std::string(to_string(c)) + "=" + fmt2(r[c]) + ", ";
  return s + "total=" + fmt2(r.total);
}

inline PromptVars plan_vars(const Persona& p, const agents::PlanContext& ctx,
                            const std::string& tip_text, const std::string& violations = "") {
  PromptVars v;
  std::vector<std::string> comps, weights, docs;
  for (auto c : kRewardComponents) {
    if (p.reward_weights[c] <= 0.0) continue;
    comps.emplace_back(to_string(c));
    weights.push_back(std::string(to_string(c)) + "=" + fmt2(p.reward_weights[c]));
    docs.push_back("• " + reward_doc(c));
  }
  v.set("name", p.name).set("n_actions", std::to_string(ctx.actions_per_round));
  if (ctx.best) {
    v.set("best_round", std::to_string(ctx.best->round))
        .set("best_reward", fmt2(ctx.best->reward))
        .set("best_summary", ctx.best->summary);
  } else {
    v.set("best_round", "none yet").set("best_reward", "n/a").set("best_summary", "nothing yet");
  }
  v.set("active_comps", join(comps, "/"))
      .set("active_weights", join(weights))
      .set("tip", tip_text)
      .set("selected_reward_docs", join(docs, "\n"))
      .set("violations", violations);

  std::vector<std::string> last;
  for (const auto& a : ctx.last_actions) last.push_back(describe_action(a));
  v.set("last_actions", join(last, "; "));
  v.set("observed_rewards", ctx.last_reward ? describe_rewards(*ctx.last_reward) : "none yet");
  v.set("users", join(ctx.roster));
  v.set("topics", join(ctx.known_topics));

  std::vector<std::string> dms, posts;
  for (const auto& d : ctx.dm_replies)
    dms.push_back("- author: " + d.author + " (DM id: " + std::to_string(d.id) +
                  ", topic: " + d.topic.value_or("none") + ", content: " + d.content + ")");
  for (const auto& c : ctx.commentable)
    posts.push_back("- target_id: " + std::to_string(c.id) + " (POST author: " + c.author +
                    ", topic: " + c.topic.value_or("none") + ", content: " + c.content + ")");
  v.list("commentable_posts", posts, true);
  v.list("dm_replies", dms);
  return v;
}

inline PromptVars coach_vars(const agents::CoachTips& tips, const agents::PlanContext& ctx,
                             const std::vector<std::string>& recent_topics) {
  PromptVars v;
  std::vector<std::string> focus, senders;
  for (auto c : tips.priority) focus.emplace_back(to_string(c));
  for (const auto& d : ctx.dm_replies) senders.push_back(d.author);
  std::vector<std::string> guide;
  for (const auto& t : tips.tips) guide.push_back(agents::describe_tip(t).substr(2));
  v.set("focus", focus.empty() ? "(all components on target; explore)" : join(focus, " > "))
      .set("guidelines", join(guide, " "))
      .set("users", join(ctx.roster))
      .set("dm_last_senders", join(senders))
      .set("recent_partners", join(ctx.recent_partners))
      .set("seen_topics", join(ctx.known_topics))
      .set("last_recent", join(recent_topics));
  return v;
}

inline std::string personality_summary(const BigFive& b) {
  auto level = [](double x) { return x >= 0.66 ? "high" : x <= 0.33 ? "low" : "moderate"; };
  return std::string(level(b.openness)) + " openness, " + level(b.conscientiousness) +
         " conscientiousness, " + level(b.extraversion) + " extraversion, " +
         level(b.agreeableness) + " agreeableness, " + level(b.neuroticism) + " neuroticism";
}

// --- gateway -----------------------------------------------------------------

struct ExchangeTag {
  std::string kind;
  UserId user;
  int round = 0;
  int attempt = 0;  // validation attempt, 0-based
};

// Logical call counts per (round, user, kind) with the per-round caps enforced.
class CallAccountant {
 public:
  void record(const ExchangeTag& tag) {
    std::lock_guard<std::mutex> lock(mu_);
    const int n = ++counts_[{tag.round, tag.user, tag.kind}];
    const int cap = tag.kind == "coach" ? 1 : kMaxAttempts;
    if (n > cap)
      throw CorruptionError("call budget exceeded: " + tag.kind + " for " + tag.user + " in round " +
                            std::to_string(tag.round));
  }
  int count(int round, const UserId& user, const std::string& kind) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = counts_.find({round, user, kind});
    return it == counts_.end() ? 0 : it->second;
  }
  int total() const {
    std::lock_guard<std::mutex> lock(mu_);
    int sum = 0;
    for (const auto& [_, n] : counts_) sum += n;
    return sum;
  }
  // Per-agent per-round ceiling: plan, vote and tie rating with retries, plus one coach call.
  static int per_agent_round_cap() { return 3 * kMaxAttempts + 1; }

 private:
  mutable std::mutex mu_;
  std::map<std::tuple<int, UserId, std::string>, int> counts_;
};

struct PlanOutcome {
  agents::ActionPlan plan;
  bool fallback = false;
  int attempts = 0;
  std::vector<json> exchanges;
  std::vector<std::string> diagnostics;
};

struct VoteOutcome {
  std::vector<Vote> votes;
  bool fallback = false;
  std::vector<json> exchanges;
  std::vector<std::string> diagnostics;
};

struct RatingOutcome {
  std::map<UserId, double> evidence;
  bool fallback = false;
  std::vector<json> exchanges;
  std::vector<std::string> diagnostics;
};

class Gateway {
 public:
  using Sleeper = std::function<void(int)>;

  Gateway(LlmConfig cfg, std::shared_ptr<Transport> transport,
          Sleeper sleep = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); })
      : cfg_(std::move(cfg)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
    if (const char* token = std::getenv(cfg_.api_key_env.c_str())) token_ = token;
  }

  const LlmConfig& config() const { return cfg_; }
  const CallAccountant& accountant() const { return accountant_; }

  // One chat completion with backoff on 429, 5xx and network failures. The exchange record
  // is appended to `log` (secrets redacted).
  std::string complete(const ExchangeTag& tag, const std::vector<Message>& messages,
                       std::vector<json>& log) {
    accountant_.record(tag);
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    const json body{{"model", cfg_.model}, {"messages", msgs}, {"temperature", cfg_.temperature}};
    std::map<std::string, std::string> headers;
    if (!token_.empty()) headers["Authorization"] = "Bearer " + token_;

    json record{{"prompt", tag.kind},       {"user", tag.user},
                {"attempt", tag.attempt},   {"endpoint", cfg_.endpoint},
                {"model", cfg_.model},      {"temperature", cfg_.temperature},
                {"messages", msgs}};
    json transport_log = json::array();
    for (int retry = 0;; ++retry) {
      const HttpResponse res =
          transport_->post(cfg_.endpoint, body.dump(), headers, cfg_.timeout_ms, tag.kind);
      transport_log.push_back({{"status", res.status}, {"latency_ms", res.latency_ms},
                               {"error", res.error}});
      const bool transient = res.status == 0 || res.status == 429 || res.status >= 500;
      if (res.status == 200) {
        json parsed;
        try {
          parsed = json::parse(res.body);
          std::string text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
          record["response"] = redact(text);
          record["prompt_tokens"] = parsed.contains("usage") ? parsed["usage"].value("prompt_tokens", 0) : 0;
          record["completion_tokens"] =
              parsed.contains("usage") ? parsed["usage"].value("completion_tokens", 0) : 0;
          record["transport"] = transport_log;
          log.push_back(redact(record));
          return text;
        } catch (const json::exception& e) {
          record["transport"] = transport_log;
          record["error"] = std::string("unreadable completion body: ") + e.what();
          log.push_back(redact(record));
          throw TransportError("unreadable completion body from " + cfg_.endpoint);
        }
      }
      if (!transient || retry >= cfg_.max_transport_retries) {
        record["transport"] = transport_log;
        record["error"] = "transport failure";
        log.push_back(redact(record));
        throw TransportError("chat completion failed with status " + std::to_string(res.status) +
                             (res.error.empty() ? "" : " (" + res.error + ")") + " after " +
                             std::to_string(retry + 1) + " request(s)");
      }
      sleep_(cfg_.backoff_base_ms * (1 << std::min(retry, 16)));
    }
  }

  PlanOutcome plan(const Persona& persona, const agents::PlanContext& ctx) {
    PlanOutcome out;
    std::string feedback;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      out.attempts = attempt + 1;
      auto msgs = render(plan_template(), plan_vars(persona, ctx, ctx.tip_text, feedback),
                         cfg_.prompt_char_budget);
      const auto text = complete({"plan", persona.user, ctx.round, attempt}, msgs, out.exchanges);
      try {
        auto plan = parse_plan(text, cfg_.lenient);
        auto violations = agents::validate_plan(plan, ctx);
        if (violations.empty()) {
          out.plan = std::move(plan);
          return out;
        }
        feedback.clear();
        for (const auto& v : violations)
          feedback += (feedback.empty() ? "" : "; ") +
                      (v.slot >= 0 ? "action " + std::to_string(v.slot) + ": " : "") + v.message;
        out.diagnostics.push_back("plan attempt " + std::to_string(attempt + 1) + " invalid: " + feedback);
      } catch (const ParseError& e) {
        feedback = e.what();
        out.diagnostics.push_back("plan attempt " + std::to_string(attempt + 1) + " unparseable: " + feedback);
      }
    }
    out.plan = agents::all_not_plan(ctx.actions_per_round);
    out.fallback = true;
    out.diagnostics.push_back("plan attempts exhausted; substituting NOT actions");
    return out;
  }

  VoteOutcome vote(const Persona& persona, int round, const std::vector<agents::VoteItem>& items,
                   const std::vector<std::string>& item_lines) {
    VoteOutcome out;
    PromptVars vars;
    vars.set("name", persona.name)
        .set("persona_type", persona.role)
        .set("personality", personality_summary(persona.big_five))
        .list("items", item_lines, true);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      auto msgs = render(vote_template(), vars, cfg_.prompt_char_budget);
      const auto text = complete({"vote", persona.user, round, attempt}, msgs, out.exchanges);
      try {
        out.votes = parse_votes(text, persona.user, items, cfg_.lenient);
        return out;
      } catch (const ParseError& e) {
        out.diagnostics.push_back("vote attempt " + std::to_string(attempt + 1) + " unparseable: " + e.what());
      }
    }
    out.fallback = true;
    out.diagnostics.push_back("vote attempts exhausted; all votes neutral");
    out.votes.clear();
    for (const auto& it : items) out.votes.push_back({persona.user, it.id, it.author, 0, it.round});
    return out;
  }

  RatingOutcome rate_ties(const Persona& persona, int round, const std::vector<UserId>& peers,
                          const std::vector<std::string>& transcript) {
    RatingOutcome out;
    for (const auto& p : peers) out.evidence[p] = 0.0;
    if (peers.empty()) return out;
    PromptVars vars;
    vars.set("name", persona.name)
        .set("peer_list", join(peers))
        .list("transcript_text", transcript, true);
    vars.lists["peer_list"] = peers;  // scalar text wins at expansion; list satisfies the check
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      auto msgs = render(tie_update_template(), vars, cfg_.prompt_char_budget);
      const auto text = complete({"tie_update", persona.user, round, attempt}, msgs, out.exchanges);
      try {
        auto ratings = parse_tie_ratings(text, cfg_.lenient);
        std::vector<ties::Rating> usable;
        for (auto& r : ratings) {
          if (std::find(peers.begin(), peers.end(), r.peer) == peers.end()) {
            out.diagnostics.push_back("rating for unknown peer '" + r.peer + "' dropped");
            continue;
          }
          usable.push_back(std::move(r));
        }
        auto normalized = ties::text_evidence(usable, peers);
        out.evidence = normalized.evidence;
        for (auto& d : normalized.diagnostics) out.diagnostics.push_back(std::move(d));
        return out;
      } catch (const ParseError& e) {
        out.diagnostics.push_back("tie rating attempt " + std::to_string(attempt + 1) +
                                  " unparseable: " + e.what());
      }
    }
    out.fallback = true;
    out.diagnostics.push_back("tie rating attempts exhausted; all evidence zero");
    return out;
  }

  std::string coach(const UserId& user, int round, const agents::CoachTips& tips,
                    const agents::PlanContext& ctx, const std::vector<std::string>& recent_topics,
                    std::vector<json>& log) {
    auto msgs = render(coach_template(), coach_vars(tips, ctx, recent_topics), cfg_.prompt_char_budget);
    return complete({"coach", user, round, 0}, msgs, log);
  }

  // Persona records grounded in corpus snippets; ids are assigned as p01, p02, ...
  std::vector<Persona> plan_personas(const std::vector<std::string>& snippets, int n,
                                     std::vector<json>& log) {
    if (n < 1) throw DomainError("plan_personas needs n >= 1");
    PromptVars vars;
    vars.set("n", std::to_string(n)).list("snippets", snippets, true);
    std::string last_error;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      auto msgs = render(persona_plan_template(), vars, cfg_.prompt_char_budget);
      const auto text = complete({"persona_plan", "", 0, attempt}, msgs, log);
      try {
        const json arr = detail::parse_json(cfg_.lenient ? detail::strip_fences(text, '[', ']') : text);
        if (!arr.is_array() || static_cast<int>(arr.size()) != n)
          throw ParseError("expected an array of " + std::to_string(n) + " personas");
        std::vector<Persona> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
          json rec = arr[i];
          if (!rec.is_object()) throw ParseError("persona " + std::to_string(i) + ": not an object");
          std::ostringstream id;
          id << 'p' << std::setw(2) << std::setfill('0') << (i + 1);
          rec["user"] = id.str();
          try {
            out.push_back(persona_from_json(rec));
          } catch (const ConfigError& e) {
            throw ParseError("persona " + std::to_string(i) + ": " + e.what());
          } catch (const json::exception& e) {
            throw ParseError("persona " + std::to_string(i) + ": " + e.what());
          }
        }
        return out;
      } catch (const ParseError& e) {
        last_error = e.what();
      }
    }
    throw ParseError("persona generation failed after " + std::to_string(kMaxAttempts) +
                     " attempts: " + last_error);
  }

 private:
  std::string redact(std::string s) const {
    if (token_.empty()) return s;
    for (auto pos = s.find(token_); pos != std::string::npos; pos = s.find(token_, pos))
      s.replace(pos, token_.size(), "[REDACTED]");
    return s;
  }
  json redact(const json& j) const {
    if (token_.empty()) return j;
    return json::parse(redact(j.dump()));
  }

  LlmConfig cfg_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleep_;
  std::string token_;
  CallAccountant accountant_;
};

// Bundled personas when no model is available, otherwise model-generated ones.
inline std::vector<Persona> plan_personas(const std::vector<std::string>& snippets, int n,
                                          Gateway* gateway, const std::vector<Persona>& bundled,
                                          std::vector<json>& log) {
  if (gateway) return gateway->plan_personas(snippets, n, log);
  if (n > static_cast<int>(bundled.size()))
    throw ConfigError("requested " + std::to_string(n) + " personas but only " +
                      std::to_string(bundled.size()) + " are bundled");
  return {bundled.begin(), bundled.begin() + n};
}

}  // namespace socsim::llm
