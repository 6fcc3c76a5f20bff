#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "socsim/agents.hpp"
#include "socsim/batch.hpp"
#include "socsim/config.hpp"
#include "socsim/event_log.hpp"
#include "socsim/llm/gateway.hpp"
#include "socsim/matrix.hpp"
#include "socsim/memory.hpp"
#include "socsim/rewards.hpp"
#include "socsim/rng.hpp"
#include "socsim/serialize.hpp"
#include "socsim/ties.hpp"
#include "socsim/types.hpp"

namespace socsim {

using nlohmann::json;

struct SimState {
  std::string run_id;
  SimConfig config;
  std::vector<Persona> personas;  // sorted by user id; memory lives here
  Roster roster;
  int round = 0;                  // last completed round
  RoundBatch prev;                // batch of `round`
  ties::TieGraph ties;
  ties::ReciprocityState reciprocity;
  TopicState topics;
  std::map<UserId, std::vector<RewardVector>> rewards;
  std::map<UserId, agents::PlanContext::BestRound> best;
  ActionId next_action_id = 1;

  const Persona& persona(const UserId& u) const { return personas[roster.index(u)]; }
};

inline SimState init_state(const SimConfig& config, std::vector<Persona> personas, std::string run_id) {
  config.validate();
  if (static_cast<int>(personas.size()) < config.num_agents)
    throw ConfigError("num_agents: " + std::to_string(config.num_agents) + " requested but only " +
                      std::to_string(personas.size()) + " personas available");
  personas.resize(config.num_agents);
  std::sort(personas.begin(), personas.end(),
            [](const Persona& a, const Persona& b) { return a.user < b.user; });
  for (std::size_t i = 1; i < personas.size(); ++i)
    if (personas[i].user == personas[i - 1].user)
      throw ConfigError("personas: duplicate user id '" + personas[i].user + "'");
  for (auto& p : personas) p.reward_weights.validate();

  SimState s;
  s.run_id = std::move(run_id);
  s.config = config;
  std::vector<UserId> ids;
  for (const auto& p : personas) ids.push_back(p.user);
  s.roster = Roster(ids);
  s.personas = std::move(personas);
  s.ties = ties::TieGraph(s.roster.size());
  return s;
}

struct RoundResult {
  RoundBatch batch;
  std::map<UserId, RewardVector> rewards;
  ties::TieGraph ties;
};

struct EngineDeps {
  EventLog* log = nullptr;
  llm::Gateway* gateway = nullptr;
};

namespace detail {

inline std::string opener(Tone t) {
  switch (t) {
    case Tone::Supportive: return "Really glad to see progress on";
    case Tone::Neutral: return "Some thoughts on";
    case Tone::Critical: return "I have real doubts about";
  }
  return "";
}

inline std::string compose(const Action& a) {
  std::string text;
  if (a.type == ActionType::Com) text = "Re #" + std::to_string(*a.target_id) + ": ";
  if (a.type == ActionType::Dm) text = "@" + *a.recipient + " ";
  text += opener(a.tone) + " " + a.topic.value_or("this") + ".";
  for (const auto& m : a.mentions) text += " @" + m;
  return text;
}

template <typename F>
void for_each_agent(std::size_t n, int in_flight, F&& f) {
  if (in_flight <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(in_flight)) {
    std::vector<std::future<void>> running;
    const std::size_t end = std::min(n, start + static_cast<std::size_t>(in_flight));
    for (std::size_t i = start; i < end; ++i)
      running.push_back(std::async(std::launch::async, [&f, i] { f(i); }));
    for (auto& r : running) r.get();
  }
}

inline std::vector<std::string> action_topics(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  for (const auto& a : actions)
    if (a.topic && std::find(out.begin(), out.end(), *a.topic) == out.end()) out.push_back(*a.topic);
  return out;
}

inline std::string summarize(const std::vector<const Action*>& actions) {
  std::string out;
  for (const auto* a : actions) out += (out.empty() ? "" : "; ") + llm::describe_action(*a);
  return out.empty() ? "nothing" : out;
}

}  // namespace detail

// Everything agent u may look at while planning round t (all drawn from round t-1).
inline agents::PlanContext plan_context(const SimState& s, const Persona& p, int t) {
  agents::PlanContext ctx;
  ctx.user = p.user;
  ctx.round = t;
  ctx.actions_per_round = s.config.actions_per_round;
  ctx.visible = visible_content(p.user, s.prev);
  for (const auto* a : actions_of(p.user, s.prev)) ctx.last_actions.push_back(*a);
  if (auto it = s.rewards.find(p.user); it != s.rewards.end() && !it->second.empty())
    ctx.last_reward = it->second.back();
  ctx.weights = p.reward_weights;
  for (const auto& u : s.roster.users())
    if (u != p.user) ctx.roster.push_back(u);

  std::set<std::string> known = s.topics.seen_by(p.user);
  for (const auto& a : ctx.visible)
    if (a.topic) known.insert(*a.topic);
  ctx.known_topics.assign(known.begin(), known.end());
  ctx.topic_pool = agents::default_topic_pool();

  std::map<ActionId, int> likes;
  for (const auto& v : s.prev.votes)
    if (v.value > 0) ++likes[v.content_id];
  for (const auto& a : ctx.visible) {
    if (a.type == ActionType::Dm && a.recipient == p.user)
      ctx.dm_replies.push_back({a.id, a.sender, a.topic, a.content});
    else if (is_public(a.type) && a.sender != p.user)
      ctx.commentable.push_back({a.id, a.sender, a.topic, a.content, likes[a.id]});
  }
  ctx.recent_partners = recent_partners(p.memory);
  if (auto it = s.best.find(p.user); it != s.best.end()) ctx.best = it->second;
  return ctx;
}

inline std::vector<std::string> vote_lines(const Persona& voter,
                                           const std::vector<agents::VoteItem>& items,
                                           const RoundBatch& batch) {
  std::vector<std::string> lines;
  for (const auto& it : items) {
    const Action* a = batch.find(it.id);
    std::string rel = "tie " + llm::fmt2(it.tie_weight);
    if (auto r = voter.memory.relationship.find(it.author); r != voter.memory.relationship.end())
      rel += ", last interaction round " + std::to_string(r->second.last_round);
    lines.push_back("• " + std::to_string(it.id) + " " + it.author + " " + a->content + " (" + rel + ")");
  }
  return lines;
}

inline std::vector<std::string> tie_transcript(const UserId& u, const std::vector<UserId>& peers,
                                               const RoundBatch& batch) {
  std::set<UserId> set(peers.begin(), peers.end());
  std::vector<std::string> lines;
  for (const auto& a : batch.actions) {
    if (a.type == ActionType::Not || !set.count(a.sender)) continue;
    const bool to_u = a.receiver() == u || a.mentions.count(u);
    if (!to_u) continue;
    lines.push_back("[" + std::string(to_string(a.type)) + " " + a.sender + " -> " + u + " | " +
                    a.topic.value_or("no topic") + " | " + std::string(to_string(a.tone)) + "] " +
                    a.content);
  }
  for (const auto& v : batch.votes) {
    if (v.value == 0 || v.author != u || !set.count(v.voter)) continue;
    lines.push_back("[VOTE " + v.voter + (v.value > 0 ? " liked " : " disliked ") + u + "'s item " +
                    std::to_string(v.content_id) + "]");
  }
  return lines;
}

// One full round: plan against round t-1, execute, vote, reward, reweight.
inline RoundResult run_round(SimState& s, int t, const EngineDeps& deps = {}) {
  if (t != s.round + 1)
    throw DomainError("run_round: expected round " + std::to_string(s.round + 1) + ", got " +
                      std::to_string(t));
  const SimConfig& cfg = s.config;
  const bool llm_policy = cfg.policy == PolicyKind::Llm;
  const bool text_ties = cfg.tie_mode == TieMode::Text;
  if ((llm_policy || text_ties) && !deps.gateway)
    throw ConfigError("policy=llm or tie_mode=text requires an LLM transport");
  const std::size_t n = s.personas.size();
  const int in_flight = deps.gateway ? deps.gateway->config().max_in_flight : 1;
  auto emit = [&](const std::string& kind, json payload) {
    if (deps.log) deps.log->emit(t, kind, std::move(payload));
  };

  // --- plan ---
  struct PlanWork {
    agents::PlanContext ctx;
    agents::ActionPlan plan;
    bool fallback = false;
    std::vector<json> exchanges;
    std::vector<std::string> diagnostics;
  };
  std::vector<PlanWork> work(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.personas[i];
    work[i].ctx = plan_context(s, p, t);
    const auto& history = s.rewards[p.user];
    if (cfg.coach_enabled && !history.empty()) {
      const std::vector<RewardVector> recent(history.end() - std::min<std::size_t>(3, history.size()),
                                             history.end());
      work[i].ctx.tips = agents::coach(p, recent, work[i].ctx);
    }
  }
  detail::for_each_agent(n, llm_policy ? in_flight : 1, [&](std::size_t i) {
    const auto& p = s.personas[i];
    auto& w = work[i];
    if (!llm_policy) {
      Stream rng(cfg.rng_seed, p.user, t, "plan");
      w.plan = agents::scripted_plan(p, w.ctx, rng);
      return;
    }
    if (w.ctx.tips) {
      w.ctx.tip_text = deps.gateway->coach(p.user, t, *w.ctx.tips, w.ctx,
                                           detail::action_topics(w.ctx.last_actions), w.exchanges);
    }
    auto outcome = deps.gateway->plan(p, w.ctx);
    w.plan = std::move(outcome.plan);
    w.fallback = outcome.fallback;
    for (auto& x : outcome.exchanges) w.exchanges.push_back(std::move(x));
    w.diagnostics = std::move(outcome.diagnostics);
  });

  // --- execute ---
  RoundBatch batch;
  batch.round = t;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = s.personas[i];
    auto& w = work[i];
    for (auto& x : w.exchanges) emit("llm_exchange", std::move(x));
    if (w.ctx.tips) {
      json tips = json::array();
      for (const auto& tip : w.ctx.tips->tips) tips.push_back(agents::describe_tip(tip));
      emit("coach", {{"user", p.user}, {"tips", tips}});
    }
    for (const auto& d : w.diagnostics) emit("diagnostic", {{"user", p.user}, {"message", d}});
    if (w.fallback) emit("diagnostic", {{"user", p.user}, {"message", "plan fallback: all NOT"}});

    const auto violations = agents::validate_plan(w.plan, w.ctx);
    if (!violations.empty())
      throw CorruptionError("plan for " + p.user + " violates the contract: " + violations.front().message);

    Stream mention_rng(cfg.rng_seed, p.user, t, "mention");
    for (const auto& slot : w.plan.slots) {
      Action a;
      a.id = s.next_action_id++;
      a.round = t;
      a.type = slot.type;
      a.sender = p.user;
      if (slot.type != ActionType::Not) {
        a.topic = canonical_topic(*slot.topic);
        a.tone = slot.tone;
        if (slot.type == ActionType::Dm) a.recipient = slot.recipient;
        if (slot.target_id) {
          const Action* target = s.prev.find(*slot.target_id);
          if (!target) throw CorruptionError("target id " + std::to_string(*slot.target_id) + " not found");
          a.target_id = target->id;
          a.target_author = target->sender;
        }
        if (slot.mention_flag) {
          std::vector<UserId> pool;
          if (a.target_author && *a.target_author != p.user) pool.push_back(*a.target_author);
          if (pool.empty()) pool = w.ctx.recent_partners;
          if (pool.empty()) pool = w.ctx.roster;
          a.mentions.insert(pool[mention_rng.index(pool.size())]);
        }
        a.content = detail::compose(a);
        a.sentiment = agents::sentiment_of(a.tone);
      }
      batch.actions.push_back(std::move(a));
    }
  }

  // --- vote ---
  std::vector<std::vector<agents::VoteItem>> items(n);
  std::vector<llm::VoteOutcome> votes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& voter = s.personas[i];
    for (const auto& a : visible_content(voter.user, batch)) {
      if (!is_public(a.type) || a.sender == voter.user) continue;
      const auto& author = s.persona(a.sender);
      items[i].push_back({a.id, a.sender, t,
                          s.ties.weights(s.roster.index(a.sender), s.roster.index(voter.user)),
                          agents::stance_alignment(voter, author)});
    }
  }
  detail::for_each_agent(n, llm_policy ? in_flight : 1, [&](std::size_t i) {
    const auto& voter = s.personas[i];
    if (!llm_policy) {
      Stream rng(cfg.rng_seed, voter.user, t, "vote");
      votes[i].votes = agents::scripted_vote(voter, items[i], rng, cfg.vote);
    } else if (!items[i].empty()) {
      votes[i] = deps.gateway->vote(voter, t, items[i], vote_lines(voter, items[i], batch));
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : votes[i].exchanges) emit("llm_exchange", std::move(x));
    for (const auto& d : votes[i].diagnostics)
      emit("diagnostic", {{"user", s.personas[i].user}, {"message", d}});
    for (auto& v : votes[i].votes) batch.votes.push_back(std::move(v));
  }

  std::set<UserId> users(s.roster.users().begin(), s.roster.users().end());
  check_batch(batch, users);
  for (const auto& a : batch.actions) emit("action", to_json(a));
  for (const auto& v : batch.votes) emit("vote", to_json(v));

  // --- reward ---
  RoundResult result;
  for (const auto& p : s.personas) {
    auto r = rewards::evaluate(p.user, t, batch, s.prev, visible_content(p.user, s.prev), s.topics,
                               cfg.num_agents, cfg.actions_per_round, cfg.reward, p.reward_weights);
    emit("reward", to_json(r));
    auto& best = s.best[p.user];
    if (s.rewards[p.user].empty() || r.total > best.reward)
      best = {t, r.total, detail::summarize(actions_of(p.user, batch))};
    s.rewards[p.user].push_back(r);
    result.rewards[p.user] = r;
  }

  // --- reweight ---
  auto recip = ties::update_reciprocity(s.reciprocity, batch, cfg.beta_rec);
  const auto& recip_for_evidence =
      cfg.reciprocity_timing == ties::ReciprocityTiming::PostUpdate ? recip : s.reciprocity;
  const auto active = ties::activations(s.roster, batch);
  Matrix evidence(n);
  if (!text_ties) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (active[u][v])
          evidence(u, v) = ties::aggregate_evidence(
              ties::evidence_signals(s.roster[v], s.roster[u], batch, s.topics, recip_for_evidence,
                                     cfg.reward.epsilon),
              cfg.evidence_weights);
  } else {
    std::vector<llm::RatingOutcome> ratings(n);
    detail::for_each_agent(n, in_flight, [&](std::size_t u) {
      std::vector<UserId> peers;
      for (std::size_t v = 0; v < n; ++v)
        if (active[u][v]) peers.push_back(s.roster[v]);
      if (peers.empty()) return;
      ratings[u] = deps.gateway->rate_ties(s.personas[u], t, peers,
                                           tie_transcript(s.roster[u], peers, batch));
    });
    for (std::size_t u = 0; u < n; ++u) {
      for (auto& x : ratings[u].exchanges) emit("llm_exchange", std::move(x));
      for (const auto& d : ratings[u].diagnostics)
        emit("diagnostic", {{"user", s.roster[u]}, {"message", d}});
      for (const auto& [peer, e] : ratings[u].evidence) evidence(u, s.roster.index(peer)) = e;
    }
  }
  auto next = ties::tie_update(s.ties, active, evidence, cfg.update_params());
  next.round = t;
  json changes = json::array();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (next.weights(u, v) != s.ties.weights(u, v))
        changes.push_back({{"src", s.roster[v]},
                           {"dst", s.roster[u]},
                           {"old", s.ties.weights(u, v)},
                           {"new", next.weights(u, v)}});
  emit("tie_update", {{"changes", changes}});

  // --- reflect ---
  for (const auto& p : s.personas) s.topics.record_exposure(p.user, visible_content(p.user, s.prev));
  s.topics.record_platform(batch);
  std::map<UserId, MemoryStores> memories;
  for (auto& p : s.personas) memories[p.user] = std::move(p.memory);
  update_memories(memories, s.roster, s.prev, batch, cfg.beta_rec);
  for (auto& p : s.personas) p.memory = std::move(memories[p.user]);

  s.reciprocity = std::move(recip);
  s.ties = next;
  s.prev = batch;
  s.round = t;
  if (deps.log) deps.log->flush();

  result.batch = std::move(batch);
  result.ties = std::move(next);
  return result;
}

// --- checkpoint -------------------------------------------------------------

inline json to_json(const RoundBatch& b) {
  json actions = json::array(), votes = json::array();
  for (const auto& a : b.actions) actions.push_back(to_json(a));
  for (const auto& v : b.votes) votes.push_back(to_json(v));
  return {{"round", b.round}, {"actions", actions}, {"votes", votes}};
}

inline RoundBatch batch_from_json(const json& j) {
  RoundBatch b;
  b.round = j.at("round").get<int>();
  for (const auto& a : j.at("actions")) b.actions.push_back(action_from_json(a));
  for (const auto& v : j.at("votes")) b.votes.push_back(vote_from_json(v));
  return b;
}

inline json state_to_json(const SimState& s) {
  json personas = json::array();
  for (const auto& p : s.personas) {
    json rec = to_json(p);
    rec["memory"] = to_json(p.memory);
    personas.push_back(rec);
  }
  json recip = json::array();
  for (const auto& [pair, value] : s.reciprocity.likes) recip.push_back({pair.first, pair.second, value});
  json seen = json::object();
  for (const auto& [u, topics] : s.topics.seen) seen[u] = topics;
  json rewards = json::object();
  for (const auto& [u, rs] : s.rewards) {
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(to_json(r));
    rewards[u] = arr;
  }
  json best = json::object();
  for (const auto& [u, b] : s.best) best[u] = {{"round", b.round}, {"reward", b.reward}, {"summary", b.summary}};
  return {{"schema_version", kSchemaVersion},
          {"run_id", s.run_id},
          {"round", s.round},
          {"next_action_id", s.next_action_id},
          {"config", config_to_json(s.config)},
          {"personas", personas},
          {"prev", to_json(s.prev)},
          {"ties", to_json(s.ties.weights)},
          {"reciprocity", recip},
          {"topics", {{"seen", seen}, {"platform", s.topics.platform}}},
          {"rewards", rewards},
          {"best", best}};
}

inline SimState state_from_json(const json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion) throw ArtifactError("checkpoint: unsupported schema_version");
  try {
    std::vector<Persona> personas;
    std::vector<MemoryStores> memories;
    for (const auto& rec : j.at("personas")) {
      personas.push_back(persona_from_json(rec));
      memories.push_back(memory_from_json(rec.at("memory")));
    }
    for (std::size_t i = 0; i < personas.size(); ++i) personas[i].memory = memories[i];
    SimState s = init_state(config_from_json(j.at("config")), personas, j.at("run_id").get<std::string>());
    s.round = j.at("round").get<int>();
    s.next_action_id = j.at("next_action_id").get<ActionId>();
    s.prev = batch_from_json(j.at("prev"));
    s.ties.weights = matrix_from_json(j.at("ties"));
    s.ties.round = s.round;
    for (const auto& e : j.at("reciprocity"))
      s.reciprocity.likes[{e[0].get<std::string>(), e[1].get<std::string>()}] = e[2].get<double>();
    for (const auto& [u, topics] : j.at("topics").at("seen").items())
      s.topics.seen[u] = topics.get<std::set<std::string>>();
    s.topics.platform = j.at("topics").at("platform").get<std::set<std::string>>();
    for (const auto& [u, arr] : j.at("rewards").items())
      for (const auto& r : arr) s.rewards[u].push_back(reward_from_json(r));
    for (const auto& [u, b] : j.at("best").items())
      s.best[u] = {b.at("round").get<int>(), b.at("reward").get<double>(), b.at("summary").get<std::string>()};
    return s;
  } catch (const json::exception& e) {
    throw ArtifactError(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw ArtifactError(std::string("checkpoint: ") + e.what());
  }
}

// --- replay -----------------------------------------------------------------

struct Replay {
  std::map<UserId, MemoryStores> memories;
  Matrix ties;
  int rounds = 0;
};

// Rebuilds memories and the final tie matrix from an event log alone.
inline Replay replay(const std::vector<Event>& events, const Roster& roster, double beta_rec) {
  std::map<int, RoundBatch> batches;
  Replay out;
  out.ties = Matrix(roster.size());
  for (const auto& e : events) {
    if (e.kind == "action") {
      auto& b = batches[e.round];
      b.round = e.round;
      b.actions.push_back(action_from_json(e.payload));
    } else if (e.kind == "vote") {
      auto& b = batches[e.round];
      b.round = e.round;
      b.votes.push_back(vote_from_json(e.payload));
    } else if (e.kind == "tie_update") {
      for (const auto& c : e.payload.at("changes"))
        out.ties(roster.index(c.at("dst").get<std::string>()), roster.index(c.at("src").get<std::string>())) =
            c.at("new").get<double>();
      out.rounds = std::max(out.rounds, e.round);
    }
  }
  for (const auto& u : roster.users()) out.memories[u];
  RoundBatch prev;
  for (const auto& [round, batch] : batches) {
    update_memories(out.memories, roster, prev, batch, beta_rec);
    prev = batch;
  }
  return out;
}

}  // namespace socsim
