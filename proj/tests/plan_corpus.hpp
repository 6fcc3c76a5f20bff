#pragma once

// Hand-built valid plans and their single-field mutants for contract tests.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "socsim/agents.hpp"

namespace plan_corpus {

using socsim::ActionType;
using socsim::Tone;
using socsim::agents::ActionPlan;
using socsim::agents::PlanContext;
using socsim::agents::PlannedAction;

inline PlanContext context() {
  PlanContext ctx;
  ctx.user = "u01";
  ctx.round = 3;
  ctx.actions_per_round = 3;
  ctx.roster = {"u02", "u03", "u04"};
  ctx.known_topics = {"carbon tax", "heat waves"};
  ctx.dm_replies = {{11, "u02", "carbon tax", "can we talk?"}};
  ctx.commentable = {{21, "u03", "heat waves", "record heat", 2}, {22, "u04", "carbon tax", "tax it", 0}};
  return ctx;
}

inline PlannedAction post(std::string topic, bool mention = false, Tone tone = Tone::Neutral) {
  return {ActionType::Post, std::nullopt, topic, std::nullopt, mention, tone};
}
inline PlannedAction comment(socsim::ActionId target, std::string topic, bool mention = false) {
  return {ActionType::Com, std::nullopt, topic, target, mention, Tone::Supportive};
}
inline PlannedAction reply(std::string to, socsim::ActionId target, std::string topic) {
  return {ActionType::Dm, to, topic, target, false, Tone::Supportive};
}
inline PlannedAction cold_dm(std::string to, std::string topic) {
  return {ActionType::Dm, to, topic, std::nullopt, false, Tone::Critical};
}
inline PlannedAction nothing() { return {}; }

inline std::vector<ActionPlan> valid_plans() {
  const auto P = post("carbon tax");
  const auto Pm = post("sea level rise", true, Tone::Supportive);
  const auto C = comment(21, "heat waves");
  const auto Cm = comment(22, "carbon tax", true);
  const auto R = reply("u02", 11, "carbon tax");
  const auto D3 = cold_dm("u03", "heat waves");
  const auto D4 = cold_dm("u04", "green jobs");
  const auto N = nothing();
  return {
      {{P, P, P}},    {{P, Pm, N}},  {{N, N, N}},   {{C, C, C}},    {{Cm, C, P}},
      {{R, P, N}},    {{R, D3, D4}}, {{D3, D3, N}}, {{Pm, Cm, R}},  {{N, C, D4}},
      {{P, N, R}},    {{R, R, R}},   {{D4, Cm, Pm}}, {{C, N, N}},   {{Pm, Pm, Pm}},
      {{D3, P, Cm}},  {{N, R, C}},   {{Cm, Cm, D3}}, {{P, D4, N}},  {{N, N, Pm}},
  };
}

using Mutation = std::function<std::optional<PlannedAction>(PlannedAction)>;

// Each mutation changes one field of one slot and returns empty when the change would not
// break that slot (e.g. clearing a field that is already empty).
inline std::vector<std::pair<std::string, Mutation>> mutations() {
  std::vector<std::pair<std::string, Mutation>> m;
  m.emplace_back("recipient_on_public", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type == ActionType::Dm) return std::nullopt;
    a.recipient = "u03";
    return a;
  });
  m.emplace_back("unknown_recipient", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type != ActionType::Dm) return std::nullopt;
    a.recipient = "u99";
    return a;
  });
  m.emplace_back("drop_recipient", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type != ActionType::Dm) return std::nullopt;
    a.recipient.reset();
    return a;
  });
  m.emplace_back("unlisted_target", [](PlannedAction a) -> std::optional<PlannedAction> {
    a.target_id = 999;
    return a;
  });
  m.emplace_back("drop_com_target", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type != ActionType::Com) return std::nullopt;
    a.target_id.reset();
    return a;
  });
  m.emplace_back("drop_topic", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type == ActionType::Not) return std::nullopt;
    a.topic.reset();
    return a;
  });
  m.emplace_back("topic_on_not", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type != ActionType::Not) return std::nullopt;
    a.topic = "carbon tax";
    return a;
  });
  m.emplace_back("mention_on_private", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (socsim::is_public(a.type)) return std::nullopt;
    a.mention_flag = true;
    return a;
  });
  m.emplace_back("reply_wrong_author", [](PlannedAction a) -> std::optional<PlannedAction> {
    if (a.type != ActionType::Dm || !a.target_id) return std::nullopt;
    a.recipient = "u04";
    return a;
  });
  for (auto to : {ActionType::Post, ActionType::Com, ActionType::Dm, ActionType::Not}) {
    m.emplace_back(std::string("retype_") + std::string(socsim::to_string(to)),
                   [to](PlannedAction a) -> std::optional<PlannedAction> {
                     if (a.type == to) return std::nullopt;
                     a.type = to;
                     return a;
                   });
  }
  return m;
}

struct Mutant {
  std::size_t source = 0;
  std::string description;
  ActionPlan plan;
};

// Ten single-field mutants per valid plan, 200 in total. Two per plan change the slot list
// itself; the rest corrupt one field of one slot, rotating over slots and mutations.
inline std::vector<Mutant> mutants() {
  const auto plans = valid_plans();
  const auto muts = mutations();
  std::vector<Mutant> out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& base = plans[i];
    auto shorter = base;
    shorter.slots.pop_back();
    out.push_back({i, "drop_slot", shorter});
    auto longer = base;
    longer.slots.push_back(base.slots.front());
    out.push_back({i, "extra_slot", longer});

    std::size_t taken = 0;
    for (std::size_t k = 0; taken < 8 && k < base.slots.size() * muts.size(); ++k) {
      const std::size_t slot = (k + i) % base.slots.size();
      const std::size_t which = (k / base.slots.size() + i) % muts.size();
      auto changed = muts[which].second(base.slots[slot]);
      if (!changed) continue;
      auto plan = base;
      plan.slots[slot] = *changed;
      out.push_back({i, muts[which].first + "@" + std::to_string(slot), plan});
      ++taken;
    }
  }
  return out;
}

}  // namespace plan_corpus
