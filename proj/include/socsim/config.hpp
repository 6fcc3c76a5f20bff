#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "socsim/rewards.hpp"
#include "socsim/ties.hpp"
#include "socsim/types.hpp"

namespace socsim {

using nlohmann::json;

enum class TieMode { Heuristic, Text };
enum class PolicyKind { Scripted, Llm };

inline std::string_view to_string(TieMode m) { return m == TieMode::Text ? "text" : "heuristic"; }
inline std::string_view to_string(PolicyKind p) { return p == PolicyKind::Llm ? "llm" : "scripted"; }

// Parameters of the scripted vote model: like with probability
// sigmoid(tie * w_tie + alignment * w_align + agreeableness * w_agree + bias).
struct VoteModel {
  double tie_coef = 2.0;
  double align_coef = 1.0;
  double agree_coef = 1.0;
  double bias = -1.0;
  double dislike_alignment_below = -0.5;
  double dislike_agreeableness_below = 0.4;
};

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.7;
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_ms = 60000;
  int max_transport_retries = 4;
  int backoff_base_ms = 500;
  std::size_t prompt_char_budget = 24000;
  bool lenient = false;
  int max_in_flight = 1;
  std::string mock_corpus;  // when set, responses come from this file instead of the network
};

struct SimConfig {
  int num_agents = 30;
  int rounds = 15;
  int actions_per_round = 3;
  rewards::Params reward;
  double beta_rec = 0.9;
  double xi = 0.1;
  double delta_max = 0.2;
  std::optional<double> half_life = 5.0;
  std::optional<double> delta;
  double threshold = 0.5;
  TieMode tie_mode = TieMode::Heuristic;
  bool coach_enabled = false;
  PolicyKind policy = PolicyKind::Scripted;
  std::uint64_t rng_seed = 42;
  ties::EvidenceWeights evidence_weights{0.25, 0.25, 0.25, 0.25};
  ties::ReciprocityTiming reciprocity_timing = ties::ReciprocityTiming::PostUpdate;
  std::string personas_path = "personas.json";
  VoteModel vote;
  LlmConfig llm;

  double decay() const { return delta ? *delta : ties::half_life_to_delta(*half_life); }

  ties::UpdateParams update_params() const { return {xi, delta_max, decay()}; }

  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw ConfigError(field + ": " + why);
    };
    auto unit = [&](double x, const std::string& field) {
      if (!(x >= 0.0 && x <= 1.0)) fail(field, "must lie in [0, 1]");
    };
    if (num_agents < 2) fail("num_agents", "must be an integer >= 2");
    if (rounds < 1) fail("rounds", "must be a positive integer");
    if (actions_per_round < 1) fail("actions_per_round", "must be a positive integer");
    unit(reward.beta_soc, "beta.soc");
    unit(reward.beta_inf, "beta.inf");
    unit(reward.beta_pre, "beta.pre");
    unit(reward.beta_coord, "beta.coord");
    if (!std::isfinite(reward.beta_emo)) fail("beta.emo", "must be a finite real");
    if (!(reward.epsilon > 0.0)) fail("epsilon", "must be positive");
    if (!(beta_rec > 0.0 && beta_rec < 1.0)) fail("beta_rec", "must lie in (0, 1)");
    if (!(xi >= 0.0 && xi < 1.0)) fail("xi", "must lie in [0, 1)");
    if (!(delta_max >= 0.0)) fail("delta_max", "must be non-negative");
    if (half_life.has_value() == delta.has_value())
      fail("half_life/delta", "exactly one of the two must be given");
    if (half_life && !(*half_life > 0.0)) fail("half_life", "must be positive");
    if (delta && !(*delta >= 0.0 && *delta < 1.0)) fail("delta", "must lie in [0, 1)");
    unit(threshold, "threshold");
    try {
      ties::validate_evidence_weights(evidence_weights);
    } catch (const ConfigError& e) {
      fail("evidence_weights", e.what());
    }
    if (llm.max_in_flight < 1) fail("llm.max_in_flight", "must be >= 1");
    if (llm.max_transport_retries < 0) fail("llm.max_transport_retries", "must be >= 0");
    if (llm.timeout_ms < 1) fail("llm.timeout_ms", "must be >= 1");
  }
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + key + ": unknown field");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where = "") {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + key + ": wrong type");
  }
}

}  // namespace detail

inline SimConfig config_from_json(const json& j) {
  using detail::read;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown(j,
                         {"schema_version", "num_agents", "rounds", "actions_per_round", "beta",
                          "beta_rec", "epsilon", "xi", "delta_max", "half_life", "delta",
                          "threshold", "tie_mode", "coach_enabled", "policy", "rng_seed",
                          "evidence_weights", "reciprocity_timing", "personas", "vote", "llm"},
                         "");
  if (j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
    throw ConfigError("schema_version: unsupported version");

  SimConfig c;
  read(j, "num_agents", c.num_agents);
  read(j, "rounds", c.rounds);
  read(j, "actions_per_round", c.actions_per_round);
  if (j.contains("beta")) {
    const auto& b = j["beta"];
    if (!b.is_object()) throw ConfigError("beta: must be an object");
    detail::reject_unknown(b, {"soc", "inf", "pre", "coord", "emo"}, "beta.");
    read(b, "soc", c.reward.beta_soc, "beta.");
    read(b, "inf", c.reward.beta_inf, "beta.");
    read(b, "pre", c.reward.beta_pre, "beta.");
    read(b, "coord", c.reward.beta_coord, "beta.");
    read(b, "emo", c.reward.beta_emo, "beta.");
  }
  read(j, "beta_rec", c.beta_rec);
  read(j, "epsilon", c.reward.epsilon);
  read(j, "xi", c.xi);
  read(j, "delta_max", c.delta_max);
  if (j.contains("half_life") || j.contains("delta")) {
    c.half_life.reset();
    if (j.contains("half_life")) {
      double h = 0.0;
      read(j, "half_life", h);
      c.half_life = h;
    }
    if (j.contains("delta")) {
      double d = 0.0;
      read(j, "delta", d);
      c.delta = d;
    }
  }
  read(j, "threshold", c.threshold);
  if (j.contains("tie_mode")) {
    std::string m;
    read(j, "tie_mode", m);
    if (m == "heuristic")
      c.tie_mode = TieMode::Heuristic;
    else if (m == "text")
      c.tie_mode = TieMode::Text;
    else
      throw ConfigError("tie_mode: must be 'heuristic' or 'text'");
  }
  read(j, "coach_enabled", c.coach_enabled);
  if (j.contains("policy")) {
    std::string p;
    read(j, "policy", p);
    if (p == "scripted")
      c.policy = PolicyKind::Scripted;
    else if (p == "llm")
      c.policy = PolicyKind::Llm;
    else
      throw ConfigError("policy: must be 'scripted' or 'llm'");
  }
  read(j, "rng_seed", c.rng_seed);
  if (j.contains("evidence_weights")) {
    std::vector<double> w;
    read(j, "evidence_weights", w);
    if (w.size() != 4) throw ConfigError("evidence_weights: must hold exactly 4 values");
    std::copy(w.begin(), w.end(), c.evidence_weights.begin());
  }
  if (j.contains("reciprocity_timing")) {
    std::string t;
    read(j, "reciprocity_timing", t);
    if (t == "post")
      c.reciprocity_timing = ties::ReciprocityTiming::PostUpdate;
    else if (t == "pre")
      c.reciprocity_timing = ties::ReciprocityTiming::PreUpdate;
    else
      throw ConfigError("reciprocity_timing: must be 'post' or 'pre'");
  }
  read(j, "personas", c.personas_path);
  if (j.contains("vote")) {
    const auto& v = j["vote"];
    detail::reject_unknown(v,
                           {"tie_coef", "align_coef", "agree_coef", "bias",
                            "dislike_alignment_below", "dislike_agreeableness_below"},
                           "vote.");
    read(v, "tie_coef", c.vote.tie_coef, "vote.");
    read(v, "align_coef", c.vote.align_coef, "vote.");
    read(v, "agree_coef", c.vote.agree_coef, "vote.");
    read(v, "bias", c.vote.bias, "vote.");
    read(v, "dislike_alignment_below", c.vote.dislike_alignment_below, "vote.");
    read(v, "dislike_agreeableness_below", c.vote.dislike_agreeableness_below, "vote.");
  }
  if (j.contains("llm")) {
    const auto& l = j["llm"];
    detail::reject_unknown(l,
                           {"endpoint", "model", "temperature", "api_key_env", "timeout_ms",
                            "max_transport_retries", "backoff_base_ms", "prompt_char_budget",
                            "lenient", "max_in_flight", "mock_corpus"},
                           "llm.");
    read(l, "endpoint", c.llm.endpoint, "llm.");
    read(l, "model", c.llm.model, "llm.");
    read(l, "temperature", c.llm.temperature, "llm.");
    read(l, "api_key_env", c.llm.api_key_env, "llm.");
    read(l, "timeout_ms", c.llm.timeout_ms, "llm.");
    read(l, "max_transport_retries", c.llm.max_transport_retries, "llm.");
    read(l, "backoff_base_ms", c.llm.backoff_base_ms, "llm.");
    read(l, "prompt_char_budget", c.llm.prompt_char_budget, "llm.");
    read(l, "lenient", c.llm.lenient, "llm.");
    read(l, "max_in_flight", c.llm.max_in_flight, "llm.");
    read(l, "mock_corpus", c.llm.mock_corpus, "llm.");
  }
  c.validate();
  return c;
}

inline json config_to_json(const SimConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["num_agents"] = c.num_agents;
  j["rounds"] = c.rounds;
  j["actions_per_round"] = c.actions_per_round;
  j["beta"] = {{"soc", c.reward.beta_soc},
               {"inf", c.reward.beta_inf},
               {"pre", c.reward.beta_pre},
               {"coord", c.reward.beta_coord},
               {"emo", c.reward.beta_emo}};
  j["beta_rec"] = c.beta_rec;
  j["epsilon"] = c.reward.epsilon;
  j["xi"] = c.xi;
  j["delta_max"] = c.delta_max;
  if (c.half_life) j["half_life"] = *c.half_life;
  if (c.delta) j["delta"] = *c.delta;
  j["threshold"] = c.threshold;
  j["tie_mode"] = std::string(to_string(c.tie_mode));
  j["coach_enabled"] = c.coach_enabled;
  j["policy"] = std::string(to_string(c.policy));
  j["rng_seed"] = c.rng_seed;
  j["evidence_weights"] = c.evidence_weights;
  j["reciprocity_timing"] =
      c.reciprocity_timing == ties::ReciprocityTiming::PostUpdate ? "post" : "pre";
  j["personas"] = c.personas_path;
  j["vote"] = {{"tie_coef", c.vote.tie_coef},
               {"align_coef", c.vote.align_coef},
               {"agree_coef", c.vote.agree_coef},
               {"bias", c.vote.bias},
               {"dislike_alignment_below", c.vote.dislike_alignment_below},
               {"dislike_agreeableness_below", c.vote.dislike_agreeableness_below}};
  j["llm"] = {{"endpoint", c.llm.endpoint},
              {"model", c.llm.model},
              {"temperature", c.llm.temperature},
              {"api_key_env", c.llm.api_key_env},
              {"timeout_ms", c.llm.timeout_ms},
              {"max_transport_retries", c.llm.max_transport_retries},
              {"backoff_base_ms", c.llm.backoff_base_ms},
              {"prompt_char_budget", c.llm.prompt_char_budget},
              {"lenient", c.llm.lenient},
              {"max_in_flight", c.llm.max_in_flight},
              {"mock_corpus", c.llm.mock_corpus}};
  return j;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads a config file; a relative personas path is resolved against the config directory.
inline SimConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const ArtifactError&) {
    throw ConfigError("config: cannot read " + path.string());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  SimConfig c = config_from_json(j);
  const auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(c.personas_path);
  resolve(c.llm.mock_corpus);
  return c;
}

// 64-bit FNV-1a; identifies config files and derives run ids.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

}  // namespace socsim
