#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "socsim/config.hpp"
#include "socsim/matrix.hpp"
#include "socsim/types.hpp"

namespace socsim {

using nlohmann::json;

inline json to_json(const Action& a) {
  json j{{"id", a.id},
         {"round", a.round},
         {"type", std::string(to_string(a.type))},
         {"sender", a.sender},
         {"tone", std::string(to_string(a.tone))},
         {"content", a.content},
         {"sentiment", a.sentiment},
         {"mentions", a.mentions}};
  j["recipient"] = a.recipient ? json(*a.recipient) : json(nullptr);
  j["target_id"] = a.target_id ? json(*a.target_id) : json(nullptr);
  j["target_author"] = a.target_author ? json(*a.target_author) : json(nullptr);
  j["topic"] = a.topic ? json(*a.topic) : json(nullptr);
  return j;
}

inline Action action_from_json(const json& j) {
  Action a;
  a.id = j.at("id").get<ActionId>();
  a.round = j.at("round").get<int>();
  auto type = parse_action_type(j.at("type").get<std::string>());
  auto tone = parse_tone(j.at("tone").get<std::string>());
  if (!type || !tone) throw ParseError("bad action type or tone in record");
  a.type = *type;
  a.tone = *tone;
  a.sender = j.at("sender").get<std::string>();
  a.content = j.at("content").get<std::string>();
  a.sentiment = j.at("sentiment").get<double>();
  a.mentions = j.at("mentions").get<std::set<UserId>>();
  if (!j.at("recipient").is_null()) a.recipient = j["recipient"].get<std::string>();
  if (!j.at("target_id").is_null()) a.target_id = j["target_id"].get<ActionId>();
  if (!j.at("target_author").is_null()) a.target_author = j["target_author"].get<std::string>();
  if (!j.at("topic").is_null()) a.topic = j["topic"].get<std::string>();
  return a;
}

inline json to_json(const Vote& v) {
  return {{"voter", v.voter}, {"content_id", v.content_id}, {"author", v.author},
          {"value", v.value}, {"round", v.round}};
}

inline Vote vote_from_json(const json& j) {
  Vote v;
  v.voter = j.at("voter").get<std::string>();
  v.content_id = j.at("content_id").get<ActionId>();
  v.author = j.at("author").get<std::string>();
  v.value = j.at("value").get<int>();
  v.round = j.at("round").get<int>();
  return v;
}

inline json to_json(const RewardVector& r) {
  json j{{"user", r.user}, {"round", r.round}, {"total", r.total}};
  for (auto c : kRewardComponents) {
    std::string key(to_string(c));
    for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    j[key] = r[c];
  }
  return j;
}

inline RewardVector reward_from_json(const json& j) {
  RewardVector r;
  r.user = j.at("user").get<std::string>();
  r.round = j.at("round").get<int>();
  r.total = j.at("total").get<double>();
  r[RewardComponent::Soc] = j.at("soc").get<double>();
  r[RewardComponent::Inf] = j.at("inf").get<double>();
  r[RewardComponent::Pre] = j.at("pre").get<double>();
  r[RewardComponent::Coord] = j.at("coord").get<double>();
  r[RewardComponent::Emo] = j.at("emo").get<double>();
  return r;
}

inline json to_json(const RewardWeights& w) {
  json j = json::object();
  for (auto c : kRewardComponents) j[std::string(to_string(c))] = w[c];
  return j;
}

inline RewardWeights weights_from_json(const json& j) {
  RewardWeights w;
  w.values.fill(0.0);
  for (const auto& [key, value] : j.items()) {
    auto c = parse_reward_component(key);
    if (!c) throw ConfigError("reward_weights: unknown component " + key);
    w[*c] = value.get<double>();
  }
  return w;
}

inline json to_json(const MemoryStores& m) {
  json conv = json::array();
  for (const auto& e : m.conversation)
    conv.push_back({{"round", e.round}, {"action", e.action}, {"role", std::string(to_string(e.role))}});
  json rel = json::object();
  for (const auto& [peer, r] : m.relationship)
    rel[peer] = {{"last_round", r.last_round},         {"sent", r.sent},
                 {"received", r.received},             {"likes_given_ema", r.likes_given_ema},
                 {"likes_received_ema", r.likes_received_ema}, {"note", r.note}};
  json op = json::object();
  for (const auto& [topic, o] : m.opinion) op[topic] = {{"text", o.text}, {"strength", o.strength}};
  return {{"conversation", conv}, {"relationship", rel}, {"opinion", op}};
}

inline MemoryStores memory_from_json(const json& j) {
  MemoryStores m;
  for (const auto& e : j.at("conversation")) {
    const auto role = e.at("role").get<std::string>();
    ConversationRole r = role == "sent"       ? ConversationRole::Sent
                         : role == "received" ? ConversationRole::Received
                                              : ConversationRole::Saw;
    m.conversation.push_back({e.at("round").get<int>(), e.at("action").get<ActionId>(), r});
  }
  for (const auto& [peer, r] : j.at("relationship").items()) {
    RelationshipEntry e;
    e.last_round = r.at("last_round").get<int>();
    e.sent = r.at("sent").get<int>();
    e.received = r.at("received").get<int>();
    e.likes_given_ema = r.at("likes_given_ema").get<double>();
    e.likes_received_ema = r.at("likes_received_ema").get<double>();
    e.note = r.at("note").get<std::string>();
    m.relationship[peer] = e;
  }
  for (const auto& [topic, o] : j.at("opinion").items())
    m.opinion[topic] = {o.at("text").get<std::string>(), o.at("strength").get<double>()};
  return m;
}

// --- personas -------------------------------------------------------------

inline json to_json(const Persona& p) {
  return {{"user", p.user},
          {"name", p.name},
          {"role", p.role},
          {"description", p.description},
          {"stance", p.stance},
          {"stance_position", p.stance_position},
          {"comm_style", p.comm_style},
          {"big_five",
           {{"openness", p.big_five.openness},
            {"conscientiousness", p.big_five.conscientiousness},
            {"extraversion", p.big_five.extraversion},
            {"agreeableness", p.big_five.agreeableness},
            {"neuroticism", p.big_five.neuroticism}}},
          {"reward_weights", to_json(p.reward_weights)}};
}

// Parses and validates one persona record; throws ConfigError naming the bad field.
inline Persona persona_from_json(const json& j) {
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw ConfigError(std::string("persona: missing field ") + key);
    return j.at(key);
  };
  auto text = [&](const char* key) {
    const auto& v = field(key);
    if (!v.is_string() || v.get<std::string>().empty())
      throw ConfigError(std::string("persona.") + key + ": must be a non-empty string");
    return v.get<std::string>();
  };
  auto unit = [](const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("persona." + name + ": must be a number");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("persona." + name + ": must lie in [0, 1]");
    return x;
  };
  Persona p;
  p.user = text("user");
  p.name = text("name");
  p.role = text("role");
  p.description = text("description");
  p.stance = text("stance");
  p.comm_style = text("comm_style");
  if (j.contains("stance_position")) {
    p.stance_position = j["stance_position"].get<double>();
    if (!(p.stance_position >= -1.0 && p.stance_position <= 1.0))
      throw ConfigError("persona.stance_position: must lie in [-1, 1]");
  }
  const auto& b = field("big_five");
  for (const char* k : {"openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism"})
    if (!b.contains(k)) throw ConfigError(std::string("persona.big_five: missing ") + k);
  p.big_five.openness = unit(b["openness"], "big_five.openness");
  p.big_five.conscientiousness = unit(b["conscientiousness"], "big_five.conscientiousness");
  p.big_five.extraversion = unit(b["extraversion"], "big_five.extraversion");
  p.big_five.agreeableness = unit(b["agreeableness"], "big_five.agreeableness");
  p.big_five.neuroticism = unit(b["neuroticism"], "big_five.neuroticism");
  p.reward_weights = weights_from_json(field("reward_weights"));
  try {
    p.reward_weights.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("persona.reward_weights: ") + e.what());
  }
  return p;
}

inline std::vector<Persona> personas_from_json(const json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion || !j.contains("personas"))
    throw ConfigError("persona file: expected {schema_version: 1, personas: [...]}");
  std::vector<Persona> out;
  for (const auto& rec : j["personas"]) out.push_back(persona_from_json(rec));
  return out;
}

inline std::vector<Persona> load_personas(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("persona file " + path.string() + ": " + e.what());
  } catch (const ArtifactError&) {
    throw ConfigError("persona file: cannot read " + path.string());
  }
  return personas_from_json(j);
}

inline json personas_to_json(const std::vector<Persona>& ps) {
  json arr = json::array();
  for (const auto& p : ps) arr.push_back(to_json(p));
  return {{"schema_version", kSchemaVersion}, {"personas", arr}};
}

// --- matrices ---------------------------------------------------------------

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const json& rows) {
  Matrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw ParseError("matrix is not square");
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << text;
}

}  // namespace socsim
