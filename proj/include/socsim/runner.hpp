#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "socsim/config.hpp"
#include "socsim/engine.hpp"
#include "socsim/event_log.hpp"
#include "socsim/llm/gateway.hpp"
#include "socsim/llm/transport.hpp"
#include "socsim/serialize.hpp"

namespace socsim::runner {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kHeader = "#schema_version=1\n";

struct RunManifest {
  std::string run_id;
  json config;
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::string status;  // running | complete
  fs::path dir;
  std::map<std::string, std::string> artifacts;
};

inline json to_json(const RunManifest& m) {
  return {{"schema_version", kSchemaVersion}, {"run_id", m.run_id},          {"config", m.config},
          {"config_hash", m.config_hash},     {"seed", m.config.value("rng_seed", 0ULL)},
          {"started_at", m.started_at},       {"finished_at", m.finished_at}, {"status", m.status},
          {"artifacts", m.artifacts}};
}

inline RunManifest load_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  if (!fs::exists(path)) throw ArtifactError("missing run manifest: " + path.string());
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ArtifactError(path.string() + ": " + e.what());
  }
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw ArtifactError(path.string() + ": unsupported schema_version " +
                        std::to_string(j.value("schema_version", 0)));
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.config = j.at("config");
  m.config_hash = j.at("config_hash").get<std::string>();
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  m.status = j.value("status", "");
  m.dir = dir;
  m.artifacts = j.value("artifacts", std::map<std::string, std::string>{});
  return m;
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string hash_file(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return "";
  return hex64(fnv1a(read_text_file(path)));
}

// Run ids depend only on the resolved configuration and the contents (not locations) of the
// files it references.
inline std::string run_id_for(const SimConfig& cfg) {
  json j = config_to_json(cfg);
  j["personas"] = hash_file(cfg.personas_path);
  if (j.contains("llm")) j["llm"]["mock_corpus"] = hash_file(cfg.llm.mock_corpus);
  return "run-" + hex64(fnv1a(j.dump())).substr(0, 12);
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string rewards_csv(const SimState& s) {
  std::string out = std::string(kHeader) + "round,user,soc,inf,pre,coord,emo,total\n";
  for (int t = 1; t <= s.round; ++t)
    for (const auto& u : s.roster.users()) {
      const auto& r = s.rewards.at(u).at(t - 1);
      out += std::to_string(r.round) + "," + u;
      for (double x : r.components) out += "," + fmt(x);
      out += "," + fmt(r.total) + "\n";
    }
  return out;
}

inline std::string edge_list_tsv(const Roster& roster, const Matrix& w) {
  std::string out = std::string(kHeader) + "src\tdst\tweight\n";
  for (std::size_t v = 0; v < roster.size(); ++v)
    for (std::size_t u = 0; u < roster.size(); ++u)
      if (w(u, v) > 0.0) out += roster[v] + "\t" + roster[u] + "\t" + fmt(w(u, v)) + "\n";
  return out;
}

// Dense matrix; row u, column v holds the tie from v to u.
inline std::string matrix_tsv(const Roster& roster, const Matrix& w) {
  std::ostringstream out;
  out << kHeader << "user";
  for (const auto& u : roster.users()) out << '\t' << u;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < roster.size(); ++r) {
    out << roster[r];
    for (std::size_t c = 0; c < roster.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", w(r, c));
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

inline std::pair<Roster, Matrix> read_matrix_tsv(const fs::path& path) {
  if (!fs::exists(path)) throw ArtifactError("missing tie matrix: " + path.string());
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  if (!std::getline(in, line) || line + "\n" != kHeader)
    throw ArtifactError(path.string() + ": missing or unsupported schema_version");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, '\t');) cells.push_back(cell);
    if (header.empty()) {
      header.assign(cells.begin() + 1, cells.end());
      continue;
    }
    if (cells.size() != header.size() + 1) throw ArtifactError(path.string() + ": ragged row");
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(std::stod(cells[i]));
    rows.push_back(row);
  }
  if (rows.size() != header.size()) throw ArtifactError(path.string() + ": matrix is not square");
  Roster roster(header);
  Matrix m(header.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  return {roster, m};
}

using TransportFactory = std::function<std::shared_ptr<llm::Transport>(const LlmConfig&)>;

struct RunOptions {
  fs::path out_root = "runs";
  bool force = false;
  TransportFactory transport;  // used when the mock corpus is not configured
  llm::Gateway::Sleeper sleeper;
  std::function<void(int)> on_round;
};

namespace detail {

inline bool needs_gateway(const SimConfig& c) {
  return c.policy == PolicyKind::Llm || c.tie_mode == TieMode::Text;
}

inline std::unique_ptr<llm::Gateway> make_gateway(const SimConfig& cfg, const RunOptions& opt) {
  if (!needs_gateway(cfg)) return nullptr;
  std::shared_ptr<llm::Transport> transport;
  if (!cfg.llm.mock_corpus.empty())
    transport = llm::CorpusTransport::from_file(cfg.llm.mock_corpus);
  else if (opt.transport)
    transport = opt.transport(cfg.llm);
  else
    throw ConfigError("llm: no transport available (set llm.mock_corpus or build with HTTP support)");
  if (opt.sleeper) return std::make_unique<llm::Gateway>(cfg.llm, transport, opt.sleeper);
  return std::make_unique<llm::Gateway>(cfg.llm, transport);
}

inline void write_manifest(const RunManifest& m) {
  write_text_file(m.dir / "manifest.json", to_json(m).dump(2) + "\n");
}

inline void write_checkpoint(const SimState& s, const fs::path& dir) {
  const auto tmp = dir / "checkpoint.json.tmp";
  write_text_file(tmp, state_to_json(s).dump() + "\n");
  fs::rename(tmp, dir / "checkpoint.json");
}

inline std::string round_file(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ties/round_%03d.tsv", t);
  return buf;
}

inline RunManifest drive(SimState& s, RunManifest m, EventLog& log, const RunOptions& opt) {
  auto gateway = make_gateway(s.config, opt);
  EngineDeps deps{&log, gateway.get()};
  for (int t = s.round + 1; t <= s.config.rounds; ++t) {
    run_round(s, t, deps);
    write_text_file(m.dir / round_file(t), edge_list_tsv(s.roster, s.ties.weights));
    write_text_file(m.dir / "rewards.csv", rewards_csv(s));
    write_checkpoint(s, m.dir);
    if (opt.on_round) opt.on_round(t);
  }
  write_text_file(m.dir / "ties/final_matrix.tsv", matrix_tsv(s.roster, s.ties.weights));
  m.status = "complete";
  m.finished_at = utc_now();
  m.artifacts = {{"events", "events.jsonl"},
                 {"rewards", "rewards.csv"},
                 {"final_matrix", "ties/final_matrix.tsv"},
                 {"round_edges", "ties/round_NNN.tsv"},
                 {"personas", "personas.json"},
                 {"checkpoint", "checkpoint.json"}};
  write_manifest(m);
  return m;
}

}  // namespace detail

// Runs a configuration to completion. `config_text` is the raw config file for hashing.
inline RunManifest simulate(const SimConfig& cfg, const std::string& config_text, const RunOptions& opt) {
  cfg.validate();
  auto personas = load_personas(cfg.personas_path);
  RunManifest m;
  m.run_id = run_id_for(cfg);
  m.config = config_to_json(cfg);
  m.config_hash = hex64(fnv1a(config_text));
  m.dir = opt.out_root / m.run_id;
  m.status = "running";
  m.started_at = utc_now();

  if (fs::exists(m.dir / "manifest.json") && !opt.force)
    throw ArtifactError("run directory " + m.dir.string() +
                        " already exists; pass --force to overwrite or --resume to continue");
  auto state = init_state(cfg, personas, m.run_id);
  fs::remove_all(m.dir);
  fs::create_directories(m.dir / "ties");
  write_text_file(m.dir / "personas.json", personas_to_json(state.personas).dump(2) + "\n");
  detail::write_manifest(m);
  detail::write_checkpoint(state, m.dir);
  EventLog log(m.run_id, m.dir / "events.jsonl");
  return detail::drive(state, m, log, opt);
}

// Continues an interrupted run from its last checkpoint.
inline RunManifest resume(const fs::path& dir, const RunOptions& opt) {
  auto m = load_manifest(dir);
  m.dir = dir;
  const auto cp = dir / "checkpoint.json";
  if (!fs::exists(cp)) throw ArtifactError("missing checkpoint: " + cp.string());
  json j;
  try {
    j = json::parse(read_text_file(cp));
  } catch (const json::exception& e) {
    throw ArtifactError(cp.string() + ": " + e.what());
  }
  auto state = state_from_json(j);
  truncate_events(dir / "events.jsonl", state.round);
  EventLog log(m.run_id, dir / "events.jsonl", true);
  return detail::drive(state, m, log, opt);
}

}  // namespace socsim::runner
