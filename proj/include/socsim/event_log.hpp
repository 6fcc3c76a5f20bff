#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "socsim/config.hpp"
#include "socsim/types.hpp"

namespace socsim {

using nlohmann::json;

struct Event {
  std::string run_id;
  int round = 0;
  std::string kind;
  json payload;
};

inline json to_json(const Event& e) {
  return {{"run_id", e.run_id},
          {"round", e.round},
          {"kind", e.kind},
          {"payload", e.payload},
          {"schema_version", kSchemaVersion}};
}

inline Event event_from_json(const json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion)
    throw ArtifactError("event log: unsupported schema_version");
  return {j.at("run_id").get<std::string>(), j.at("round").get<int>(), j.at("kind").get<std::string>(),
          j.at("payload")};
}

// Append-only JSONL writer. Keeps an optional in-memory copy for tests.
class EventLog {
 public:
  EventLog(std::string run_id, const std::filesystem::path& path, bool append = false)
      : run_id_(std::move(run_id)) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
    if (!out_) throw ArtifactError("cannot open event log " + path.string());
  }
  explicit EventLog(std::string run_id) : run_id_(std::move(run_id)) {}

  void emit(int round, const std::string& kind, json payload) {
    const std::string line = to_json(Event{run_id_, round, kind, std::move(payload)}).dump();
    if (out_.is_open()) {
      out_ << line << '\n';
      if (!out_) throw ArtifactError("event log write failed");
    }
    lines_.push_back(line);
  }

  void flush() {
    if (out_.is_open()) out_.flush();
  }

  const std::string& run_id() const { return run_id_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::string run_id_;
  std::ofstream out_;
  std::vector<std::string> lines_;
};

inline std::vector<Event> read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("missing event log: " + path.string());
  std::vector<Event> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ArtifactError(path.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// Drops events after `last_round` so a resumed run continues from a clean prefix.
inline void truncate_events(const std::filesystem::path& path, int last_round) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("missing event log: " + path.string());
  std::string kept, line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (json::parse(line).at("round").get<int>() > last_round) break;
    kept += line + '\n';
  }
  in.close();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << kept;
}

}  // namespace socsim
