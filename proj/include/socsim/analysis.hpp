#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "socsim/communities.hpp"
#include "socsim/metrics.hpp"
#include "socsim/runner.hpp"
#include "socsim/serialize.hpp"
#include "socsim/ties.hpp"

namespace socsim::analysis {

namespace fs = std::filesystem;

struct MetricsRow {
  double theta = 0.0;
  int edges = 0;
  double density = 0.0;
  double clustering = 0.0;        // global
  double mean_local_clustering = 0.0;
  double lcc = 0.0;
  std::optional<double> aspl;
  std::optional<double> modularity;  // of detected communities
  int communities = 0;
  std::optional<double> homophily;
  std::optional<double> power_law_alpha;
};

inline constexpr const char* kMetricColumns =
    "theta,edges,density,clustering,mean_local_clustering,lcc,aspl,modularity,communities,homophily,"
    "power_law_alpha";

inline std::vector<double> default_thetas() {
  std::vector<double> out;
  for (int i = 1; i <= 9; ++i) out.push_back(i / 10.0);
  return out;
}

inline std::vector<double> parse_thetas(const std::string& list) {
  std::vector<double> out;
  std::istringstream in(list);
  for (std::string cell; std::getline(in, cell, ',');) {
    if (cell.empty()) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw ConfigError("thresholds: '" + cell + "' is not a number");
    }
    if (used != cell.size()) throw ConfigError("thresholds: '" + cell + "' is not a number");
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("thresholds: empty list");
  return out;
}

// Groups nodes by a string key (e.g. stance) into integer labels.
inline metrics::Partition group_by(const std::vector<std::string>& keys) {
  std::map<std::string, int> ids;
  metrics::Partition out;
  for (const auto& k : keys) out.push_back(ids.emplace(k, static_cast<int>(ids.size())).first->second);
  return out;
}

inline MetricsRow metrics_at(const Matrix& ties, double theta, const metrics::Partition& groups) {
  const Matrix g = ties::binarize(ties::symmetrize(ties), theta);
  MetricsRow row;
  row.theta = theta;
  row.edges = static_cast<int>(ties::undirected_edge_count(g));
  row.density = metrics::density(g, metrics::Variant::Undirected);
  const auto c = metrics::clustering(g, metrics::Variant::Undirected);
  row.clustering = c.global;
  for (double x : c.local) row.mean_local_clustering += x;
  if (!c.local.empty()) row.mean_local_clustering /= static_cast<double>(c.local.size());
  row.lcc = metrics::lcc(g);
  row.aspl = metrics::aspl(g);
  if (row.edges > 0) {
    const auto comm = metrics::detect_communities(g);
    row.modularity = comm.modularity;
    row.communities = *std::max_element(comm.labels.begin(), comm.labels.end());
    try {
      row.homophily = metrics::homophily(g, groups);
    } catch (const DomainError&) {
    }
  } else {
    row.communities = static_cast<int>(g.size());
  }
  std::vector<int> sample;
  for (int k : metrics::degrees(g, metrics::DegreeDirection::Undirected))
    if (k >= 1) sample.push_back(k);
  try {
    row.power_law_alpha = metrics::fit_power_law(sample, 1);
  } catch (const DomainError&) {
  }
  return row;
}

inline std::string cell(const std::optional<double>& x) { return x ? runner::fmt(*x) : "NA"; }

inline std::string to_csv_line(const MetricsRow& r) {
  return runner::fmt(r.theta) + "," + std::to_string(r.edges) + "," + runner::fmt(r.density) + "," +
         runner::fmt(r.clustering) + "," + runner::fmt(r.mean_local_clustering) + "," +
         runner::fmt(r.lcc) + "," + cell(r.aspl) + "," + cell(r.modularity) + "," +
         std::to_string(r.communities) + "," + cell(r.homophily) + "," + cell(r.power_law_alpha);
}

inline std::string theta_tag(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", theta);
  return buf;
}

// Threshold sweep over a persisted run; writes analysis/metrics.csv and per-threshold degree
// histograms. Never touches the run's own artifacts.
inline std::vector<MetricsRow> analyze(const fs::path& run_dir, std::vector<double> thetas) {
  for (double th : thetas)
    if (!(th >= 0.0 && th <= 1.0)) throw ConfigError("thresholds: " + runner::fmt(th) + " outside [0, 1]");
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  runner::load_manifest(run_dir);
  const auto [roster, ties] = runner::read_matrix_tsv(run_dir / "ties/final_matrix.tsv");
  const auto personas_path = run_dir / "personas.json";
  if (!fs::exists(personas_path)) throw ArtifactError("missing personas: " + personas_path.string());
  std::map<UserId, std::string> stance;
  for (const auto& p : load_personas(personas_path)) stance[p.user] = p.stance;
  std::vector<std::string> keys;
  for (const auto& u : roster.users()) keys.push_back(stance.count(u) ? stance[u] : "");
  const auto groups = group_by(keys);

  std::vector<MetricsRow> rows;
  std::string csv = std::string(runner::kHeader) + kMetricColumns + "\n";
  for (double th : thetas) {
    rows.push_back(metrics_at(ties, th, groups));
    if (rows.size() > 1 && rows.back().edges > rows[rows.size() - 2].edges)
      throw CorruptionError("edge count increased between thresholds " +
                            runner::fmt(rows[rows.size() - 2].theta) + " and " + runner::fmt(th));
    csv += to_csv_line(rows.back()) + "\n";

    const Matrix g = ties::binarize(ties::symmetrize(ties), th);
    const auto dist = metrics::degree_distribution(g, metrics::DegreeDirection::Undirected);
    std::string hist = std::string(runner::kHeader) + "degree,count,fraction,ccdf\n";
    double tail = 1.0;
    for (const auto& [k, mass] : dist) {
      hist += std::to_string(k) + "," + std::to_string(static_cast<long>(std::lround(mass * g.size()))) +
              "," + runner::fmt(mass) + "," + runner::fmt(std::max(0.0, tail)) + "\n";
      tail -= mass;
    }
    write_text_file(run_dir / "analysis" / ("degree_theta_" + theta_tag(th) + ".csv"), hist);
  }
  write_text_file(run_dir / "analysis/metrics.csv", csv);
  return rows;
}

// --- report ---------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ArtifactError("missing column " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
};

inline Table read_csv(const fs::path& path) {
  if (!fs::exists(path)) throw ArtifactError("missing artifact: " + path.string());
  std::istringstream in(read_text_file(path));
  Table t;
  bool versioned = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line != "#schema_version=1") throw ArtifactError(path.string() + ": unsupported " + line.substr(1));
      versioned = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (t.columns.empty())
      t.columns = cells;
    else
      t.rows.push_back(cells);
  }
  if (!versioned) throw ArtifactError(path.string() + ": missing schema_version");
  return t;
}

struct Band {
  double min = 0.0, mean = 0.0, max = 0.0;
  int n = 0;
};

inline Band band(const std::vector<double>& xs) {
  Band b;
  b.n = static_cast<int>(xs.size());
  if (xs.empty()) return b;
  b.min = *std::min_element(xs.begin(), xs.end());
  b.max = *std::max_element(xs.begin(), xs.end());
  for (double x : xs) b.mean += x;
  b.mean /= static_cast<double>(xs.size());
  return b;
}

inline std::string band_cells(const Band& b) {
  return runner::fmt(b.min) + "," + runner::fmt(b.mean) + "," + runner::fmt(b.max) + "," + std::to_string(b.n);
}

inline constexpr std::array<const char*, 6> kRewardColumns = {"soc", "inf", "pre", "coord", "emo", "total"};

// Long-format plot bundles across runs: reward by policy, metric by threshold, degree CCDFs.
inline void report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
  if (run_dirs.empty()) throw ConfigError("report: at least one run is required");

  // policy -> round -> column -> one value per run (mean over that policy's agents)
  std::map<std::string, std::map<int, std::map<std::string, std::vector<double>>>> rewards;
  std::map<std::string, std::map<double, std::vector<double>>> metric_values;
  std::string ccdf = std::string(runner::kHeader) + "run_id,theta,degree,ccdf\n";

  for (const auto& dir : run_dirs) {
    const auto manifest = runner::load_manifest(dir);
    const auto personas_path = dir / "personas.json";
    if (!fs::exists(personas_path)) throw ArtifactError("missing personas: " + personas_path.string());
    std::map<UserId, std::string> policy;
    for (const auto& p : load_personas(personas_path))
      policy[p.user] = std::string(to_string(p.reward_weights.dominant()));

    const auto table = read_csv(dir / "rewards.csv");
    std::map<std::string, std::map<int, std::map<std::string, std::pair<double, int>>>> sums;
    for (const auto& row : table.rows) {
      const int round = std::stoi(row.at(table.col("round")));
      const auto& pol = policy.at(row.at(table.col("user")));
      for (const char* c : kRewardColumns) {
        auto& acc = sums[pol][round][c];
        acc.first += std::stod(row.at(table.col(c)));
        ++acc.second;
      }
    }
    for (const auto& [pol, by_round] : sums)
      for (const auto& [round, by_col] : by_round)
        for (const auto& [col, acc] : by_col) rewards[pol][round][col].push_back(acc.first / acc.second);

    const auto metrics_table = read_csv(dir / "analysis/metrics.csv");
    for (const auto& row : metrics_table.rows) {
      const double theta = std::stod(row.at(metrics_table.col("theta")));
      for (std::size_t i = 1; i < metrics_table.columns.size(); ++i) {
        if (row.at(i) == "NA") continue;
        metric_values[metrics_table.columns[i]][theta].push_back(std::stod(row.at(i)));
      }
      const auto hist = read_csv(dir / "analysis" / ("degree_theta_" + theta_tag(theta) + ".csv"));
      for (const auto& h : hist.rows)
        ccdf += manifest.run_id + "," + runner::fmt(theta) + "," + h.at(hist.col("degree")) + "," +
                h.at(hist.col("ccdf")) + "\n";
    }
  }

  std::string reward_csv = std::string(runner::kHeader) + "policy,round,component,min,mean,max,runs\n";
  for (const auto& [pol, by_round] : rewards)
    for (const auto& [round, by_col] : by_round)
      for (const char* c : kRewardColumns)
        reward_csv += pol + "," + std::to_string(round) + "," + c + "," + band_cells(band(by_col.at(c))) + "\n";
  std::string metric_csv = std::string(runner::kHeader) + "metric,theta,min,mean,max,runs\n";
  for (const auto& [name, by_theta] : metric_values)
    for (const auto& [theta, xs] : by_theta)
      metric_csv += name + "," + runner::fmt(theta) + "," + band_cells(band(xs)) + "\n";

  write_text_file(out_dir / "reward_by_policy.csv", reward_csv);
  write_text_file(out_dir / "metric_vs_theta.csv", metric_csv);
  write_text_file(out_dir / "degree_ccdf.csv", ccdf);
}

// R replications with consecutive seeds, each analyzed over the default thresholds, plus a
// combined report.
inline std::vector<runner::RunManifest> sweep(const SimConfig& base, const std::string& config_text,
                                              int replications, const runner::RunOptions& opt) {
  if (replications < 1) throw ConfigError("replications: must be >= 1");
  std::vector<runner::RunManifest> runs;
  std::vector<fs::path> dirs;
  for (int r = 0; r < replications; ++r) {
    SimConfig cfg = base;
    cfg.rng_seed = base.rng_seed + static_cast<std::uint64_t>(r);
    runs.push_back(runner::simulate(cfg, config_text, opt));
    analyze(runs.back().dir, default_thetas());
    dirs.push_back(runs.back().dir);
  }
  std::string key;
  for (const auto& m : runs) key += m.run_id;
  report(dirs, opt.out_root / ("sweep-" + hex64(fnv1a(key)).substr(0, 12)));
  return runs;
}

}  // namespace socsim::analysis
