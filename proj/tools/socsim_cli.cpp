#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "socsim/analysis.hpp"
#include "socsim/llm/http_transport.hpp"
#include "socsim/runner.hpp"

namespace fs = std::filesystem;
using namespace socsim;

namespace {

enum Exit { kOk = 0, kConfig = 2, kTransport = 3, kArtifact = 4 };

fs::path resolve_run(const fs::path& out_root, const std::string& id) {
  if (fs::is_directory(id)) return id;
  return out_root / id;
}

void apply_overrides(SimConfig& cfg, const std::optional<std::uint64_t>& seed, const std::string& policy,
                     const std::string& tie_mode, const std::string& coach, const std::string& corpus) {
  if (seed) cfg.rng_seed = *seed;
  if (!policy.empty()) cfg.policy = policy == "llm" ? PolicyKind::Llm : PolicyKind::Scripted;
  if (!tie_mode.empty()) cfg.tie_mode = tie_mode == "text" ? TieMode::Text : TieMode::Heuristic;
  if (!coach.empty()) cfg.coach_enabled = coach == "on";
  if (!corpus.empty()) cfg.llm.mock_corpus = fs::absolute(corpus).lexically_normal().string();
  cfg.validate();
}

runner::RunOptions options(const fs::path& out_root, bool force) {
  runner::RunOptions opt;
  opt.out_root = out_root;
  opt.force = force;
  opt.transport = [](const LlmConfig&) { return std::make_shared<llm::HttpTransport>(); };
  opt.on_round = [](int t) { std::cerr << "round " << t << " done\n"; };
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent social simulation with reward-driven agents and evolving ties"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_root = "runs";
  app.add_option("--out", out_root, "Root directory for run artifacts")->capture_default_str();

  std::string config_path, policy, tie_mode, coach, corpus, resume_id;
  std::optional<std::uint64_t> seed;
  bool force = false;
  auto* sim = app.add_subcommand("simulate", "Run a simulation from a config file");
  sim->add_option("--config", config_path, "Config file (JSON)");
  sim->add_option("--seed", seed, "Override the master RNG seed");
  sim->add_option("--policy", policy, "Agent policy")->check(CLI::IsMember({"scripted", "llm"}));
  sim->add_option("--tie-mode", tie_mode, "Tie evidence mode")->check(CLI::IsMember({"heuristic", "text"}));
  sim->add_option("--coach", coach, "Coach on or off")->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--mock-corpus", corpus, "Canned LLM responses instead of the network");
  sim->add_option("--resume", resume_id, "Continue an interrupted run from its checkpoint");
  sim->add_flag("--force", force, "Overwrite an existing run directory");

  std::string run_id, thresholds = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  auto* ana = app.add_subcommand("analyze", "Threshold sweep metrics for a finished run");
  ana->add_option("--run", run_id, "Run id or directory")->required();
  ana->add_option("--thresholds", thresholds, "Comma-separated thresholds in [0, 1]")->capture_default_str();

  std::vector<std::string> run_ids;
  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Plot-ready CSV bundles across analyzed runs");
  rep->add_option("--runs", run_ids, "Run ids or directories")->delimiter(',');
  rep->add_option("--report-dir", report_dir, "Output directory (default <out>/report)");

  int replications = 5;
  auto* swp = app.add_subcommand("sweep", "Replicate a config over consecutive seeds and report");
  swp->add_option("--config", config_path, "Config file (JSON)")->required();
  swp->add_option("--replications", replications, "Number of replications")->capture_default_str();
  swp->add_option("--seed", seed, "First seed");
  swp->add_option("--policy", policy, "Agent policy")->check(CLI::IsMember({"scripted", "llm"}));
  swp->add_option("--tie-mode", tie_mode, "Tie evidence mode")->check(CLI::IsMember({"heuristic", "text"}));
  swp->add_option("--coach", coach, "Coach on or off")->check(CLI::IsMember({"on", "off"}));
  swp->add_option("--mock-corpus", corpus, "Canned LLM responses instead of the network");
  swp->add_flag("--force", force, "Overwrite existing run directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (sim->parsed()) {
      const auto opt = options(out_root, force);
      runner::RunManifest m;
      if (!resume_id.empty()) {
        m = runner::resume(resolve_run(out_root, resume_id), opt);
      } else {
        if (config_path.empty()) throw ConfigError("simulate: --config is required");
        auto cfg = load_config(config_path);
        apply_overrides(cfg, seed, policy, tie_mode, coach, corpus);
        m = runner::simulate(cfg, read_text_file(config_path), opt);
      }
      std::cout << m.run_id << "\t" << m.dir.string() << "\n";
    } else if (ana->parsed()) {
      const auto dir = resolve_run(out_root, run_id);
      const auto rows = analysis::analyze(dir, analysis::parse_thetas(thresholds));
      std::cout << analysis::kMetricColumns << "\n";
      for (const auto& r : rows) std::cout << analysis::to_csv_line(r) << "\n";
    } else if (rep->parsed()) {
      if (run_ids.empty()) throw ConfigError("report: --runs needs at least one run id");
      std::vector<fs::path> dirs;
      for (const auto& id : run_ids) dirs.push_back(resolve_run(out_root, id));
      const fs::path dest = report_dir.empty() ? fs::path(out_root) / "report" : fs::path(report_dir);
      analysis::report(dirs, dest);
      std::cout << dest.string() << "\n";
    } else if (swp->parsed()) {
      auto cfg = load_config(config_path);
      apply_overrides(cfg, seed, policy, tie_mode, coach, corpus);
      for (const auto& m : analysis::sweep(cfg, read_text_file(config_path), replications, options(out_root, force)))
        std::cout << m.run_id << "\t" << m.dir.string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what()
              << "\nthe run was checkpointed after its last complete round; continue with "
                 "simulate --resume <run_id>\n";
    return kTransport;
  } catch (const std::exception& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return kArtifact;
  }
  return kOk;
}
