#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "fixtures.hpp"
#include "socsim/analysis.hpp"
#include "socsim/engine.hpp"
#include "socsim/runner.hpp"

using namespace socsim;
namespace fs = std::filesystem;
using llm::json;
using llm::MockTransport;

namespace {

SimConfig small_config(int agents = 5, int rounds = 3, std::uint64_t seed = 11) {
  SimConfig c;
  c.num_agents = agents;
  c.rounds = rounds;
  c.rng_seed = seed;
  c.personas_path = (fx::data_dir() / "personas_sample.json").string();
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

runner::RunOptions opts(const fs::path& root) {
  runner::RunOptions o;
  o.out_root = root;
  o.sleeper = [](int) {};
  return o;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

std::string not_plan_json(int n) {
  json arr = json::array();
  for (int i = 0; i < n; ++i)
    arr.push_back({{"type", "NOT"}, {"recipient", nullptr}, {"topic", nullptr}, {"target_id", nullptr},
                   {"mention_flag", false}, {"tone", "neutral"}});
  return arr.dump();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOCSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Engine, RoundOneIsPostOrNothingAndBatchIsFull) {
  const auto cfg = small_config(8, 2);
  auto s = init_state(cfg, load_personas(cfg.personas_path), "t");
  const auto r1 = run_round(s, 1);
  EXPECT_EQ(r1.batch.actions.size(), std::size_t(8 * 3));
  for (const auto& a : r1.batch.actions) EXPECT_TRUE(a.type == ActionType::Post || a.type == ActionType::Not);
  const auto r2 = run_round(s, 2);
  EXPECT_EQ(r2.batch.actions.size(), std::size_t(8 * 3));
  std::map<UserId, int> per_user;
  for (const auto& a : r2.batch.actions) ++per_user[a.sender];
  for (const auto& [u, k] : per_user) EXPECT_EQ(k, 3);
  EXPECT_THROW(run_round(s, 4), DomainError);
}

TEST(Engine, AllNothingPlansLeaveOnlyDecay) {
  auto cfg = small_config(4, 2);
  cfg.policy = PolicyKind::Llm;
  auto s = init_state(cfg, load_personas(cfg.personas_path), "t");
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = 0; v < 4; ++v)
      if (u != v) s.ties.weights(u, v) = 0.1 * double(u + v);
  const auto before = s.ties.weights;
  auto t = std::make_shared<MockTransport>([](const json&, const std::string& kind, int) {
    return kind == "plan" ? MockTransport::ok(not_plan_json(3)) : MockTransport::status(400);
  });
  llm::Gateway g(cfg.llm, t, [](int) {});
  const auto r = run_round(s, 1, {nullptr, &g});
  for (const auto& a : r.batch.actions) EXPECT_EQ(a.type, ActionType::Not);
  EXPECT_TRUE(r.batch.votes.empty());
  for (const auto& [u, rv] : r.rewards) {
    EXPECT_EQ(rv[RewardComponent::Soc], 0.0);
    EXPECT_EQ(rv[RewardComponent::Pre], 0.0);
    EXPECT_EQ(rv[RewardComponent::Coord], 0.0);
    EXPECT_NEAR(rv[RewardComponent::Emo], 0.5, 1e-15);  // no exchanges: neutral midpoint
  }
  const double delta = cfg.update_params().delta;
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = 0; v < 4; ++v) EXPECT_DOUBLE_EQ(s.ties.weights(u, v), (1 - delta) * before(u, v));
}

TEST(Engine, LlmPolicyNeedsGateway) {
  auto cfg = small_config(3, 1);
  cfg.policy = PolicyKind::Llm;
  auto s = init_state(cfg, load_personas(cfg.personas_path), "t");
  EXPECT_THROW(run_round(s, 1), ConfigError);
}

TEST(Engine, EventLogsAreByteIdentical) {
  const auto cfg = small_config(5, 3, 99);
  auto once = [&] {
    EventLog log("same");
    auto s = init_state(cfg, load_personas(cfg.personas_path), "same");
    for (int t = 1; t <= cfg.rounds; ++t) run_round(s, t, {&log, nullptr});
    return log.lines();
  };
  const auto a = once();
  const auto b = once();
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST(Engine, ReplayRebuildsTiesAndMemories) {
  const auto cfg = small_config(6, 4, 5);
  const auto root = scratch("replay");
  const auto m = runner::simulate(cfg, "{}", opts(root));
  const auto events = read_events(m.dir / "events.jsonl");
  auto s = init_state(cfg, load_personas(cfg.personas_path), m.run_id);
  for (int t = 1; t <= cfg.rounds; ++t) run_round(s, t);
  const auto r = replay(events, s.roster, cfg.beta_rec);
  EXPECT_EQ(r.rounds, cfg.rounds);
  for (std::size_t u = 0; u < s.roster.size(); ++u)
    for (std::size_t v = 0; v < s.roster.size(); ++v) EXPECT_EQ(r.ties(u, v), s.ties.weights(u, v));
  for (const auto& p : s.personas) EXPECT_EQ(r.memories.at(p.user), p.memory) << p.user;
}

TEST(Engine, CheckpointRoundTrips) {
  const auto cfg = small_config(5, 3);
  auto s = init_state(cfg, load_personas(cfg.personas_path), "cp");
  run_round(s, 1);
  run_round(s, 2);
  const auto j = state_to_json(s);
  auto back = state_from_json(json::parse(j.dump()));
  EXPECT_EQ(state_to_json(back), j);
  const auto a = run_round(s, 3);
  const auto b = run_round(back, 3);
  EXPECT_EQ(a.batch.actions, b.batch.actions);
  EXPECT_EQ(a.batch.votes, b.batch.votes);
  EXPECT_EQ(state_to_json(s), state_to_json(back));
}

TEST(Runner, ResumeMatchesUninterruptedRun) {
  const auto cfg = small_config(5, 4, 21);
  const auto full_root = scratch("full");
  const auto full = runner::simulate(cfg, "{}", opts(full_root));

  const auto cut_root = scratch("cut");
  auto o = opts(cut_root);
  o.on_round = [](int t) {
    if (t == 2) throw TransportError("simulated outage");
  };
  EXPECT_THROW(runner::simulate(cfg, "{}", o), TransportError);
  const auto dir = cut_root / runner::run_id_for(cfg);
  EXPECT_EQ(runner::load_manifest(dir).status, "running");
  const auto resumed = runner::resume(dir, opts(cut_root));
  EXPECT_EQ(resumed.status, "complete");
  EXPECT_EQ(slurp(full.dir / "events.jsonl"), slurp(dir / "events.jsonl"));
  EXPECT_EQ(slurp(full.dir / "rewards.csv"), slurp(dir / "rewards.csv"));
  EXPECT_EQ(slurp(full.dir / "ties/final_matrix.tsv"), slurp(dir / "ties/final_matrix.tsv"));
}

TEST(Runner, RefusesToOverwriteWithoutForce) {
  const auto cfg = small_config(3, 1);
  const auto root = scratch("force");
  runner::simulate(cfg, "{}", opts(root));
  EXPECT_THROW(runner::simulate(cfg, "{}", opts(root)), ArtifactError);
  auto o = opts(root);
  o.force = true;
  EXPECT_NO_THROW(runner::simulate(cfg, "{}", o));
}

TEST(Runner, ArtifactsCarrySchemaHeader) {
  const auto cfg = small_config(4, 2);
  const auto m = runner::simulate(cfg, "{}", opts(scratch("schema")));
  for (const char* f : {"rewards.csv", "ties/final_matrix.tsv", "ties/round_001.tsv", "ties/round_002.tsv"})
    EXPECT_EQ(slurp(m.dir / f).rfind("#schema_version=1\n", 0), 0u) << f;
  const auto [roster, w] = runner::read_matrix_tsv(m.dir / "ties/final_matrix.tsv");
  EXPECT_EQ(roster.size(), 4u);
  EXPECT_EQ(runner::load_manifest(m.dir).status, "complete");
  const auto text = slurp(m.dir / "ties/final_matrix.tsv");
  write_text_file(m.dir / "unversioned.tsv", text.substr(text.find('\n') + 1));
  EXPECT_THROW(runner::read_matrix_tsv(m.dir / "unversioned.tsv"), ArtifactError);
}

TEST(Analysis, SweepRowsAndValidation) {
  const auto cfg = small_config(8, 3);
  const auto m = runner::simulate(cfg, "{}", opts(scratch("analyze")));
  const auto rows = analysis::analyze(m.dir, analysis::default_thetas());
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].edges, rows[i - 1].edges);
  EXPECT_TRUE(fs::exists(m.dir / "analysis/metrics.csv"));
  EXPECT_TRUE(fs::exists(m.dir / "analysis/degree_theta_0.50.csv"));
  EXPECT_THROW(analysis::analyze(m.dir, {1.5}), ConfigError);
  EXPECT_THROW(analysis::analyze(m.dir, {-0.1}), ConfigError);
  EXPECT_THROW(analysis::parse_thetas("0.1,x"), ConfigError);
  EXPECT_EQ(analysis::parse_thetas("0.2,0.4"), (std::vector<double>{0.2, 0.4}));
}

TEST(Analysis, EmptyGraphRowIsDegenerate) {
  const auto row = analysis::metrics_at(Matrix(4), 0.5, {0, 0, 1, 1});
  EXPECT_EQ(row.edges, 0);
  EXPECT_EQ(row.density, 0.0);
  EXPECT_FALSE(row.aspl.has_value());
  EXPECT_FALSE(row.modularity.has_value());
  EXPECT_FALSE(row.homophily.has_value());
  EXPECT_NE(analysis::to_csv_line(row).find("NA"), std::string::npos);
}

TEST(Analysis, ReportBands) {
  const auto root = scratch("report");
  auto o = opts(root);
  const auto runs = analysis::sweep(small_config(6, 2, 3), "{}", 3, o);
  ASSERT_EQ(runs.size(), 3u);
  std::vector<fs::path> dirs;
  for (const auto& m : runs) dirs.push_back(m.dir);
  analysis::report(dirs, root / "r3");
  const auto t3 = analysis::read_csv(root / "r3/reward_by_policy.csv");
  ASSERT_FALSE(t3.rows.empty());
  for (const auto& row : t3.rows) {
    EXPECT_EQ(row.at(t3.col("runs")), "3");
    EXPECT_LE(std::stod(row.at(t3.col("min"))), std::stod(row.at(t3.col("mean"))) + 1e-12);
    EXPECT_LE(std::stod(row.at(t3.col("mean"))), std::stod(row.at(t3.col("max"))) + 1e-12);
  }
  analysis::report({dirs[0]}, root / "r1");
  const auto t1 = analysis::read_csv(root / "r1/reward_by_policy.csv");
  for (const auto& row : t1.rows) {
    EXPECT_EQ(row.at(t1.col("runs")), "1");
    EXPECT_EQ(row.at(t1.col("min")), row.at(t1.col("max")));
  }
  EXPECT_TRUE(fs::exists(root / "r1/metric_vs_theta.csv"));
  EXPECT_TRUE(fs::exists(root / "r1/degree_ccdf.csv"));
  EXPECT_THROW(analysis::report({}, root / "r0"), ConfigError);
}

// --- command line ---------------------------------------------------------------

TEST(Cli, ExitCodes) {
  const auto root = scratch("cli");
  const auto cfg_path = root / "cfg.json";
  auto j = config_to_json(small_config(4, 2));
  std::ofstream(cfg_path) << j.dump(2);
  const std::string out = " --out " + (root / "runs").string();

  EXPECT_EQ(run_cli("simulate --config " + cfg_path.string() + out), 0);
  EXPECT_EQ(run_cli("simulate --config " + cfg_path.string() + out), 4);
  EXPECT_EQ(run_cli("simulate --force --config " + cfg_path.string() + out), 0);

  const auto id = runner::run_id_for(load_config(cfg_path));
  EXPECT_EQ(run_cli("analyze --run " + id + out), 0);
  EXPECT_EQ(run_cli("analyze --thresholds 2 --run " + id + out), 2);
  EXPECT_EQ(run_cli("report --runs " + id + out), 0);
  EXPECT_EQ(run_cli("analyze --run run-missing" + out), 4);

  auto zero = j;
  zero["rounds"] = 0;
  std::ofstream(root / "zero.json") << zero.dump();
  EXPECT_EQ(run_cli("simulate --config " + (root / "zero.json").string() + out), 2);
  auto unknown = j;
  unknown["mystery"] = 1;
  std::ofstream(root / "unknown.json") << unknown.dump();
  EXPECT_EQ(run_cli("simulate --config " + (root / "unknown.json").string() + out), 2);
  EXPECT_EQ(run_cli("simulate --policy bogus --config " + cfg_path.string() + out), 2);
  EXPECT_EQ(run_cli("simulate" + out), 2);

  // text ties against an unreachable endpoint: transport failure
  auto offline = j;
  offline["tie_mode"] = "text";
  offline["llm"] = {{"endpoint", "http://127.0.0.1:9/v1/chat/completions"},
                    {"max_transport_retries", 0}, {"timeout_ms", 500}};
  std::ofstream(root / "offline.json") << offline.dump();
  EXPECT_EQ(run_cli("simulate --config " + (root / "offline.json").string() + out), 3);
}
