#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "goldens.hpp"
#include "socsim/batch.hpp"
#include "socsim/config.hpp"
#include "socsim/rewards.hpp"
#include "socsim/rng.hpp"
#include "socsim/ties.hpp"

using namespace socsim;
using fx::BatchBuilder;

class Golden : public ::testing::TestWithParam<goldens::Golden> {};

TEST_P(Golden, Holds) {
  const auto& g = GetParam();
  EXPECT_EQ(g.check(), "") << g.name;
}

INSTANTIATE_TEST_SUITE_P(Formulas, Golden, ::testing::ValuesIn(goldens::formula_goldens()),
                         [](const auto& info) { return info.param.name; });

// --- reward properties --------------------------------------------------------

TEST(Rewards, FuzzedComponentsStayInUnitInterval) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0), wide(-3.0, 3.0);
  for (int iter = 0; iter < 3000; ++iter) {
    const int n = 2 + iter % 7;
    const int slots = 1 + iter % 4;
    auto r = fx::fuzz_round(rng, n, slots);
    rewards::Params p{unit(rng), unit(rng), unit(rng), unit(rng), wide(rng), 1e-6};
    const auto w = fx::random_weights(rng);
    for (const auto& u : fx::users(n)) {
      const auto rv = rewards::evaluate(u, 2, r.batch, r.prev, visible_content(u, r.prev), r.topics, n,
                                        slots, p, w);
      for (double c : rv.components) {
        ASSERT_GE(c, 0.0);
        ASSERT_LE(c, 1.0);
      }
      ASSERT_GE(rv.total, 0.0);
      ASSERT_LE(rv.total, 1.0 + 1e-12);
      ASSERT_NEAR(rv.total, rewards::total(rv.components, w), 1e-12);
    }
  }
}

// The direct-exchange total is held fixed so only authorship changes.
TEST(Rewards, SocBetaOneIgnoresOwnSends) {
  BatchBuilder a(2), b(2);
  a.dm("u02", "u01");
  a.dm("u03", "u04");
  a.dm("u05", "u06");
  b.dm("u02", "u01");
  b.dm("u01", "u04");
  b.dm("u01", "u06");
  EXPECT_DOUBLE_EQ(rewards::soc("u01", a.batch, 3, 1.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(rewards::soc("u01", b.batch, 3, 1.0), 1.0 / 3.0);
}

TEST(Rewards, SocBetaZeroIgnoresReceived) {
  BatchBuilder c(2), d(2);
  c.dm("u01", "u02");
  c.dm("u01", "u03");
  c.dm("u04", "u05");
  d.dm("u01", "u02");
  d.dm("u01", "u03");
  d.dm("u04", "u01");
  EXPECT_DOUBLE_EQ(rewards::soc("u01", c.batch, 3, 0.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rewards::soc("u01", d.batch, 3, 0.0), 2.0 / 3.0);
}

TEST(Rewards, SocRejectsZeroSlots) { EXPECT_THROW(rewards::soc("u01", {}, 0, 0.5), DomainError); }

TEST(Rewards, InfIsPermutationInvariant) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    auto r = fx::fuzz_round(rng, 5, 3);
    auto rec = visible_content("u01", r.prev);
    const double base = rewards::inf("u01", rec, r.topics, 0.4);
    std::shuffle(rec.begin(), rec.end(), rng);
    EXPECT_DOUBLE_EQ(rewards::inf("u01", rec, r.topics, 0.4), base);
  }
}

TEST(Rewards, InfRejectsTopicsOutsideVocabulary) {
  Action a;
  a.type = ActionType::Post;
  a.topic = "zzz";
  TopicState topics;
  topics.platform = {"a"};
  EXPECT_THROW(rewards::inf("u01", {a}, topics, 0.5), DomainError);
}

TEST(Rewards, PreFeedbackIsAntisymmetric) {
  for (int likes = 0; likes < 10; ++likes)
    for (int dislikes = 0; dislikes < 10; ++dislikes) {
      const double fwd = rewards::pre_raw(0, 3, {likes, dislikes}, 10, 3, 1.0);
      const double back = rewards::pre_raw(0, 3, {dislikes, likes}, 10, 3, 1.0);
      EXPECT_NEAR(fwd, -back, 1e-15);
    }
  EXPECT_THROW(rewards::pre_raw(1, 1, {}, 1, 3, 0.5), DomainError);
}

TEST(Rewards, EmoSymmetricAtBetaOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng), n = u(rng);
    EXPECT_DOUBLE_EQ(rewards::emo_from_sums(p, n, 1.0, 1e-6), rewards::emo_from_sums(n, p, 1.0, 1e-6));
  }
  EXPECT_THROW(rewards::emo_from_sums(1, 1, 1, 0.0), DomainError);
}

TEST(Rewards, EmoCountsCommentsOnOwnContent) {
  BatchBuilder b(2);
  b.com("u02", "u01", 99, 0.7);
  b.com("u02", "u03", 98, -0.7);
  EXPECT_NEAR(rewards::emo("u01", b.batch, 1.0, 1e-6), 0.5 * (1.0 + 0.7 / (0.7 + 1e-6)), 1e-15);
}

TEST(Rewards, TotalIsLinear) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto w = fx::random_weights(rng);
    std::array<double, 5> x{}, y{}, z{};
    const double a = u(rng), b = u(rng);
    for (int k = 0; k < 5; ++k) {
      x[k] = u(rng);
      y[k] = u(rng);
      z[k] = a * x[k] + b * y[k];
    }
    EXPECT_NEAR(rewards::total(z, w), a * rewards::total(x, w) + b * rewards::total(y, w), 1e-12);
  }
}

TEST(Weights, Validation) {
  RewardWeights w;
  EXPECT_NO_THROW(w.validate());
  w.values = {0.5, 0.5, 0.1, 0, 0};
  EXPECT_THROW(w.validate(), ConfigError);
  w.values = {1.2, -0.2, 0, 0, 0};
  EXPECT_THROW(w.validate(), ConfigError);
  EXPECT_EQ(RewardWeights::pure(RewardComponent::Coord).dominant(), RewardComponent::Coord);
}

// --- tie properties -------------------------------------------------------------

TEST(Ties, HalfLifeHalvesWeight) {
  for (double h : {1.0, 2.0, 3.0, 5.0, 7.0, 10.0}) {
    const ties::UpdateParams p{0.1, 0.2, ties::half_life_to_delta(h)};
    double w = 0.8;
    for (int t = 0; t < int(h); ++t) w = ties::update_one(w, false, 0.0, p);
    EXPECT_NEAR(w, 0.4, 1e-9) << "h=" << h;
  }
}

TEST(Ties, UpdateStaysBoundedAndCapped) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 2 + iter % 6;
    ties::TieGraph g(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) g.weights(a, b) = u(rng);
    const ties::UpdateParams p{0.9 * u(rng), 0.5 * u(rng), 0.99 * u(rng)};
    std::vector<std::vector<bool>> act(n, std::vector<bool>(n));
    Matrix e(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        act[a][b] = u(rng) < 0.5;
        e(a, b) = u(rng);
      }
    const auto next = ties::tie_update(g, act, e, p);
    EXPECT_EQ(next.round, g.round + 1);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const double w = next.weights(a, b);
        if (a == b) {
          EXPECT_EQ(w, 0.0);
          continue;
        }
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, 1.0);
        EXPECT_LE(w - g.weights(a, b), p.delta_max + 1e-15);
      }
  }
}

TEST(Ties, UpdateRejectsBadParameters) {
  ties::TieGraph g(2);
  std::vector<std::vector<bool>> act(2, std::vector<bool>(2, true));
  Matrix e(2, 0.5);
  EXPECT_THROW(ties::tie_update(g, act, e, {1.0, 0.2, 0.1}), DomainError);
  EXPECT_THROW(ties::tie_update(g, act, e, {0.1, -0.1, 0.1}), DomainError);
  EXPECT_THROW(ties::tie_update(g, act, e, {0.1, 0.2, 1.0}), DomainError);
  Matrix bad(2, 1.5);
  EXPECT_THROW(ties::tie_update(g, act, bad, {0.1, 0.2, 0.1}), DomainError);
}

TEST(Ties, AggregateIsMonotone) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-1.0, 1.0);
  for (int iter = 0; iter < 2000; ++iter) {
    ties::EvidenceWeights w{u(rng), u(rng), u(rng), u(rng)};
    const double sum = w[0] + w[1] + w[2] + w[3];
    for (auto& x : w) x /= sum;
    ties::EvidenceSignals sig{double(u(rng) < 0.5), s(rng), u(rng), s(rng)};
    const double base = ties::aggregate_evidence(sig, w);
    auto raised = sig;
    switch (iter % 4) {
      case 0: raised.novelty = 1.0; break;
      case 1: raised.approval = std::min(1.0, sig.approval + u(rng)); break;
      case 2: raised.reciprocity = std::min(1.0, sig.reciprocity + u(rng)); break;
      default: raised.affect = std::min(1.0, sig.affect + u(rng)); break;
    }
    EXPECT_GE(ties::aggregate_evidence(raised, w), base - 1e-15);
  }
}

TEST(Ties, EvidenceWeightsValidated) {
  EXPECT_NO_THROW(ties::validate_evidence_weights({0.25, 0.25, 0.25, 0.25}));
  EXPECT_THROW(ties::validate_evidence_weights({0.5, 0.5, 0.5, 0.0}), ConfigError);
  EXPECT_THROW(ties::validate_evidence_weights({1.5, -0.5, 0.0, 0.0}), ConfigError);
}

TEST(Ties, SymmetrizeIdempotentAndBinarizeMonotone) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 2 + iter % 8;
    Matrix a(n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (x != y && u(rng) < 0.6) a(x, y) = u(rng);
    const auto s = ties::symmetrize(a);
    EXPECT_EQ(ties::symmetrize(s), s);
    std::size_t last = n * n;
    for (int k = 0; k <= 10; ++k) {
      const auto edges = ties::undirected_edge_count(ties::binarize(s, k / 10.0));
      EXPECT_LE(edges, last);
      last = edges;
    }
  }
  EXPECT_THROW(ties::binarize(Matrix(2), 1.5), DomainError);
}

TEST(Ties, ActivationsMatchPairwisePredicate) {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 100; ++iter) {
    auto r = fx::fuzz_round(rng, 5, 3);
    const Roster roster(fx::users(5));
    const auto act = ties::activations(roster, r.batch);
    for (std::size_t u = 0; u < 5; ++u)
      for (std::size_t v = 0; v < 5; ++v)
        if (u != v) {
          EXPECT_EQ(act[u][v], ties::activation(roster[v], roster[u], r.batch));
        }
  }
  EXPECT_THROW(ties::activation("u", "u", {}), DomainError);
}

TEST(Ties, NoveltyAndAffect) {
  BatchBuilder b(2);
  b.dm("v", "u", 0.6, "new topic");
  b.dm("v", "u", -0.2, "old topic");
  TopicState topics;
  topics.seen["u"] = {"old topic"};
  auto s = ties::evidence_signals("v", "u", b.batch, topics, {}, 1e-6);
  EXPECT_EQ(s.novelty, 1.0);
  EXPECT_NEAR(s.affect, 0.2, 1e-12);
  topics.seen["u"].insert("new topic");
  s = ties::evidence_signals("v", "u", b.batch, topics, {}, 1e-6);
  EXPECT_EQ(s.novelty, 0.0);
  // a like or dislike suppresses the affect signal
  b.vote("v", b.post("u", "x"), 1);
  EXPECT_EQ(ties::evidence_signals("v", "u", b.batch, topics, {}, 1e-6).affect, 0.0);
}

TEST(Ties, ReciprocityRejectsBadBeta) {
  EXPECT_THROW(ties::update_reciprocity({}, {}, 0.0), DomainError);
  EXPECT_THROW(ties::update_reciprocity({}, {}, 1.0), DomainError);
}

// --- misc core ----------------------------------------------------------------

TEST(Topics, Canonicalization) {
  EXPECT_EQ(canonical_topic("  Carbon   TAX "), "carbon tax");
  EXPECT_EQ(canonical_topic("one two three four five six"), "one two three four five");
  EXPECT_EQ(canonical_topic("   "), "");
}

TEST(Batch, CheckRejectsUnknownUsers) {
  BatchBuilder b;
  b.dm("u01", "u99");
  EXPECT_THROW(check_batch(b.batch, {"u01", "u02"}), CorruptionError);
}

TEST(Rng, StreamsAreIndependentAndReproducible) {
  Stream a(42, "u01", 3, "plan"), b(42, "u01", 3, "plan"), c(42, "u01", 3, "vote"), d(43, "u01", 3, "plan");
  std::vector<double> xa, xb, xc, xd;
  for (int i = 0; i < 16; ++i) {
    xa.push_back(a.uniform());
    xb.push_back(b.uniform());
    xc.push_back(c.uniform());
    xd.push_back(d.uniform());
  }
  EXPECT_EQ(xa, xb);
  EXPECT_NE(xa, xc);
  EXPECT_NE(xa, xd);
  for (double x : xa) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Config, ValidationRejectsOutOfRangeFields) {
  SimConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [&](auto mutate) {
    SimConfig x;
    mutate(x);
    EXPECT_THROW(x.validate(), ConfigError);
  };
  bad([](SimConfig& x) { x.rounds = 0; });
  bad([](SimConfig& x) { x.num_agents = 1; });
  bad([](SimConfig& x) { x.actions_per_round = 0; });
  bad([](SimConfig& x) { x.reward.beta_soc = 1.5; });
  bad([](SimConfig& x) { x.reward.epsilon = 0.0; });
  bad([](SimConfig& x) { x.beta_rec = 1.0; });
  bad([](SimConfig& x) { x.xi = 1.0; });
  bad([](SimConfig& x) { x.delta = 0.1; });  // both half-life and delta
  bad([](SimConfig& x) { x.half_life.reset(); });
  bad([](SimConfig& x) { x.threshold = -0.1; });
  bad([](SimConfig& x) { x.evidence_weights = {0.5, 0.5, 0.5, 0.5}; });
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  auto c = load_config(fx::data_dir() / "default_config.json");
  EXPECT_EQ(c.num_agents, 30);
  EXPECT_EQ(c.rounds, 15);
  EXPECT_EQ(c.actions_per_round, 3);
  auto j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
  j["bogus"] = 1;
  EXPECT_THROW(config_from_json(j), ConfigError);
  auto k = config_to_json(c);
  k["rounds"] = 0;
  EXPECT_THROW(config_from_json(k).validate(), ConfigError);
}
