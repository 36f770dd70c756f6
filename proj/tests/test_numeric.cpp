#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stealthguard/error.hpp"
#include "stealthguard/numeric.hpp"
#include "stealthguard/structural.hpp"
#include "stealthguard/synthesis.hpp"
#include "stealthguard/topology_io.hpp"

namespace stealthguard {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double max_abs(const std::vector<VectorXd>& seq) {
  double best = 0.0;
  for (const auto& v : seq)
    if (v.size() > 0) best = std::max(best, v.cwiseAbs().maxCoeff());
  return best;
}

// x1 -> x2 -> x3 with the only sensor on x3.
DcsTopology chain3() {
  return DcsTopology(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}}, {2});
}

TEST(Realize, SingleAgentHitsTargetRadius) {
  const DcsTopology t(1, {{0, 0}}, {0});
  const auto real = realize(StructuredSystem(t, AttackScenario({0}, {}, 1)), 3);
  EXPECT_NEAR(std::abs(real.A(0, 0)), 0.9, 1e-12);
  EXPECT_EQ(real.B(0, 0), 1.0);
  EXPECT_EQ(real.C(0, 0), 1.0);
  EXPECT_EQ(real.D(0, 0), 0.0);
  EXPECT_NEAR(real.eta, 3.841458820694124, 1e-9);
}

TEST(Realize, PreservesPatternAndStabilisesFilter) {
  std::mt19937_64 rng(61);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto t = oracle::random_topology(rng, n, 1 + static_cast<int>(rng() % n), 0.35);
    const StructuredSystem sys(t, AttackScenario({0}, {}, 1));
    const auto real = realize(sys, seed);
    const Pattern a = sys.a_pattern();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) EXPECT_EQ(real.A(i, j) != 0.0, a(i, j));
    EXPECT_NEAR(spectral_radius(real.A), 0.9, 1e-9);
    EXPECT_LT(spectral_radius(real.A - real.K * real.C * real.A), 1.0);
  }
}

TEST(Realize, SameSeedSameMatrices) {
  const StructuredSystem sys(chain3(), AttackScenario({0}, {}, 1));
  const auto a = realize(sys, 99);
  const auto b = realize(sys, 99);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.K, b.K);
  EXPECT_NE(a.A, realize(sys, 100).A);
}

TEST(Realize, RejectsBadOptions) {
  const StructuredSystem sys(chain3(), AttackScenario({0}, {}, 1));
  RealizeOptions opts;
  opts.spectral_radius = 1.0;
  EXPECT_THROW(realize(sys, 1, opts), InvalidInput);
  opts.spectral_radius = 0.5;
  opts.process_noise = -1.0;
  EXPECT_THROW(realize(sys, 1, opts), InvalidInput);
}

TEST(Filter, GainSolvesRiccatiFixedPoint) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 5);
  const auto f = steady_state_filter(real.A, real.C, real.Q, real.R);
  const MatrixXd& S = f.prior_covariance;
  const MatrixXd I = MatrixXd::Identity(3, 3);
  const MatrixXd next = real.A * (I - f.gain * real.C) * S * real.A.transpose() + real.Q;
  EXPECT_LT((next - S).norm(), 1e-9 * (1.0 + S.norm()));
}

TEST(ChiSquare, KnownQuantiles) {
  EXPECT_NEAR(chi_square_threshold(1, 0.05), 3.841458820694124, 1e-9);
  EXPECT_NEAR(chi_square_threshold(2, 0.05), 5.991464547107979, 1e-9);
}

TEST(NormalRank, EqualsLinkingSize) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % n);
    const auto t = oracle::random_topology(rng, n, m, 0.3);
    std::vector<NodeId> pool;
    for (int i = 0; i < n; ++i) pool.push_back(NodeId::agent(i));
    for (int k = 0; k < m; ++k) pool.push_back(NodeId::observer(k));
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + rng() % std::min<std::size_t>(3, pool.size()));
    const StructuredSystem sys(t, AttackScenario::from_nodes(pool, 3));
    const auto real = realize(sys, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(normal_rank(real, 5), max_linking(sys).size) << emit_topology(t, 0);
  }
}

TEST(NormalRank, UnobservableInputHasRankZero) {
  // x2 feeds nothing that reaches the sensor on x1.
  const DcsTopology t(3, {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {2, 1}}, {0});
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_EQ(normal_rank(realize(StructuredSystem(t, AttackScenario({1}, {}, 1)), seed), 5), 0);
}

TEST(NormalRank, NeedsThreeProbes) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 1);
  EXPECT_THROW(normal_rank(real, 2), InvalidInput);
}

TEST(PerfectAttack, NoneForLeftInvertibleSystem) {
  const StructuredSystem sys(chain3(), AttackScenario({0}, {}, 1));
  ASSERT_TRUE(is_structurally_left_invertible(sys));
  const auto search = find_perfect_attack(realize(sys, 13), 6);
  EXPECT_FALSE(search.attack.has_value());
  EXPECT_EQ(search.null_dimension, 0);
}

TEST(PerfectAttack, TwoInputsBehindOneSensor) {
  const StructuredSystem sys(chain3(), AttackScenario({0, 1}, {}, 2));
  ASSERT_FALSE(is_structurally_left_invertible(sys));
  const auto real = realize(sys, 13);
  const auto search = find_perfect_attack(real, 6);
  ASSERT_TRUE(search.attack.has_value());
  const auto& attack = *search.attack;
  EXPECT_EQ(attack.horizon, 6);
  EXPECT_LE(max_abs(attack.delta.dz), 1e-8);
  EXPECT_LE(max_abs(attack.delta.dy), 1e-8);
  EXPECT_GE(max_abs(attack.delta.dx), 1e-3);
  EXPECT_LE(search.max_output_deviation, 1e-8);
  EXPECT_THROW(find_perfect_attack(real, 5), InvalidInput);
}

TEST(PerfectAttack, ReplayLeavesDetectorUntouched) {
  const StructuredSystem sys(chain3(), AttackScenario({0, 1}, {}, 2));
  const auto real = realize(sys, 21);
  const auto search = find_perfect_attack(real, 6);
  ASSERT_TRUE(search.attack.has_value());
  const auto run = simulate(real, search.attack->inputs, 8, 6);
  ASSERT_TRUE(run.attacked.has_value());
  EXPECT_EQ(run.nominal.alarm, run.attacked->alarm);
  for (int k = 0; k < 6; ++k) {
    EXPECT_LE((run.attacked->z[k] - run.nominal.z[k]).cwiseAbs().maxCoeff(), 1e-8);
    // Deviations are measured as nominal minus attacked.
    EXPECT_LE((run.nominal.x[k] - run.attacked->x[k] - run.delta->dx[k]).norm(), 1e-9);
  }
}

TEST(Simulate, NoAttackMeansNoDeviation) {
  const StructuredSystem sys(chain3(), AttackScenario({0}, {}, 1));
  const auto real = realize(sys, 2);
  const InputSequence zeros(10, VectorXd::Zero(1));
  const auto run = simulate(real, zeros, 4, 10);
  EXPECT_EQ(max_abs(run.delta->dz), 0.0);
  EXPECT_EQ(max_abs(run.delta->dx), 0.0);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(run.nominal.z[k], run.attacked->z[k]);
}

TEST(Simulate, NoiselessStateDecays) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 2);
  SimulationOptions opts;
  opts.noise = false;
  opts.initial_state = VectorXd::Ones(3);
  const auto run = simulate(real, std::nullopt, 1, 400, opts);
  EXPECT_LT(run.nominal.x.back().norm(), 1e-6);
  EXPECT_LT(run.nominal.z.back().norm(), 1e-6);
}

TEST(Simulate, DeviationDoesNotDependOnNoise) {
  const StructuredSystem sys(chain3(), AttackScenario({0, 1}, {}, 2));
  const auto real = realize(sys, 3);
  InputSequence inputs;
  for (int k = 0; k < 12; ++k) inputs.push_back(VectorXd::Constant(2, 0.1 * k));
  SimulationOptions quiet;
  quiet.noise = false;
  const auto noisy = simulate(real, inputs, 5, 12);
  const auto silent = simulate(real, inputs, 5, 12, quiet);
  for (int k = 0; k < 12; ++k) {
    EXPECT_EQ(noisy.delta->dz[k], silent.delta->dz[k]);
    EXPECT_EQ(noisy.delta->dx[k], silent.delta->dx[k]);
  }
}

TEST(Simulate, SeedDeterminesTrace) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 2);
  const auto a = simulate(real, std::nullopt, 77, 50);
  const auto b = simulate(real, std::nullopt, 77, 50);
  EXPECT_EQ(a.nominal.statistic, b.nominal.statistic);
  EXPECT_NE(a.nominal.statistic, simulate(real, std::nullopt, 78, 50).nominal.statistic);
}

TEST(Simulate, RejectsUnstableFilter) {
  auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 2);
  real.A *= 3.0;
  real.K.setZero();
  EXPECT_THROW(simulate(real, std::nullopt, 1, 5), InvalidInput);
}

TEST(Detector, FalseAlarmRateTracksThreshold) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0}, {}, 1)), 4);
  EXPECT_GT(false_alarm_rate(real, 0.0, 2000, 1), 0.99);
  EXPECT_EQ(false_alarm_rate(real, 1e6, 2000, 1), 0.0);
  EXPECT_NEAR(false_alarm_rate(real, real.eta, 20000, 1), 0.05, 0.02);
}

TEST(Detector, ResidueCovarianceMatchesSampleCovariance) {
  const DcsTopology t(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {2, 0}}, {0, 2});
  const auto real = realize(StructuredSystem(t, AttackScenario({1}, {}, 1)), 6);
  const int burn = 1000;
  const int samples = 100000;
  const auto run = simulate(real, std::nullopt, 9, burn + samples);
  MatrixXd acc = MatrixXd::Zero(2, 2);
  for (int k = burn; k < burn + samples; ++k) acc += run.nominal.z[k] * run.nominal.z[k].transpose();
  acc /= samples;
  EXPECT_LT((acc - real.P).norm(), 0.1 * real.P.norm());
}

TEST(RealizationIo, RoundTripIsExact) {
  const DcsTopology t(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}}, {1, 2});
  const auto real = realize(StructuredSystem(t, AttackScenario({0}, {1}, 2)), 8);
  std::stringstream buffer;
  write_realization(buffer, real);
  const auto back = read_realization(buffer);
  EXPECT_EQ(back.A, real.A);
  EXPECT_EQ(back.B, real.B);
  EXPECT_EQ(back.C, real.C);
  EXPECT_EQ(back.D, real.D);
  EXPECT_EQ(back.K, real.K);
  EXPECT_EQ(back.P, real.P);
  EXPECT_EQ(back.eta, real.eta);
}

TEST(RealizationIo, RejectsTruncatedInput) {
  std::stringstream in("eta 3\nmatrix A 2 2\n1 2 3\n");
  EXPECT_THROW(read_realization(in), InvalidInput);
  std::stringstream missing("matrix A 1 1 0.5\n");
  EXPECT_THROW(read_realization(missing), InvalidInput);
}

TEST(TraceCsv, HeaderListsAttackColumns) {
  const auto real = realize(StructuredSystem(chain3(), AttackScenario({0, 1}, {}, 2)), 2);
  const auto run = simulate(real, InputSequence(3, VectorXd::Ones(2)), 1, 3);
  std::stringstream out;
  write_trace_csv(out, run);
  std::string header;
  std::getline(out, header);
  EXPECT_EQ(header.rfind("k,x1,x2,x3,", 0), 0U);
  EXPECT_NE(header.find("u1,u2"), std::string::npos);
  int lines = 0;
  for (std::string line; std::getline(out, line);) ++lines;
  EXPECT_EQ(lines, 3);
}

}  // namespace
}  // namespace stealthguard
