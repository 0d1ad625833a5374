#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "fcmm/oracle.hpp"
#include "fcmm/solvers.hpp"

namespace fcmm {
namespace {

constexpr double kFloor = 1e-12;

DataMatrix iris() {
  return standardize(
      load_csv(std::filesystem::path(FCMM_DATA_DIR) / "iris.csv", {4}, true));
}

DataMatrix blobs() { return standardize(make_blobs(synthetic_preset("blobs-small"))); }

double max_abs_diff(const MembershipMatrix& a, const MembershipMatrix& b) {
  double worst = 0;
  for (std::size_t q = 0; q < a.values().size(); ++q) {
    worst = std::max(worst, std::abs(a.values()[q] - b.values()[q]));
  }
  return worst;
}

void expect_non_increasing(const std::vector<TraceRecord>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double prev = trace[k - 1].objective;
    EXPECT_LE(trace[k].objective, prev + 1e-12 * (1 + std::abs(prev)))
        << "step " << k;
  }
}

TEST(Config, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.exponent, 2.0);
  auto bad = [](auto mutate) {
    SolverConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), std::invalid_argument);
  };
  bad([](SolverConfig& c) { c.clusters = 1; });
  bad([](SolverConfig& c) { c.exponent = 1.0; });
  bad([](SolverConfig& c) { c.outer_tol = 0; });
  bad([](SolverConfig& c) { c.inner_tol = -1; });
  bad([](SolverConfig& c) { c.max_outer_iters = 0; });
  bad([](SolverConfig& c) { c.max_inner_iters = 0; });
  bad([](SolverConfig& c) { c.dist_floor = 0; });
}

TEST(Config, ShapeMismatchRejected) {
  const DataMatrix data = blobs();
  SolverConfig cfg;
  EXPECT_THROW(solve_fcm_mm(data, init_random(data.rows(), 2, 0), cfg),
               std::invalid_argument);
  EXPECT_THROW(solve_fcm_mm(data, init_random(5, 3, 0), cfg), std::invalid_argument);
}

TEST(Names, RoundTrip) {
  for (Algorithm a : {Algorithm::classic, Algorithm::irw, Algorithm::mm}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_THROW(parse_algorithm("kmeans"), std::invalid_argument);
  EXPECT_EQ(to_string(Termination::degenerate), "degenerate");
}

TEST(Brackets, InverseDistanceRule) {
  std::vector<double> f(2);
  memberships_from_brackets(std::vector<double>{1.0, 4.0}, 2.0, kFloor, f);
  EXPECT_NEAR(f[0], 0.8, 1e-15);
  EXPECT_NEAR(f[1], 0.2, 1e-15);
}

TEST(Brackets, ZeroSplitsUniformly) {
  std::vector<double> f(4);
  memberships_from_brackets(std::vector<double>{3.0, 0.0, -1e-16, 2.0}, 2.0,
                            kFloor, f);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.5);
  EXPECT_EQ(f[2], 0.5);
  EXPECT_EQ(f[3], 0.0);
}

TEST(Classic, ScalarExample) {
  const DataMatrix x(1, 1, {0.0});
  const ClusterCenters m{2, 1, {1.0, 2.0}};
  const MembershipMatrix f = update_membership_classic(x, m, 2.0, kFloor);
  EXPECT_NEAR(f(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(f(0, 1), 0.2, 1e-15);
}

TEST(Classic, EquidistantAndCoincident) {
  const DataMatrix x(2, 2, {0, 0, 1, 0});
  const ClusterCenters m{3, 2, {1, 0, -1, 0, 0, 1}};
  const MembershipMatrix f = update_membership_classic(x, m, 2.0, kFloor);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(f(0, j), 1.0 / 3, 1e-15);
  EXPECT_EQ(f(1, 0), 1.0);
  EXPECT_EQ(f(1, 1), 0.0);
  EXPECT_EQ(f(1, 2), 0.0);
}

TEST(Classic, TwoBlobsRecovered) {
  SyntheticSpec spec;
  spec.blob_count = 2;
  spec.points_per_blob = 40;
  spec.seed = 21;
  const LabeledBlobs lb = make_labeled_blobs(spec);
  SolverConfig cfg;
  cfg.clusters = 2;
  const SolverResult res = solve_fcm_classic(lb.data, init_random(80, 2, 2), cfg);
  EXPECT_EQ(res.termination, Termination::converged);
  for (std::size_t b = 0; b < 2; ++b) {
    std::vector<double> mean(2, 0.0);
    for (std::size_t i = 0; i < 80; ++i) {
      if (lb.labels[i] != b) continue;
      mean[0] += lb.data.at(i, 0) / 40;
      mean[1] += lb.data.at(i, 1) / 40;
    }
    double best = 1e300;
    for (std::size_t j = 0; j < 2; ++j) {
      best = std::min(best, std::hypot(res.centers.row(j)[0] - mean[0],
                                       res.centers.row(j)[1] - mean[1]));
    }
    EXPECT_LT(best, 0.5);
  }
}

TEST(Classic, DescendsOnIris) {
  const DataMatrix data = iris();
  const SolverResult res = solve_fcm_classic(data, init_random(150, 3, 42), {});
  expect_non_increasing(res.trace);
}

TEST(FixedPoint, ClassicAndMmStopQuickly) {
  const DataMatrix data = iris();
  SolverConfig tight;
  tight.outer_tol = 1e-15;
  tight.max_outer_iters = 5000;
  const SolverResult settled = solve_fcm_classic(data, init_random(150, 3, 1), tight);
  SolverConfig cfg;
  for (Algorithm a : {Algorithm::classic, Algorithm::mm}) {
    const SolverResult res = solve(a, data, settled.memberships, cfg);
    EXPECT_EQ(res.termination, Termination::converged);
    EXPECT_LE(res.trace.back().outer_iter, 2u);
    const double prev = res.trace[res.trace.size() - 2].objective;
    EXPECT_LE(std::abs(res.trace.back().objective - prev),
              cfg.outer_tol * (1 + std::abs(prev)));
  }
}

TEST(IrwAuxiliary, SinglePointCluster) {
  const DataMatrix x(2, 2, {3, 4, 1, -2});
  PowerMembership g{2, 2, 2.0, {1, 0, 0, 1}, {1, 1}};
  const IrwAuxiliary aux = irw_auxiliary(x, g);
  EXPECT_NEAR(aux.scales[0], 5.0, 1e-15);
  EXPECT_NEAR(aux.direction(0)[0], 25.0 / 5, 1e-14);
  EXPECT_NEAR(aux.direction(0)[1], (3.0 - 8.0) / 5, 1e-14);
}

TEST(IrwAuxiliary, RankOneData) {
  const DataMatrix x(3, 2, {1, 2, 1, 2, 1, 2});
  const IrwAuxiliary aux = irw_auxiliary(x, to_power(init_random(3, 2, 5), 2.0));
  const double norm = std::sqrt(5.0);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(aux.scales[j], norm, 1e-14);
    for (double a : aux.direction(j)) EXPECT_NEAR(a, norm, 1e-14);
  }
}

TEST(IrwAuxiliary, ZeroImageIsDegenerate) {
  const DataMatrix x(2, 1, {-1, 1});
  PowerMembership g{2, 2, 2.0, {0.25, 0.25, 0.25, 0.25}, {0.5, 0.5}};
  EXPECT_THROW(irw_auxiliary(x, g), DegenerateClusterError);
}

TEST(IrwUpdate, EqualBracketsGiveUniformRows) {
  const DataMatrix x(1, 1, {0.0});
  IrwAuxiliary aux{3, 1, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5}};
  const MembershipMatrix f = update_membership_irw(x, aux, 2.0, kFloor);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(f(0, j), 1.0 / 3, 1e-15);
}

TEST(IrwUpdate, NonPositiveBracketTakesTheRow) {
  // bracket_j = 1 + s^2 - 2 s a: 1 + 1 - 2 = 0 for j = 0, positive for j = 1.
  const DataMatrix x(1, 1, {1.0});
  IrwAuxiliary aux{2, 1, {1.0, 2.0}, {1.0 + 1e-17, 0.0}};
  const MembershipMatrix f = update_membership_irw(x, aux, 2.0, kFloor);
  EXPECT_EQ(f(0, 0), 1.0);
  EXPECT_EQ(f(0, 1), 0.0);
}

TEST(IrwUpdate, MatchesClassicAtAnchorCenters) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto inst = oracle::random_instance(rng, 5, 50, 5, 5);
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    const MembershipMatrix irw = update_membership_irw(
        inst.data, irw_auxiliary(inst.data, g), inst.exponent, kFloor);
    const MembershipMatrix classic = update_membership_classic(
        inst.data, compute_centers(aggregates(inst.data, g)), inst.exponent, kFloor);
    EXPECT_LE(max_abs_diff(irw, classic), 1e-12);
  }
}

TEST(MmUpdate, MatchesIrwAndClassic) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 50; ++t) {
    const auto inst = oracle::random_instance(rng, 5, 50, 5, 5);
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    const MembershipMatrix mm = update_membership_mm(inst.data, g, inst.exponent, kFloor);
    EXPECT_LE(max_abs_diff(mm, update_membership_irw(inst.data,
                                                     irw_auxiliary(inst.data, g),
                                                     inst.exponent, kFloor)),
              1e-12);
    EXPECT_LE(max_abs_diff(mm, update_membership_classic(
                                   inst.data, compute_centers(aggregates(inst.data, g)),
                                   inst.exponent, kFloor)),
              1e-12);
  }
}

TEST(MmUpdate, SymmetricInstanceUniform) {
  const DataMatrix x(2, 1, {-1, 1});
  const MembershipMatrix f = update_membership_mm(
      x, to_power(MembershipMatrix(2, 2, {0.5, 0.5, 0.5, 0.5}), 2.0), 2.0, kFloor);
  for (double v : f.values()) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Irw, HugeInnerTolFollowsMm) {
  for (const DataMatrix& data : {iris(), blobs()}) {
    const MembershipMatrix f0 = init_random(data.rows(), 3, 77);
    SolverConfig cfg;
    cfg.inner_tol = 1e300;
    std::vector<MembershipMatrix> irw_path, mm_path;
    const SolverResult irw = solve_irw_fcm(
        data, f0, cfg, [&](std::size_t, std::size_t, const MembershipMatrix& f) {
          irw_path.push_back(f);
        });
    solve_fcm_mm(data, f0, cfg, [&](std::size_t, std::size_t, const MembershipMatrix& f) {
      mm_path.push_back(f);
    });
    for (const TraceRecord& rec : irw.trace) {
      if (rec.outer_iter > 0) EXPECT_EQ(rec.inner_iters, 1u);
    }
    ASSERT_EQ(irw_path.size(), mm_path.size());
    for (std::size_t k = 0; k < mm_path.size(); ++k) {
      EXPECT_LE(max_abs_diff(irw_path[k], mm_path[k]), 1e-12) << "iteration " << k;
    }
  }
}

TEST(Irw, FinalObjectiveMatchesMmOnIris) {
  const DataMatrix data = iris();
  const MembershipMatrix f0 = init_random(150, 3, 42);
  const SolverResult irw = solve_irw_fcm(data, f0, {});
  const SolverResult mm = solve_fcm_mm(data, f0, {});
  EXPECT_LE(std::abs(irw.objective - mm.objective) / std::abs(mm.objective), 1e-6);
  expect_non_increasing(irw.trace);
  expect_non_increasing(mm.trace);
}

TEST(Trace, CountsAndFinalObjective) {
  const DataMatrix data = blobs();
  const MembershipMatrix f0 = init_random(data.rows(), 3, 4);
  for (Algorithm a : {Algorithm::classic, Algorithm::irw, Algorithm::mm}) {
    const SolverResult res = solve(a, data, f0, {});
    ASSERT_GE(res.trace.size(), 2u);
    EXPECT_EQ(res.trace[0].outer_iter, 0u);
    EXPECT_EQ(res.trace[0].membership_updates, 0u);
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
      EXPECT_GT(res.trace[k].membership_updates, res.trace[k - 1].membership_updates);
      EXPECT_GE(res.trace[k].elapsed_ns, res.trace[k - 1].elapsed_ns);
      if (a != Algorithm::irw) EXPECT_EQ(res.trace[k].inner_iters, 0u);
    }
    const double recomputed = phi(data, to_power(res.memberships, 2.0));
    EXPECT_LE(std::abs(res.objective - recomputed), 1e-12 * std::abs(recomputed));
    EXPECT_EQ(res.objective, res.trace.back().objective);
  }
}

TEST(Trace, DeterministicApartFromTiming) {
  const DataMatrix data = iris();
  const MembershipMatrix f0 = init_random(150, 3, 6);
  for (Algorithm a : {Algorithm::classic, Algorithm::irw, Algorithm::mm}) {
    const SolverResult r1 = solve(a, data, f0, {});
    const SolverResult r2 = solve(a, data, f0, {});
    ASSERT_EQ(r1.trace.size(), r2.trace.size());
    for (std::size_t k = 0; k < r1.trace.size(); ++k) {
      EXPECT_EQ(r1.trace[k].objective, r2.trace[k].objective);
      EXPECT_EQ(r1.trace[k].membership_updates, r2.trace[k].membership_updates);
      EXPECT_EQ(r1.trace[k].inner_iters, r2.trace[k].inner_iters);
    }
    EXPECT_EQ(r1.memberships, r2.memberships);
  }
}

TEST(Degenerate, PointsOnCentersStayOnSimplex) {
  const DataMatrix x(4, 1, {1, 1, 4, 4});
  const MembershipMatrix f0(4, 2, {1, 0, 1, 0, 0, 1, 0, 1});
  for (Algorithm a : {Algorithm::classic, Algorithm::irw, Algorithm::mm}) {
    std::size_t seen = 0;
    const SolverResult res =
        solve(a, x, f0, SolverConfig{.clusters = 2},
              [&](std::size_t, std::size_t, const MembershipMatrix& f) {
                EXPECT_TRUE(validate(f).passed);
                ++seen;
              });
    EXPECT_GE(seen, 2u);
    EXPECT_EQ(res.memberships, f0) << to_string(a);
    EXPECT_EQ(res.objective, 0.0);
  }
}

TEST(Degenerate, EmptyClusterEndsTheRun) {
  const DataMatrix x(3, 1, {0, 1, 2});
  const MembershipMatrix f0(3, 2, {1, 0, 1, 0, 1, 0});
  const SolverResult res = solve_fcm_mm(x, f0, SolverConfig{.clusters = 2});
  EXPECT_EQ(res.termination, Termination::degenerate);
  EXPECT_FALSE(res.message.empty());
  EXPECT_EQ(res.trace.size(), 0u);
}

TEST(Degenerate, DataAtOriginStopsIrwOnly) {
  const DataMatrix x(4, 2, std::vector<double>(8, 0.0));
  const MembershipMatrix f0 = init_random(4, 2, 3);
  const SolverResult irw = solve_irw_fcm(x, f0, SolverConfig{.clusters = 2});
  EXPECT_EQ(irw.termination, Termination::degenerate);
  EXPECT_EQ(irw.memberships, f0);
  for (Algorithm a : {Algorithm::classic, Algorithm::mm}) {
    const SolverResult res = solve(a, x, f0, SolverConfig{.clusters = 2});
    EXPECT_EQ(res.termination, Termination::converged);
    EXPECT_TRUE(validate(res.memberships).passed);
    EXPECT_EQ(res.objective, 0.0);
  }
}

TEST(UpdatesToReach, FirstRecordInsideBand) {
  std::vector<TraceRecord> trace{{0, 10.0, 0, 0, 0}, {1, 5.0, 0, 3, 3},
                                 {2, 1.0 + 1e-7, 0, 5, 2}, {3, 1.0, 0, 6, 1}};
  EXPECT_EQ(updates_to_reach(trace, 1.0, 1e-6), 5u);
  EXPECT_EQ(updates_to_reach(trace, 0.5, 1e-6), std::nullopt);
}

}  // namespace
}  // namespace fcmm
