#include "fcmm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fcmm/objective.hpp"

namespace fcmm::oracle {
namespace {

// Plain weighted sum of one column of G, ascending index.
double column_mass(const PowerMembership& power, std::size_t j) {
  double mass = 0.0;
  for (std::size_t i = 0; i < power.points; ++i) mass += power(i, j);
  return mass;
}

std::vector<double> column(const PowerMembership& power, std::size_t j) {
  std::vector<double> out(power.points);
  for (std::size_t i = 0; i < power.points; ++i) out[i] = power(i, j);
  return out;
}

double quad_with_gram(const std::vector<double>& gram,
                      std::span<const double> g) {
  const std::size_t n = g.size();
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < n; ++b) row += gram[a * n + b] * g[b];
    total += g[a] * row;
  }
  return total;
}

double max_abs_diff(const MembershipMatrix& a, const MembershipMatrix& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
  }
  return worst;
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n,
                                   double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> g(n);
  for (double& v : g) v = dist(rng);
  return g;
}

MembershipMatrix mix(const MembershipMatrix& base, const MembershipMatrix& noise,
                     double weight) {
  std::vector<double> values(base.values().size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = (1.0 - weight) * base.values()[k] + weight * noise.values()[k];
  }
  return MembershipMatrix(base.points(), base.clusters(), std::move(values));
}

DataMatrix standardized_blobs_small() {
  return standardize(make_blobs(synthetic_preset("blobs-small")));
}

}  // namespace

OracleReport make_report(std::string name, double max_error, double tolerance,
                         std::size_t samples) {
  return {std::move(name), max_error, tolerance, samples,
          std::isfinite(max_error) && max_error <= tolerance};
}

std::ostream& operator<<(std::ostream& os, const OracleReport& report) {
  const auto flags = os.flags();
  os << (report.passed ? "PASS " : "FAIL ") << std::left << std::setw(34)
     << report.check_name << std::right << " max_error=" << std::scientific
     << std::setprecision(3) << report.max_error << " tol=" << report.tolerance
     << " samples=" << report.samples;
  os.flags(flags);
  return os;
}

double relative_error(double value, double reference) {
  return std::abs(value - reference) / (1.0 + std::abs(reference));
}

std::vector<double> gram_matrix(const DataMatrix& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  std::vector<double> gram(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += data.at(a, k) * data.at(b, k);
      gram[a * n + b] = acc;
    }
  }
  return gram;
}

double gram_quad_oracle(const DataMatrix& data, std::span<const double> weights) {
  return quad_with_gram(gram_matrix(data), weights);
}

std::vector<double> finite_diff_gradient(const DataMatrix& data,
                                         std::span<const double> weights,
                                         double step) {
  const std::vector<double> gram = gram_matrix(data);
  auto ratio = [&gram](const std::vector<double>& g) {
    double mass = 0.0;
    for (double v : g) mass += v;
    return quad_with_gram(gram, g) / mass;
  };
  std::vector<double> probe(weights.begin(), weights.end());
  std::vector<double> grad(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + step;
    const double up = ratio(probe);
    probe[k] = saved - step;
    const double down = ratio(probe);
    probe[k] = saved;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

double reference_phi(const DataMatrix& data, const PowerMembership& power) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  double total = 0.0;
  std::vector<double> center(d);
  for (std::size_t j = 0; j < power.clusters; ++j) {
    const double mass = column_mass(power, j);
    std::fill(center.begin(), center.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) center[k] += power(i, j) * data.at(i, k);
    }
    for (double& v : center) v /= mass;
    for (std::size_t i = 0; i < n; ++i) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = data.at(i, k) - center[k];
        dist += diff * diff;
      }
      total += power(i, j) * dist;
    }
  }
  return total;
}

OracleReport surrogate_argmin_oracle(const DataMatrix& data,
                                     const PowerMembership& anchor,
                                     double exponent, std::size_t trials,
                                     std::uint64_t seed) {
  const MembershipMatrix best =
      update_membership_mm(data, anchor, exponent, 1e-12);
  const double h_best = majorizer_h(data, to_power(best, exponent), anchor);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_weight(-6.0, -1.0);
  double worst = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const MembershipMatrix noise =
        init_random(best.points(), best.clusters(), rng());
    MembershipMatrix candidate = noise;
    if (t == 0) {
      candidate = best;
    } else if (t % 2 == 1) {
      candidate = mix(best, noise, std::pow(10.0, log_weight(rng)));
    }
    try {
      const double h = majorizer_h(data, to_power(candidate, exponent), anchor);
      worst = std::max(worst, (h_best - h) / (1.0 + std::abs(h_best)));
      ++evaluated;
    } catch (const DegenerateClusterError&) {
      // a perturbation of a degenerate minimizer; not a feasible G
    }
  }
  return make_report("surrogate_argmin", worst, 1e-9, evaluated);
}

OracleReport descent_chain_audit(const DataMatrix& data,
                                 const MembershipMatrix& initial,
                                 const SolverConfig& cfg, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("descent_chain_audit: steps >= 1");
  SolverConfig audit_cfg = cfg;
  audit_cfg.max_outer_iters = steps;
  audit_cfg.outer_tol = std::numeric_limits<double>::min();

  std::vector<MembershipMatrix> iterates;
  solve_fcm_mm(data, initial, audit_cfg,
               [&iterates](std::size_t, std::size_t, const MembershipMatrix& f) {
                 iterates.push_back(f);
               });
  // The solver stops once phi stops changing at all; keep stepping from that
  // fixed point so exactly `steps` transitions are audited.
  while (iterates.size() < steps + 1) {
    iterates.push_back(update_membership_mm(
        data, to_power(iterates.back(), cfg.exponent), cfg.exponent,
        cfg.dist_floor));
  }

  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t t = 0; t + 1 < iterates.size(); ++t) {
    const PowerMembership g_now = to_power(iterates[t], cfg.exponent);
    const PowerMembership g_next = to_power(iterates[t + 1], cfg.exponent);
    const double phi_now = phi(data, g_now);
    const double phi_next = phi(data, g_next);
    const double h_next = majorizer_h(data, g_next, g_now);
    const double h_now = majorizer_h(data, g_now, g_now);
    const double scale = 1.0 + std::abs(phi_now);
    worst = std::max({worst, (phi_next - h_next) / scale,
                      (h_next - h_now) / scale,
                      std::abs(h_now - phi_now) / scale});
    ++checked;
  }
  return make_report("descent_chain", worst, 1e-10, checked);
}

RandomInstance random_instance(std::mt19937_64& rng, std::size_t min_n,
                               std::size_t max_n, std::size_t max_d,
                               std::size_t max_c) {
  static constexpr double kExponents[] = {1.5, 2.0, 3.0};
  std::uniform_int_distribution<std::size_t> pick_n(min_n, max_n);
  std::uniform_int_distribution<std::size_t> pick_d(1, max_d);
  std::uniform_int_distribution<std::size_t> pick_c(2, max_c);
  std::uniform_int_distribution<std::size_t> pick_r(0, 2);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = pick_n(rng);
  const std::size_t d = pick_d(rng);
  const std::size_t c = pick_c(rng);
  const double r = kExponents[pick_r(rng)];
  std::vector<double> values(n * d);
  for (double& v : values) v = normal(rng);
  return {DataMatrix(n, d, std::move(values)), init_random(n, c, rng()), r};
}

OracleReport check_single_step_equivalence(std::size_t instances,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 50, 5, 5);
    const PowerMembership anchor = to_power(inst.memberships, inst.exponent);
    const MembershipMatrix mm =
        update_membership_mm(inst.data, anchor, inst.exponent, 1e-12);
    const MembershipMatrix irw = update_membership_irw(
        inst.data, irw_auxiliary(inst.data, anchor), inst.exponent, 1e-12);
    worst = std::max(worst, max_abs_diff(mm, irw));
  }
  return make_report("single_step_mm_vs_irw", worst, 1e-12, instances);
}

OracleReport check_classic_step_coincidence(std::size_t instances,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 50, 5, 5);
    const PowerMembership anchor = to_power(inst.memberships, inst.exponent);
    const MembershipMatrix mm =
        update_membership_mm(inst.data, anchor, inst.exponent, 1e-12);
    const MembershipMatrix classic = update_membership_classic(
        inst.data, compute_centers(aggregates(inst.data, anchor)), inst.exponent,
        1e-12);
    worst = std::max(worst, max_abs_diff(mm, classic));
  }
  return make_report("single_step_mm_vs_classic", worst, 1e-12, instances);
}

OracleReport check_classic_trajectory_coincidence(std::size_t instances,
                                                  std::size_t iterations,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 10, 60, 4, 4);
    // Both paths take exactly `iterations` steps, each from its own iterate.
    MembershipMatrix classic = inst.memberships;
    MembershipMatrix mm = inst.memberships;
    for (std::size_t k = 0; k < iterations; ++k) {
      classic = update_membership_classic(
          inst.data,
          compute_centers(aggregates(inst.data, to_power(classic, inst.exponent))),
          inst.exponent, 1e-12);
      mm = update_membership_mm(inst.data, to_power(mm, inst.exponent),
                                inst.exponent, 1e-12);
      worst = std::max(worst, max_abs_diff(classic, mm));
      ++compared;
    }
  }
  return make_report("trajectory_mm_vs_classic", worst, 1e-12, compared);
}

OracleReport check_tangency(std::size_t anchors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < anchors; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 40, 4, 4);
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    const double reference = reference_phi(inst.data, g);
    worst = std::max(worst,
                     relative_error(majorizer_h(inst.data, g, g), reference));
  }
  return make_report("tangency", worst, 1e-10, anchors);
}

OracleReport check_domination(std::size_t anchors,
                              std::size_t samples_per_anchor,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t samples = 0;
  for (std::size_t t = 0; t < anchors; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 40, 4, 4);
    const PowerMembership anchor = to_power(inst.memberships, inst.exponent);
    for (std::size_t s = 0; s < samples_per_anchor; ++s) {
      const PowerMembership g = to_power(
          init_random(inst.data.rows(), inst.memberships.clusters(), rng()),
          inst.exponent);
      const double reference = reference_phi(inst.data, g);
      const double bound = majorizer_h(inst.data, g, anchor);
      worst = std::max(worst, (reference - bound) / (1.0 + std::abs(reference)));
      ++samples;
    }
  }
  return make_report("domination", worst, 1e-9, samples);
}

OracleReport check_gradient(std::size_t points, double step,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t t = 0; t < points; ++t) {
    const std::size_t n = 15;
    const std::size_t d = 3;
    std::vector<double> values(n * d);
    for (double& v : values) v = normal(rng);
    const DataMatrix data(n, d, std::move(values));
    // interior point: every weight well away from the simplex boundary
    const std::vector<double> g = random_weights(rng, n, 0.05, 1.0);
    const std::vector<double> analytic = tangent_gradient(data, g);
    const std::vector<double> numeric = finite_diff_gradient(data, g, step);
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, relative_error(numeric[k], analytic[k]));
    }
  }
  return make_report("gradient_vs_finite_diff", worst, 1e-6, points);
}

OracleReport check_gram_quad(std::size_t instances, std::size_t max_n,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 2, max_n, 5, 5);
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    const ClusterAggregates agg = aggregates(inst.data, g);
    const std::vector<double> gram = gram_matrix(inst.data);
    for (std::size_t j = 0; j < g.clusters; ++j) {
      const double reference = quad_with_gram(gram, column(g, j));
      worst = std::max(worst, relative_error(agg.sum_norm_sq[j], reference));
    }
  }
  return make_report("gram_free_quad", worst, 1e-10, instances);
}

OracleReport check_gram_directions(std::size_t instances, std::size_t max_n,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 2, max_n, 5, 5);
    const std::size_t n = inst.data.rows();
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    const IrwAuxiliary aux = irw_auxiliary(inst.data, g);
    const std::vector<double> gram = gram_matrix(inst.data);
    for (std::size_t j = 0; j < g.clusters; ++j) {
      const std::vector<double> w = column(g, j);
      const double norm = std::sqrt(quad_with_gram(gram, w));
      const double scale_ref = norm / column_mass(g, j);
      worst = std::max(worst, relative_error(aux.scales[j], scale_ref));
      for (std::size_t a = 0; a < n; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < n; ++b) row += gram[a * n + b] * w[b];
        worst = std::max(worst,
                         relative_error(aux.direction(j)[a], row / norm));
      }
    }
  }
  return make_report("gram_free_directions", worst, 1e-10, instances);
}

OracleReport check_phi_reference(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < instances; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 50, 5, 5);
    const PowerMembership g = to_power(inst.memberships, inst.exponent);
    worst = std::max(worst,
                     relative_error(phi(inst.data, g), reference_phi(inst.data, g)));
  }
  return make_report("phi_vs_explicit_centers", worst, 1e-10, instances);
}

OracleReport check_surrogate_argmin(std::size_t anchors, std::size_t trials,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t samples = 0;
  for (std::size_t t = 0; t < anchors; ++t) {
    const RandomInstance inst = random_instance(rng, 5, 30, 3, 4);
    const OracleReport one = surrogate_argmin_oracle(
        inst.data, to_power(inst.memberships, inst.exponent), inst.exponent,
        trials, rng());
    worst = std::max(worst, one.max_error);
    samples += one.samples;
  }
  return make_report("surrogate_argmin", worst, 1e-9, samples);
}

std::vector<OracleReport> run_validation_suite(
    SuiteScale scale, const std::optional<std::filesystem::path>& iris_csv) {
  const bool full = scale == SuiteScale::full;
  std::vector<OracleReport> reports;
  reports.push_back(check_gram_quad(full ? 50 : 20, full ? 100 : 30, 11));
  reports.push_back(check_gram_directions(full ? 50 : 20, full ? 100 : 30, 12));
  reports.push_back(check_phi_reference(full ? 100 : 30, 13));
  reports.push_back(check_gradient(full ? 50 : 20, 1e-5, 14));
  reports.push_back(check_tangency(full ? 50 : 20, 15));
  reports.push_back(check_domination(20, full ? 50 : 25, 16));
  reports.push_back(check_surrogate_argmin(full ? 10 : 4, full ? 1000 : 200, 17));
  reports.push_back(check_single_step_equivalence(100, full ? 118 : 18));
  reports.push_back(check_classic_step_coincidence(100, full ? 119 : 19));
  reports.push_back(
      check_classic_trajectory_coincidence(full ? 20 : 5, full ? 100 : 30, 20));

  SolverConfig cfg;
  const DataMatrix blobs = standardized_blobs_small();
  OracleReport blobs_audit = descent_chain_audit(
      blobs, init_random(blobs.rows(), cfg.clusters, 0), cfg, full ? 100 : 50);
  blobs_audit.check_name = "descent_chain_blobs";
  reports.push_back(blobs_audit);

  if (iris_csv) {
    const DataMatrix iris = standardize(load_csv(*iris_csv, {4}, true));
    OracleReport iris_audit = descent_chain_audit(
        iris, init_random(iris.rows(), cfg.clusters, 0), cfg, 100);
    iris_audit.check_name = "descent_chain_iris";
    reports.push_back(iris_audit);
  }
  return reports;
}

}  // namespace fcmm::oracle
