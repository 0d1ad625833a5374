#include "fcmm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fcmm/kernels.hpp"

namespace fcmm {
namespace {

using Clock = std::chrono::steady_clock;

void check_exponent(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("fuzziness exponent must be > 1");
  }
}

// brackets is clusters x points; fills memberships row by row.
MembershipMatrix memberships_from_bracket_columns(
    const std::vector<double>& brackets, std::size_t points,
    std::size_t clusters, double exponent, double dist_floor) {
  std::vector<double> values(points * clusters);
  std::vector<double> row(clusters);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < clusters; ++j) row[j] = brackets[j * points + i];
    memberships_from_brackets(row, exponent, dist_floor,
                              {values.data() + i * clusters, clusters});
  }
  return MembershipMatrix(points, clusters, std::move(values));
}

double max_abs_change(const MembershipMatrix& a, const MembershipMatrix& b) {
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    worst = std::max(worst, std::abs(av[k] - bv[k]));
  }
  return worst;
}

bool converged(double previous, double current, double tol) {
  return std::abs(previous - current) <= tol * (1.0 + std::abs(previous));
}

// One outer step: returns the next memberships and the number of closed-form
// updates it took. Throws DegenerateClusterError.
using OuterStep = std::function<MembershipMatrix(
    const MembershipMatrix& current, std::size_t outer, std::size_t& updates)>;

SolverResult run_outer_loop(const DataMatrix& data,
                            const MembershipMatrix& initial,
                            const SolverConfig& cfg,
                            const IterateObserver& observer, bool double_loop,
                            const OuterStep& step) {
  cfg.validate();
  if (initial.points() != data.rows() || initial.clusters() != cfg.clusters) {
    throw std::invalid_argument("initial memberships do not match data / cfg");
  }
  const auto start = Clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                                start);
  };

  SolverResult result{initial, {}, 0.0, {}, Termination::max_iters, {}, {}};
  if (observer) observer(0, 0, initial);

  std::optional<ClusterAggregates> agg;
  try {
    agg = aggregates(data, to_power(initial, cfg.exponent));
  } catch (const DegenerateClusterError& err) {
    result.termination = Termination::degenerate;
    result.message = err.what();
    result.wall_time = elapsed();
    return result;
  }
  double objective = phi(*agg);
  result.trace.push_back({0, objective, elapsed().count(), 0, 0});

  std::size_t total_updates = 0;
  MembershipMatrix current = initial;
  for (std::size_t outer = 1; outer <= cfg.max_outer_iters; ++outer) {
    std::size_t updates = 0;
    double next_objective = 0.0;
    std::optional<MembershipMatrix> next;
    try {
      next = step(current, outer, updates);
      agg = aggregates(data, to_power(*next, cfg.exponent));
      next_objective = phi(*agg);
    } catch (const DegenerateClusterError& err) {
      result.termination = Termination::degenerate;
      result.message = err.what();
      break;
    }
    total_updates += updates;
    result.trace.push_back({outer, next_objective, elapsed().count(),
                            total_updates, double_loop ? updates : 0});
    const bool done = converged(objective, next_objective, cfg.outer_tol);
    current = std::move(*next);
    objective = next_objective;
    if (done) {
      result.termination = Termination::converged;
      break;
    }
  }

  // agg always describes `current` here: a degenerate step never assigns it.
  result.centers = compute_centers(*agg);
  result.objective = objective;
  result.memberships = std::move(current);
  result.wall_time = elapsed();
  return result;
}

}  // namespace

void SolverConfig::validate() const {
  if (clusters < 2) throw std::invalid_argument("need at least 2 clusters");
  check_exponent(exponent);
  if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be > 0");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be > 0");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters < 1");
  if (max_inner_iters < 1) throw std::invalid_argument("max_inner_iters < 1");
  if (!(dist_floor > 0.0)) throw std::invalid_argument("dist_floor must be > 0");
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::converged:
      return "converged";
    case Termination::max_iters:
      return "max_iters";
    case Termination::degenerate:
      return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::classic:
      return "classic";
    case Algorithm::irw:
      return "irw";
    case Algorithm::mm:
      return "mm";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "classic") return Algorithm::classic;
  if (name == "irw") return Algorithm::irw;
  if (name == "mm") return Algorithm::mm;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

void memberships_from_brackets(std::span<const double> brackets, double exponent,
                               double dist_floor, std::span<double> out) {
  const std::size_t c = brackets.size();
  std::size_t near = 0;
  double smallest = std::max(brackets[0], 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    const double b = std::max(brackets[j], 0.0);
    if (b < dist_floor) ++near;
    smallest = std::min(smallest, b);
  }
  if (near > 0) {
    const double share = 1.0 / static_cast<double>(near);
    for (std::size_t j = 0; j < c; ++j) {
      out[j] = std::max(brackets[j], 0.0) < dist_floor ? share : 0.0;
    }
    return;
  }
  // (b_j / b_min)^(1/(1-r)) keeps every weight in (0, 1].
  const double power = 1.0 / (exponent - 1.0);
  double total = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    out[j] = std::pow(smallest / brackets[j], power);
    total += out[j];
  }
  for (std::size_t j = 0; j < c; ++j) out[j] /= total;
}

MembershipMatrix update_membership_classic(const DataMatrix& data,
                                           const ClusterCenters& centers,
                                           double exponent, double dist_floor) {
  check_exponent(exponent);
  if (centers.dim != data.cols()) {
    throw std::invalid_argument("centers and data differ in dimension");
  }
  const std::size_t n = data.rows();
  const std::size_t c = centers.clusters;
  const auto& k = kernels::active();
  std::vector<double> values(n * c);
  std::vector<double> dist(c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      dist[j] = k.sq_dist(data.row(i).data(), centers.row(j).data(), data.cols());
    }
    memberships_from_brackets(dist, exponent, dist_floor,
                              {values.data() + i * c, c});
  }
  return MembershipMatrix(n, c, std::move(values));
}

IrwAuxiliary irw_auxiliary(const DataMatrix& data, const PowerMembership& power) {
  const ClusterAggregates agg = aggregates(data, power);
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const auto& k = kernels::active();

  IrwAuxiliary aux;
  aux.clusters = agg.clusters;
  aux.points = n;
  aux.scales.resize(agg.clusters);
  aux.directions.resize(agg.clusters * n);
  for (std::size_t j = 0; j < agg.clusters; ++j) {
    const double norm = std::sqrt(agg.sum_norm_sq[j]);
    if (!(norm > 0.0)) {
      throw DegenerateClusterError(
          "cluster " + std::to_string(j) +
              " has a zero weighted sum; irw directions are undefined",
          j);
    }
    aux.scales[j] = norm / agg.mass[j];
    double* a = aux.directions.data() + j * n;
    k.row_dots(data.values().data(), n, d, agg.weighted_sum(j).data(), a);
    const double inv_norm = 1.0 / norm;
    for (std::size_t i = 0; i < n; ++i) a[i] *= inv_norm;
  }
  return aux;
}

MembershipMatrix update_membership_irw(const DataMatrix& data,
                                       const IrwAuxiliary& aux, double exponent,
                                       double dist_floor) {
  check_exponent(exponent);
  if (aux.points != data.rows()) {
    throw std::invalid_argument("auxiliary variables do not match data");
  }
  const std::size_t n = data.rows();
  const auto& k = kernels::active();
  std::vector<double> brackets(aux.clusters * n);
  for (std::size_t j = 0; j < aux.clusters; ++j) {
    const double s = aux.scales[j];
    k.affine_bracket(data.sq_norms().data(), aux.direction(j).data(), s * s, s,
                     brackets.data() + j * n, n);
  }
  return memberships_from_bracket_columns(brackets, n, aux.clusters, exponent,
                                          dist_floor);
}

MembershipMatrix update_membership_mm(const DataMatrix& data,
                                      const PowerMembership& anchor,
                                      double exponent, double dist_floor) {
  check_exponent(exponent);
  const ClusterAggregates agg = aggregates(data, anchor);
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const auto& k = kernels::active();
  std::vector<double> brackets(agg.clusters * n);
  std::vector<double> cross(n);
  for (std::size_t j = 0; j < agg.clusters; ++j) {
    const double mass = agg.mass[j];
    k.row_dots(data.values().data(), n, d, agg.weighted_sum(j).data(),
               cross.data());
    k.affine_bracket(data.sq_norms().data(), cross.data(),
                     agg.sum_norm_sq[j] / (mass * mass), 1.0 / mass,
                     brackets.data() + j * n, n);
  }
  return memberships_from_bracket_columns(brackets, n, agg.clusters, exponent,
                                          dist_floor);
}

SolverResult solve_fcm_classic(const DataMatrix& data,
                               const MembershipMatrix& initial,
                               const SolverConfig& cfg,
                               const IterateObserver& observer) {
  return run_outer_loop(
      data, initial, cfg, observer, false,
      [&](const MembershipMatrix& current, std::size_t outer,
          std::size_t& updates) {
        const ClusterCenters centers =
            compute_centers(aggregates(data, to_power(current, cfg.exponent)));
        MembershipMatrix next = update_membership_classic(
            data, centers, cfg.exponent, cfg.dist_floor);
        updates = 1;
        if (observer) observer(outer, 1, next);
        return next;
      });
}

SolverResult solve_fcm_mm(const DataMatrix& data,
                          const MembershipMatrix& initial,
                          const SolverConfig& cfg,
                          const IterateObserver& observer) {
  return run_outer_loop(
      data, initial, cfg, observer, false,
      [&](const MembershipMatrix& current, std::size_t outer,
          std::size_t& updates) {
        MembershipMatrix next = update_membership_mm(
            data, to_power(current, cfg.exponent), cfg.exponent,
            cfg.dist_floor);
        updates = 1;
        if (observer) observer(outer, 1, next);
        return next;
      });
}

SolverResult solve_irw_fcm(const DataMatrix& data,
                           const MembershipMatrix& initial,
                           const SolverConfig& cfg,
                           const IterateObserver& observer) {
  return run_outer_loop(
      data, initial, cfg, observer, true,
      [&](const MembershipMatrix& current, std::size_t outer,
          std::size_t& updates) {
        // Scales are frozen at the outer iterate; directions follow the
        // inner iterates.
        IrwAuxiliary aux = irw_auxiliary(data, to_power(current, cfg.exponent));
        const std::vector<double> scales = aux.scales;
        MembershipMatrix inner = current;
        for (std::size_t k = 1; k <= cfg.max_inner_iters; ++k) {
          if (k > 1) {
            aux = irw_auxiliary(data, to_power(inner, cfg.exponent));
            aux.scales = scales;
          }
          MembershipMatrix next =
              update_membership_irw(data, aux, cfg.exponent, cfg.dist_floor);
          updates = k;
          if (observer) observer(outer, k, next);
          const double change = max_abs_change(next, inner);
          inner = std::move(next);
          if (change <= cfg.inner_tol) break;
        }
        return inner;
      });
}

SolverResult solve(Algorithm algorithm, const DataMatrix& data,
                   const MembershipMatrix& initial, const SolverConfig& cfg,
                   const IterateObserver& observer) {
  switch (algorithm) {
    case Algorithm::classic:
      return solve_fcm_classic(data, initial, cfg, observer);
    case Algorithm::irw:
      return solve_irw_fcm(data, initial, cfg, observer);
    case Algorithm::mm:
      return solve_fcm_mm(data, initial, cfg, observer);
  }
  throw std::invalid_argument("unknown algorithm");
}

std::optional<std::size_t> updates_to_reach(const std::vector<TraceRecord>& trace,
                                            double target, double rel_tol) {
  const double band = rel_tol * (1.0 + std::abs(target));
  for (const TraceRecord& rec : trace) {
    if (std::abs(rec.objective - target) <= band) return rec.membership_updates;
  }
  return std::nullopt;
}

}  // namespace fcmm
