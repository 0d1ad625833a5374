#ifndef FCMM_SOLVERS_HPP
#define FCMM_SOLVERS_HPP

// Three fuzzy c-means solvers behind one interface:
//
//   classic  alternate weighted-mean centers and the inverse-distance
//            membership formula.
//   irw      double loop. The outer loop fixes one auxiliary scale per
//            cluster; the inner loop re-linearizes the square-root term and
//            re-solves the membership problem in closed form until the
//            memberships stop moving.
//   mm       single loop. Each step minimizes the tangent-plane majorizer of
//            the center-free objective, which is the irw inner step with the
//            scales refreshed every time.
//
// All three report the center-free objective (phi) in their traces, so runs
// are comparable on one scale.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcmm/dataset.hpp"
#include "fcmm/membership.hpp"
#include "fcmm/objective.hpp"

namespace fcmm {

struct SolverConfig {
  std::size_t clusters = 3;
  double exponent = 2.0;         // fuzziness r
  double outer_tol = 1e-8;       // relative change of phi
  double inner_tol = 1e-8;       // max |dF| for the irw inner loop
  std::size_t max_outer_iters = 500;
  std::size_t max_inner_iters = 100;
  std::uint64_t seed = 0;
  double dist_floor = 1e-12;
  bool standardize = true;

  void validate() const;
};

/// Auxiliary variables of the double-loop solver: one scale per cluster and
/// a direction per cluster over all points.
struct IrwAuxiliary {
  std::size_t clusters = 0;
  std::size_t points = 0;
  std::vector<double> scales;      // s_j = |X g_j| / (g_j^T 1)
  std::vector<double> directions;  // clusters x points, X^T X g_j / |X g_j|

  std::span<const double> direction(std::size_t j) const {
    return {directions.data() + j * points, points};
  }
};

enum class Termination { converged, max_iters, degenerate };
enum class Algorithm { classic, irw, mm };

std::string_view to_string(Termination termination);
std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct TraceRecord {
  std::size_t outer_iter = 0;
  double objective = 0.0;
  std::int64_t elapsed_ns = 0;
  std::size_t membership_updates = 0;  // cumulative
  std::size_t inner_iters = 0;         // this outer step; 0 for single loop
};

struct SolverResult {
  MembershipMatrix memberships;
  ClusterCenters centers;
  double objective = 0.0;
  std::vector<TraceRecord> trace;
  Termination termination = Termination::max_iters;
  std::string message;  // set for degenerate runs
  std::chrono::nanoseconds wall_time{0};
};

/// Called with the initial memberships as (0, 0) and after every closed-form
/// membership update as (outer, inner), both 1-based.
using IterateObserver =
    std::function<void(std::size_t outer, std::size_t inner,
                       const MembershipMatrix& memberships)>;

/// Turns one point's squared-distance-like brackets into memberships.
/// Brackets are clamped at zero. If any falls below dist_floor the point is
/// split uniformly over those clusters; otherwise f_j is proportional to
/// b_j^(1/(1-r)).
void memberships_from_brackets(std::span<const double> brackets, double exponent,
                               double dist_floor, std::span<double> out);

MembershipMatrix update_membership_classic(const DataMatrix& data,
                                           const ClusterCenters& centers,
                                           double exponent, double dist_floor);

/// Throws DegenerateClusterError when a cluster has zero mass or a
/// vanishing weighted sum (the directions are then undefined).
IrwAuxiliary irw_auxiliary(const DataMatrix& data, const PowerMembership& power);

MembershipMatrix update_membership_irw(const DataMatrix& data,
                                       const IrwAuxiliary& aux, double exponent,
                                       double dist_floor);

MembershipMatrix update_membership_mm(const DataMatrix& data,
                                      const PowerMembership& anchor,
                                      double exponent, double dist_floor);

SolverResult solve_fcm_classic(const DataMatrix& data,
                               const MembershipMatrix& initial,
                               const SolverConfig& cfg,
                               const IterateObserver& observer = {});
SolverResult solve_irw_fcm(const DataMatrix& data,
                           const MembershipMatrix& initial,
                           const SolverConfig& cfg,
                           const IterateObserver& observer = {});
SolverResult solve_fcm_mm(const DataMatrix& data,
                          const MembershipMatrix& initial,
                          const SolverConfig& cfg,
                          const IterateObserver& observer = {});

SolverResult solve(Algorithm algorithm, const DataMatrix& data,
                   const MembershipMatrix& initial, const SolverConfig& cfg,
                   const IterateObserver& observer = {});

/// Cumulative update count of the first trace record whose objective is
/// within rel_tol * (1 + |target|) of target, if any.
std::optional<std::size_t> updates_to_reach(const std::vector<TraceRecord>& trace,
                                            double target, double rel_tol);

}  // namespace fcmm

#endif  // FCMM_SOLVERS_HPP
