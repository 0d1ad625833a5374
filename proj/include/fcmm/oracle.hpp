#ifndef FCMM_ORACLE_HPP
#define FCMM_ORACLE_HPP

// Brute-force references and randomized certificates for the optimized code.
//
// The reference routines here use plain loops and never call into the
// kernel layer or the aggregate-based objective code, so agreement between
// the two is evidence rather than a tautology. The certificate routines
// (surrogate_argmin_oracle, descent_chain_audit and the check_* suite)
// exercise the library's public operations against these references or
// against the inequalities the algorithms are supposed to satisfy.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fcmm/dataset.hpp"
#include "fcmm/membership.hpp"
#include "fcmm/solvers.hpp"

namespace fcmm::oracle {

struct OracleReport {
  std::string check_name;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

OracleReport make_report(std::string name, double max_error, double tolerance,
                         std::size_t samples);
std::ostream& operator<<(std::ostream& os, const OracleReport& report);

/// |a - b| / (1 + |b|)
double relative_error(double value, double reference);

/// Explicit n x n Gram matrix G = X X^T (points as rows), then g^T G g by a
/// double loop. Meant for n up to a few hundred.
std::vector<double> gram_matrix(const DataMatrix& data);
double gram_quad_oracle(const DataMatrix& data, std::span<const double> weights);

/// Central differences of g -> quad(g) / mass(g), quad from the explicit Gram.
std::vector<double> finite_diff_gradient(const DataMatrix& data,
                                         std::span<const double> weights,
                                         double step);

/// Center-free objective through explicit centers and squared distances.
double reference_phi(const DataMatrix& data, const PowerMembership& power);

/// Samples `trials` feasible memberships (flat Dirichlet draws and small
/// perturbations of the MM minimizer, including the minimizer itself) and
/// reports how far any of them beats the MM update on the majorizer anchored
/// at `anchor`. max_error is normalized by (1 + |h*|); tolerance 1e-9.
OracleReport surrogate_argmin_oracle(const DataMatrix& data,
                                     const PowerMembership& anchor,
                                     double exponent, std::size_t trials,
                                     std::uint64_t seed);

/// Runs the MM solver for `steps` updates and checks, per step,
///   phi(G+) <= h(G+|G) <= h(G|G) = phi(G)
/// within 1e-10 (1 + |phi(G)|).
OracleReport descent_chain_audit(const DataMatrix& data,
                                 const MembershipMatrix& initial,
                                 const SolverConfig& cfg, std::size_t steps);

// ---------------------------------------------------------------------------
// Randomized suite

struct RandomInstance {
  DataMatrix data;
  MembershipMatrix memberships;
  double exponent;
};

/// n in [min_n, max_n], d in [1, max_d], c in [2, max_c], r drawn from
/// {1.5, 2, 3}; points standard normal, memberships flat Dirichlet.
RandomInstance random_instance(std::mt19937_64& rng, std::size_t min_n,
                               std::size_t max_n, std::size_t max_d,
                               std::size_t max_c);

/// Max elementwise |F_mm - F_irw| for one step from the same anchor.
OracleReport check_single_step_equivalence(std::size_t instances,
                                           std::uint64_t seed);
/// Max elementwise |F_mm - F_classic| for one step from the same anchor.
OracleReport check_classic_step_coincidence(std::size_t instances,
                                            std::uint64_t seed);
/// Per-iteration max |F| difference of whole classic and MM trajectories.
OracleReport check_classic_trajectory_coincidence(std::size_t instances,
                                                  std::size_t iterations,
                                                  std::uint64_t seed);
OracleReport check_tangency(std::size_t anchors, std::uint64_t seed);
OracleReport check_domination(std::size_t anchors, std::size_t samples_per_anchor,
                              std::uint64_t seed);
OracleReport check_gradient(std::size_t points, double step, std::uint64_t seed);
OracleReport check_gram_quad(std::size_t instances, std::size_t max_n,
                             std::uint64_t seed);
OracleReport check_gram_directions(std::size_t instances, std::size_t max_n,
                                   std::uint64_t seed);
OracleReport check_phi_reference(std::size_t instances, std::uint64_t seed);
OracleReport check_surrogate_argmin(std::size_t anchors, std::size_t trials,
                                    std::uint64_t seed);

enum class SuiteScale { quick, full };

/// Every check at the chosen scale. The Iris audit runs only when a CSV path
/// is supplied.
std::vector<OracleReport> run_validation_suite(
    SuiteScale scale, const std::optional<std::filesystem::path>& iris_csv);

}  // namespace fcmm::oracle

#endif  // FCMM_ORACLE_HPP
