#ifndef FCMM_OBJECTIVE_HPP
#define FCMM_OBJECTIVE_HPP

// Objective values for fuzzy c-means and the quantities they are built from.
//
// Everything that involves the n x n Gram matrix X^T X is reduced to
// d-dimensional products: for a weight column g_j the weighted sum
// Xg_j = sum_i g_ij x_i is accumulated once, and g_j^T X^T X g_j = |Xg_j|^2,
// (X^T X g_j)_i = x_i . Xg_j. Accumulation over points always runs in
// ascending index order.

#include <cstddef>
#include <span>
#include <vector>

#include "fcmm/dataset.hpp"
#include "fcmm/membership.hpp"

namespace fcmm {

struct ClusterCenters {
  std::size_t clusters = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // clusters x dim

  std::span<const double> row(std::size_t j) const {
    return {values.data() + j * dim, dim};
  }
};

/// Per-cluster sufficient statistics of a weight matrix G.
struct ClusterAggregates {
  std::size_t clusters = 0;
  std::size_t dim = 0;
  std::vector<double> weighted_sums;  // clusters x dim, row j = X g_j
  std::vector<double> sum_norm_sq;    // |X g_j|^2 = g_j^T X^T X g_j
  std::vector<double> mass;           // g_j^T 1
  double weighted_energy = 0.0;       // sum_ij g_ij |x_i|^2

  std::span<const double> weighted_sum(std::size_t j) const {
    return {weighted_sums.data() + j * dim, dim};
  }
};

/// Throws DegenerateClusterError if some cluster has zero mass.
ClusterAggregates aggregates(const DataMatrix& data, const PowerMembership& power);

/// Weighted means m_j = X g_j / (g_j^T 1).
ClusterCenters compute_centers(const ClusterAggregates& agg);

/// sum_j sum_i f_ij^r |x_i - m_j|^2 for arbitrary centers.
double fcm_objective(const DataMatrix& data, const MembershipMatrix& memberships,
                     const ClusterCenters& centers, double exponent);

/// The center-free objective: the FCM objective with every center at its
/// weighted mean,
///   sum_ij g_ij |x_i|^2 - sum_j |X g_j|^2 / (g_j^T 1).
double phi(const DataMatrix& data, const PowerMembership& power);
double phi(const ClusterAggregates& agg);

/// Objective lifted with one auxiliary scale per cluster,
///   sum_ij g_ij |x_i|^2 + sum_j (s_j^2 g_j^T 1 - 2 s_j |X g_j|).
/// Minimizing over the scales recovers phi.
double psi(const DataMatrix& data, const PowerMembership& power,
           std::span<const double> scales);

/// Upper bound on phi(G) that touches it at G = anchor. The concave term
/// -|Xg_j|^2 / (g_j^T 1) is replaced by its tangent plane at the anchor's
/// g_j; constant terms are kept so that majorizer_h(G_t, G_t) == phi(G_t).
double majorizer_h(const DataMatrix& data, const PowerMembership& power,
                   const PowerMembership& anchor);

/// Gradient of g -> (g^T X^T X g) / (g^T 1) at g_t, length n:
///   [2 (g_t^T 1) X^T X g_t - (g_t^T X^T X g_t) 1] / (g_t^T 1)^2.
std::vector<double> tangent_gradient(const DataMatrix& data,
                                     std::span<const double> weights);

}  // namespace fcmm

#endif  // FCMM_OBJECTIVE_HPP
