#include "fcmm/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fcmm/kernels.hpp"

namespace fcmm {
namespace {

void check_shapes(const DataMatrix& data, const PowerMembership& power) {
  if (power.points != data.rows()) {
    throw std::invalid_argument("weight matrix rows do not match point count");
  }
}

}  // namespace

ClusterAggregates aggregates(const DataMatrix& data,
                             const PowerMembership& power) {
  check_shapes(data, power);
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const std::size_t c = power.clusters;
  const auto& k = kernels::active();

  ClusterAggregates agg;
  agg.clusters = c;
  agg.dim = d;
  agg.weighted_sums.assign(c * d, 0.0);
  agg.sum_norm_sq.assign(c, 0.0);
  agg.mass.assign(c, 0.0);

  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = data.row(i).data();
    const double* g = power.values.data() + i * c;
    double row_weight = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      k.axpy(g[j], x, agg.weighted_sums.data() + j * d, d);
      agg.mass[j] += g[j];
      row_weight += g[j];
    }
    energy += row_weight * data.sq_norm(i);
  }
  agg.weighted_energy = energy;

  for (std::size_t j = 0; j < c; ++j) {
    if (!(agg.mass[j] > 0.0)) {
      throw DegenerateClusterError(
          "cluster " + std::to_string(j) + " has zero mass", j);
    }
    const double* y = agg.weighted_sums.data() + j * d;
    agg.sum_norm_sq[j] = k.dot(y, y, d);
  }
  return agg;
}

ClusterCenters compute_centers(const ClusterAggregates& agg) {
  ClusterCenters centers;
  centers.clusters = agg.clusters;
  centers.dim = agg.dim;
  centers.values.resize(agg.clusters * agg.dim);
  for (std::size_t j = 0; j < agg.clusters; ++j) {
    if (!(agg.mass[j] > 0.0)) {
      throw DegenerateClusterError(
          "cluster " + std::to_string(j) + " has zero mass", j);
    }
    for (std::size_t k = 0; k < agg.dim; ++k) {
      centers.values[j * agg.dim + k] =
          agg.weighted_sums[j * agg.dim + k] / agg.mass[j];
    }
  }
  return centers;
}

double fcm_objective(const DataMatrix& data, const MembershipMatrix& memberships,
                     const ClusterCenters& centers, double exponent) {
  if (memberships.points() != data.rows() ||
      memberships.clusters() != centers.clusters || centers.dim != data.cols()) {
    throw std::invalid_argument("fcm_objective: dimension mismatch");
  }
  if (!(exponent > 1.0)) throw std::invalid_argument("exponent must be > 1");
  const auto& k = kernels::active();
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < centers.clusters; ++j) {
      const double f = memberships(i, j);
      if (f <= 0.0) continue;
      total += std::pow(f, exponent) *
               k.sq_dist(data.row(i).data(), centers.row(j).data(), data.cols());
    }
  }
  return total;
}

double phi(const ClusterAggregates& agg) {
  double reduction = 0.0;
  for (std::size_t j = 0; j < agg.clusters; ++j) {
    reduction += agg.sum_norm_sq[j] / agg.mass[j];
  }
  return agg.weighted_energy - reduction;
}

double phi(const DataMatrix& data, const PowerMembership& power) {
  return phi(aggregates(data, power));
}

double psi(const DataMatrix& data, const PowerMembership& power,
           std::span<const double> scales) {
  const ClusterAggregates agg = aggregates(data, power);
  if (scales.size() != agg.clusters) {
    throw std::invalid_argument("psi: one scale per cluster expected");
  }
  double total = agg.weighted_energy;
  for (std::size_t j = 0; j < agg.clusters; ++j) {
    const double s = scales[j];
    total += s * s * agg.mass[j] - 2.0 * s * std::sqrt(agg.sum_norm_sq[j]);
  }
  return total;
}

double majorizer_h(const DataMatrix& data, const PowerMembership& power,
                   const PowerMembership& anchor) {
  if (power.points != anchor.points || power.clusters != anchor.clusters) {
    throw std::invalid_argument("majorizer_h: weight matrices differ in shape");
  }
  const ClusterAggregates cur = aggregates(data, power);
  const ClusterAggregates at = aggregates(data, anchor);
  const std::size_t d = cur.dim;
  const auto& k = kernels::active();

  std::vector<double> step(d);
  double tangent_total = 0.0;
  for (std::size_t j = 0; j < cur.clusters; ++j) {
    const double mass_t = at.mass[j];
    const double quad_t = at.sum_norm_sq[j];
    const double* y = cur.weighted_sums.data() + j * d;
    const double* y_t = at.weighted_sums.data() + j * d;
    // X (g_j - g_j^t), so that the linear term vanishes exactly at the anchor
    for (std::size_t q = 0; q < d; ++q) step[q] = y[q] - y_t[q];
    const double cross = k.dot(y_t, step.data(), d);
    const double mass_step = cur.mass[j] - mass_t;
    const double linear =
        (2.0 * mass_t * cross - quad_t * mass_step) / (mass_t * mass_t);
    tangent_total += quad_t / mass_t + linear;
  }
  return cur.weighted_energy - tangent_total;
}

std::vector<double> tangent_gradient(const DataMatrix& data,
                                     std::span<const double> weights) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (weights.size() != n) {
    throw std::invalid_argument("tangent_gradient: one weight per point expected");
  }
  const auto& k = kernels::active();
  std::vector<double> y(d, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k.axpy(weights[i], data.row(i).data(), y.data(), d);
    mass += weights[i];
  }
  if (!(mass > 0.0)) throw DegenerateClusterError("zero total weight", 0);
  const double quad = k.dot(y.data(), y.data(), d);

  std::vector<double> grad(n);
  k.row_dots(data.values().data(), n, d, y.data(), grad.data());
  const double inv_mass_sq = 1.0 / (mass * mass);
  for (std::size_t i = 0; i < n; ++i) {
    grad[i] = (2.0 * mass * grad[i] - quad) * inv_mass_sq;
  }
  return grad;
}

}  // namespace fcmm
