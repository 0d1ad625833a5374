#include "fcmm/membership.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "atomic_file.hpp"
#include "fcmm/dataset.hpp"

namespace fcmm {

MembershipMatrix::MembershipMatrix(std::size_t points, std::size_t clusters,
                                   std::vector<double> values)
    : points_(points), clusters_(clusters), values_(std::move(values)) {
  if (points_ == 0 || clusters_ == 0) {
    throw std::invalid_argument("membership matrix needs points and clusters");
  }
  if (values_.size() != points_ * clusters_) {
    throw std::invalid_argument("membership value count does not match shape");
  }
}

MembershipMatrix init_random(std::size_t points, std::size_t clusters,
                             std::uint64_t seed) {
  if (points == 0) throw std::invalid_argument("init_random needs n >= 1");
  if (clusters < 2) throw std::invalid_argument("init_random needs c >= 2");

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> values(points * clusters);
  for (std::size_t i = 0; i < points; ++i) {
    double* row = values.data() + i * clusters;
    double total = 0.0;
    for (std::size_t j = 0; j < clusters; ++j) {
      double draw = 0.0;
      while (draw == 0.0) draw = expo(rng);
      row[j] = draw;
      total += draw;
    }
    for (std::size_t j = 0; j < clusters; ++j) row[j] /= total;
  }
  return MembershipMatrix(points, clusters, std::move(values));
}

PowerMembership to_power(const MembershipMatrix& memberships, double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("fuzziness exponent must be > 1");
  }
  const std::size_t n = memberships.points();
  const std::size_t c = memberships.clusters();
  PowerMembership power;
  power.points = n;
  power.clusters = c;
  power.exponent = exponent;
  power.values.resize(n * c);
  power.col_sums.assign(c, 0.0);

  const auto f = memberships.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double g = std::pow(std::max(f[i * c + j], 0.0), exponent);
      power.values[i * c + j] = g;
      power.col_sums[j] += g;
    }
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (!(power.col_sums[j] > 0.0)) {
      throw DegenerateClusterError(
          "cluster " + std::to_string(j) + " has zero total membership", j);
    }
  }
  return power;
}

MembershipReport validate(const MembershipMatrix& memberships,
                          double row_tolerance, double negative_tolerance) {
  MembershipReport report;
  report.min_entry = memberships(0, 0);
  for (std::size_t i = 0; i < memberships.points(); ++i) {
    double total = 0.0;
    for (double f : memberships.row(i)) {
      if (!std::isfinite(f)) report.finite = false;
      report.min_entry = std::min(report.min_entry, f);
      total += f;
    }
    report.max_row_deviation =
        std::max(report.max_row_deviation, std::abs(total - 1.0));
  }
  report.passed = report.finite &&
                  report.max_row_deviation <= row_tolerance &&
                  report.min_entry >= -negative_tolerance;
  return report;
}

void write_membership_csv(const std::filesystem::path& path,
                          const MembershipMatrix& memberships) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < memberships.points(); ++i) {
    for (std::size_t j = 0; j < memberships.clusters(); ++j) {
      if (j > 0) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", memberships(i, j));
      out += buf;
    }
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

MembershipMatrix read_membership_csv(const std::filesystem::path& path) {
  const DataMatrix table = load_csv(path);
  return MembershipMatrix(table.rows(), table.cols(),
                          {table.values().begin(), table.values().end()});
}

}  // namespace fcmm
