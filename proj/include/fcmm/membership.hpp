#ifndef FCMM_MEMBERSHIP_HPP
#define FCMM_MEMBERSHIP_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcmm {

/// Fuzzy memberships: n points by c clusters, row-major. Rows are expected
/// to lie on the probability simplex; use validate() to check.
class MembershipMatrix {
 public:
  MembershipMatrix(std::size_t points, std::size_t clusters,
                   std::vector<double> values);

  std::size_t points() const { return points_; }
  std::size_t clusters() const { return clusters_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * clusters_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * clusters_, clusters_};
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const MembershipMatrix&,
                         const MembershipMatrix&) = default;

 private:
  std::size_t points_;
  std::size_t clusters_;
  std::vector<double> values_;
};

/// Elementwise power of a membership matrix, g_ij = f_ij^r, together with
/// the per-cluster weight totals. Every total is positive.
struct PowerMembership {
  std::size_t points = 0;
  std::size_t clusters = 0;
  double exponent = 2.0;
  std::vector<double> values;      // points x clusters
  std::vector<double> col_sums;    // clusters

  double operator()(std::size_t i, std::size_t j) const {
    return values[i * clusters + j];
  }
};

/// A cluster whose total membership weight vanished.
class DegenerateClusterError : public std::runtime_error {
 public:
  DegenerateClusterError(const std::string& message, std::size_t cluster)
      : std::runtime_error(message), cluster_(cluster) {}
  std::size_t cluster() const { return cluster_; }

 private:
  std::size_t cluster_;
};

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kNegativeTolerance = 1e-12;

struct MembershipReport {
  double max_row_deviation = 0.0;  // max_i |sum_j f_ij - 1|
  double min_entry = 0.0;
  bool finite = true;
  bool passed = false;
};

/// Rows drawn i.i.d. from the flat Dirichlet distribution on the simplex.
MembershipMatrix init_random(std::size_t points, std::size_t clusters,
                             std::uint64_t seed);

/// Throws std::invalid_argument for r <= 1 and DegenerateClusterError when
/// some column sums to zero.
PowerMembership to_power(const MembershipMatrix& memberships, double exponent);

MembershipReport validate(const MembershipMatrix& memberships,
                          double row_tolerance = kRowSumTolerance,
                          double negative_tolerance = kNegativeTolerance);

/// One row per point, "%.17g" precision, no header.
void write_membership_csv(const std::filesystem::path& path,
                          const MembershipMatrix& memberships);
MembershipMatrix read_membership_csv(const std::filesystem::path& path);

}  // namespace fcmm

#endif  // FCMM_MEMBERSHIP_HPP
