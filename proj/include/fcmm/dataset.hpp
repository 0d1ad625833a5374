#ifndef FCMM_DATASET_HPP
#define FCMM_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fcmm {

/// n points in d dimensions, stored row-major (one point per row), with the
/// squared norm of every point cached at construction.
///
/// Immutable once built. Construction rejects empty shapes and non-finite
/// entries with std::invalid_argument.
class DataMatrix {
 public:
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  double at(std::size_t i, std::size_t k) const { return values_[i * cols_ + k]; }

  std::span<const double> values() const { return values_; }
  std::span<const double> sq_norms() const { return sq_norms_; }
  double sq_norm(std::size_t i) const { return sq_norms_[i]; }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  std::vector<double> sq_norms_;
};

/// Parameters for isotropic Gaussian blobs.
struct SyntheticSpec {
  std::size_t blob_count = 3;
  std::size_t points_per_blob = 20;
  std::size_t dim = 2;
  double blob_stddev = 0.5;
  double blob_center_scale = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabeledBlobs {
  DataMatrix data;
  std::vector<double> centers;       // blob_count x dim, row-major
  std::vector<std::size_t> labels;   // blob index of every point
};

/// Raised by load_csv. Row and column are 1-based positions in the file
/// (0 when the error is not tied to a cell).
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& message, std::size_t row, std::size_t column);

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Reads a comma separated numeric file. drop_columns holds 0-based indices
/// of columns to skip (labels, ids). A header row, when present, is skipped
/// unparsed. Blank lines are ignored.
DataMatrix load_csv(const std::filesystem::path& path,
                    const std::set<std::size_t>& drop_columns = {},
                    bool has_header = false);

DataMatrix make_blobs(const SyntheticSpec& spec);
LabeledBlobs make_labeled_blobs(const SyntheticSpec& spec);

/// Built-in specs: "blobs-small" (3 x 20 points in 2-D, seed 0) and
/// "blobs-large" (5 x 2000 points in 8-D, seed 0). Throws
/// std::invalid_argument for other names.
SyntheticSpec synthetic_preset(std::string_view name);

/// Centers every column and scales it to unit population standard deviation
/// (denominator n). Zero-variance columns are only centered. Requires n >= 2.
DataMatrix standardize(const DataMatrix& data);

}  // namespace fcmm

#endif  // FCMM_DATASET_HPP
