#include "fcmm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string_view>

namespace fcmm {
namespace {

std::vector<double> row_sq_norms(std::size_t rows, std::size_t cols,
                                 const std::vector<double>& values) {
  std::vector<double> norms(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double v = values[i * cols + k];
      acc += v * v;
    }
    norms[i] = acc;
  }
  return norms;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) {
    throw std::invalid_argument("DataMatrix needs at least one row and column");
  }
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("DataMatrix value count does not match shape");
  }
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx])) {
      std::ostringstream msg;
      msg << "non-finite entry at point " << idx / cols_ << ", feature "
          << idx % cols_;
      throw std::invalid_argument(msg.str());
    }
  }
  sq_norms_ = row_sq_norms(rows_, cols_, values_);
}

void SyntheticSpec::validate() const {
  if (blob_count == 0) throw std::invalid_argument("blob_count must be positive");
  if (points_per_blob == 0) {
    throw std::invalid_argument("points_per_blob must be positive");
  }
  if (dim == 0) throw std::invalid_argument("dim must be positive");
  if (!(blob_stddev > 0.0) || !std::isfinite(blob_stddev)) {
    throw std::invalid_argument("blob_stddev must be positive");
  }
  if (!(blob_center_scale > 0.0) || !std::isfinite(blob_center_scale)) {
    throw std::invalid_argument("blob_center_scale must be positive");
  }
}

CsvError::CsvError(const std::string& message, std::size_t row,
                   std::size_t column)
    : std::runtime_error(message), row_(row), column_(column) {}

DataMatrix load_csv(const std::filesystem::path& path,
                    const std::set<std::size_t>& drop_columns,
                    bool has_header) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path.string() + "'", 0, 0);

  std::vector<double> values;
  std::size_t arity = 0;
  std::size_t kept = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (header_pending) {
      header_pending = false;
      arity = cells.size();
      continue;
    }
    if (arity == 0) arity = cells.size();
    if (cells.size() != arity) {
      std::ostringstream msg;
      msg << path.string() << ": row " << line_no << " has " << cells.size()
          << " columns, expected " << arity;
      throw CsvError(msg.str(), line_no, 0);
    }
    if (rows == 0) {
      kept = 0;
      for (std::size_t col = 0; col < arity; ++col) {
        if (!drop_columns.contains(col)) ++kept;
      }
      if (kept == 0) throw CsvError(path.string() + ": no columns kept", 0, 0);
    }
    for (std::size_t col = 0; col < arity; ++col) {
      if (drop_columns.contains(col)) continue;
      double value = 0.0;
      if (!parse_double(cells[col], value)) {
        std::ostringstream msg;
        msg << path.string() << ": row " << line_no << ", column " << col + 1
            << ": cannot parse '" << cells[col] << "' as a finite number";
        throw CsvError(msg.str(), line_no, col + 1);
      }
      values.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) throw CsvError(path.string() + ": no data rows", 0, 0);
  return DataMatrix(rows, kept, std::move(values));
}

LabeledBlobs make_labeled_blobs(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> center_dist(-spec.blob_center_scale,
                                                     spec.blob_center_scale);
  std::normal_distribution<double> noise(0.0, spec.blob_stddev);

  std::vector<double> centers(spec.blob_count * spec.dim);
  for (double& v : centers) v = center_dist(rng);

  const std::size_t n = spec.blob_count * spec.points_per_blob;
  std::vector<double> values;
  values.reserve(n * spec.dim);
  std::vector<std::size_t> labels;
  labels.reserve(n);
  for (std::size_t b = 0; b < spec.blob_count; ++b) {
    for (std::size_t p = 0; p < spec.points_per_blob; ++p) {
      for (std::size_t k = 0; k < spec.dim; ++k) {
        values.push_back(centers[b * spec.dim + k] + noise(rng));
      }
      labels.push_back(b);
    }
  }
  return {DataMatrix(n, spec.dim, std::move(values)), std::move(centers),
          std::move(labels)};
}

DataMatrix make_blobs(const SyntheticSpec& spec) {
  return make_labeled_blobs(spec).data;
}

SyntheticSpec synthetic_preset(std::string_view name) {
  SyntheticSpec spec;
  if (name == "blobs-small") {
    spec.blob_count = 3;
    spec.points_per_blob = 20;
    spec.dim = 2;
    spec.blob_stddev = 0.5;
    spec.blob_center_scale = 5.0;
  } else if (name == "blobs-large") {
    spec.blob_count = 5;
    spec.points_per_blob = 2000;
    spec.dim = 8;
    spec.blob_stddev = 1.0;
    spec.blob_center_scale = 5.0;
  } else {
    throw std::invalid_argument("unknown synthetic preset '" +
                                std::string(name) + "'");
  }
  return spec;
}

DataMatrix standardize(const DataMatrix& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (n < 2) throw std::invalid_argument("standardize needs at least 2 points");

  std::vector<double> out(data.values().begin(), data.values().end());
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean += data.at(i, k);
      max_abs = std::max(max_abs, std::abs(data.at(i, k)));
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = data.at(i, k) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    // A constant column can leave a rounding-level spread behind the mean.
    if (sd <= 64.0 * std::numeric_limits<double>::epsilon() * max_abs) sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double centered = data.at(i, k) - mean;
      out[i * d + k] = sd > 0.0 ? centered / sd : centered;
    }
  }
  return DataMatrix(n, d, std::move(out));
}

}  // namespace fcmm
