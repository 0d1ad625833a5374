#ifndef FCMM_EXPERIMENT_HPP
#define FCMM_EXPERIMENT_HPP

// Experiment harness behind the `fcmm` command-line tool: load a dataset,
// draw one shared initial membership matrix, run the selected solvers from
// it, and write traces plus a JSON summary.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcmm/dataset.hpp"
#include "fcmm/oracle.hpp"
#include "fcmm/solvers.hpp"

namespace fcmm {

/// Bad manifest or flag combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exactly one of csv_path / synthetic must be set.
struct DatasetSource {
  std::optional<std::filesystem::path> csv_path;
  std::set<std::size_t> drop_columns;  // 0-based
  bool has_header = false;
  std::optional<std::string> preset_name;  // informational
  std::optional<SyntheticSpec> synthetic;
};

struct RunManifest {
  DatasetSource dataset;
  SolverConfig cfg;
  std::vector<Algorithm> algorithms;
  std::filesystem::path output_dir = "fcmm-out";
  bool dump_memberships = false;

  void validate() const;
};

struct AlgorithmRun {
  Algorithm algorithm;
  SolverResult result;
};

struct RunOutcome {
  std::size_t points = 0;
  std::size_t dims = 0;
  std::vector<AlgorithmRun> runs;
};

struct CompareEntry {
  Algorithm algorithm;
  double final_objective = 0.0;
  std::optional<std::size_t> updates_to_landmark;
  std::size_t total_updates = 0;
  std::size_t outer_iters = 0;
  std::int64_t wall_time_ns = 0;
  Termination termination = Termination::max_iters;
};

struct CompareReport {
  double best_objective = 0.0;
  double landmark_tol = 1e-6;
  std::vector<CompareEntry> entries;
  std::optional<Algorithm> fewest_updates;  // empty on a tie
  bool tie = false;
  bool objective_traces_match = false;  // every trace equal within 1e-12 rel.
};

inline constexpr const char* kTraceHeader =
    "iter,objective,elapsed_ns,membership_updates,inner_iters";

DataMatrix load_dataset(const DatasetSource& source, bool standardize_features);

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

/// Runs every selected solver from one shared seeded initialization and
/// writes trace_<algo>.csv and summary.json (plus memberships_<algo>.csv and
/// initial_memberships.csv when requested) into output_dir.
RunOutcome cmd_run(const RunManifest& manifest);

/// cmd_run, then compares the work each solver needed to come within
/// landmark_tol of the best final objective. Also writes compare.json.
CompareReport cmd_compare(const RunManifest& manifest);
void print_compare(std::ostream& os, const CompareReport& report);

/// Prints one line per oracle check; returns 0 iff all pass.
int cmd_validate(oracle::SuiteScale scale,
                 const std::optional<std::filesystem::path>& iris_csv,
                 std::ostream& os);

}  // namespace fcmm

#endif  // FCMM_EXPERIMENT_HPP
