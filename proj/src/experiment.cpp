#include "fcmm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "atomic_file.hpp"
#include "fcmm/kernels.hpp"

namespace fcmm {
namespace {

using nlohmann::json;

json config_json(const RunManifest& manifest, const RunOutcome& outcome) {
  const SolverConfig& cfg = manifest.cfg;
  json dataset;
  if (manifest.dataset.csv_path) {
    dataset["csv"] = manifest.dataset.csv_path->string();
    dataset["drop_columns"] = manifest.dataset.drop_columns;
    dataset["has_header"] = manifest.dataset.has_header;
  }
  if (manifest.dataset.synthetic) {
    const SyntheticSpec& s = *manifest.dataset.synthetic;
    dataset["synthetic"] = {{"blob_count", s.blob_count},
                            {"points_per_blob", s.points_per_blob},
                            {"dim", s.dim},
                            {"blob_stddev", s.blob_stddev},
                            {"blob_center_scale", s.blob_center_scale},
                            {"seed", s.seed}};
  }
  if (manifest.dataset.preset_name) dataset["preset"] = *manifest.dataset.preset_name;
  dataset["points"] = outcome.points;
  dataset["dims"] = outcome.dims;

  std::vector<std::string> algos;
  for (Algorithm a : manifest.algorithms) algos.emplace_back(to_string(a));

  return {{"clusters", cfg.clusters},
          {"exponent", cfg.exponent},
          {"outer_tol", cfg.outer_tol},
          {"inner_tol", cfg.inner_tol},
          {"max_outer_iters", cfg.max_outer_iters},
          {"max_inner_iters", cfg.max_inner_iters},
          {"seed", cfg.seed},
          {"dist_floor", cfg.dist_floor},
          {"standardize", cfg.standardize},
          {"algorithms", algos},
          {"output_dir", manifest.output_dir.string()},
          {"kernel_backend", std::string(kernels::name(kernels::active_backend()))},
          {"dataset", dataset}};
}

json run_json(const SolverResult& result) {
  json out = {{"final_objective", result.objective},
              {"termination", std::string(to_string(result.termination))},
              {"membership_updates",
               result.trace.empty() ? 0 : result.trace.back().membership_updates},
              {"outer_iters",
               result.trace.empty() ? 0 : result.trace.back().outer_iter},
              {"wall_time_ns", result.wall_time.count()}};
  if (!result.message.empty()) out["message"] = result.message;
  return out;
}

bool traces_match(const std::vector<TraceRecord>& a,
                  const std::vector<TraceRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k].objective - b[k].objective) >
        1e-12 * (1.0 + std::abs(b[k].objective))) {
      return false;
    }
  }
  return true;
}

}  // namespace

void RunManifest::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithm selected");
  if (dataset.csv_path.has_value() == dataset.synthetic.has_value()) {
    throw ConfigError("choose exactly one of a CSV file or a synthetic preset");
  }
  if (dataset.synthetic) dataset.synthetic->validate();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  std::set<Algorithm> seen(algorithms.begin(), algorithms.end());
  if (seen.size() != algorithms.size()) {
    throw ConfigError("an algorithm is listed twice");
  }
}

DataMatrix load_dataset(const DatasetSource& source, bool standardize_features) {
  DataMatrix data = source.csv_path
                        ? load_csv(*source.csv_path, source.drop_columns,
                                   source.has_header)
                        : make_blobs(source.synthetic.value());
  return standardize_features ? standardize(data) : data;
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRecord>& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  char buf[160];
  for (const TraceRecord& rec : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%lld,%zu,%zu\n", rec.outer_iter,
                  rec.objective, static_cast<long long>(rec.elapsed_ns),
                  rec.membership_updates, rec.inner_iters);
    out += buf;
  }
  detail::write_file_atomic(path, out);
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error(path.string() + ": unexpected trace header");
  }
  std::vector<TraceRecord> trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRecord rec;
    long long elapsed = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lld,%zu,%zu%c", &rec.outer_iter,
                    &rec.objective, &elapsed, &rec.membership_updates,
                    &rec.inner_iters, &tail) != 5) {
      throw std::runtime_error(path.string() + ": malformed trace row '" +
                               line + "'");
    }
    rec.elapsed_ns = elapsed;
    trace.push_back(rec);
  }
  return trace;
}

RunOutcome cmd_run(const RunManifest& manifest) {
  manifest.validate();
  const DataMatrix data = load_dataset(manifest.dataset, manifest.cfg.standardize);
  const MembershipMatrix initial =
      init_random(data.rows(), manifest.cfg.clusters, manifest.cfg.seed);

  std::filesystem::create_directories(manifest.output_dir);
  RunOutcome outcome;
  outcome.points = data.rows();
  outcome.dims = data.cols();

  if (manifest.dump_memberships) {
    write_membership_csv(manifest.output_dir / "initial_memberships.csv", initial);
  }
  json summary;
  for (Algorithm algorithm : manifest.algorithms) {
    SolverResult result = solve(algorithm, data, initial, manifest.cfg);
    const std::string name(to_string(algorithm));
    write_trace_csv(manifest.output_dir / ("trace_" + name + ".csv"), result.trace);
    if (manifest.dump_memberships) {
      write_membership_csv(manifest.output_dir / ("memberships_" + name + ".csv"),
                           result.memberships);
    }
    summary[name] = run_json(result);
    outcome.runs.push_back({algorithm, std::move(result)});
  }
  summary["config"] = config_json(manifest, outcome);
  detail::write_file_atomic(manifest.output_dir / "summary.json",
                            summary.dump(2) + "\n");
  return outcome;
}

CompareReport cmd_compare(const RunManifest& manifest) {
  if (manifest.algorithms.size() < 2) {
    throw ConfigError("compare needs at least two algorithms");
  }
  const RunOutcome outcome = cmd_run(manifest);

  CompareReport report;
  report.best_objective = outcome.runs.front().result.objective;
  for (const AlgorithmRun& run : outcome.runs) {
    report.best_objective = std::min(report.best_objective, run.result.objective);
  }
  report.objective_traces_match = true;
  for (const AlgorithmRun& run : outcome.runs) {
    const auto& trace = run.result.trace;
    CompareEntry entry;
    entry.algorithm = run.algorithm;
    entry.final_objective = run.result.objective;
    entry.updates_to_landmark =
        updates_to_reach(trace, report.best_objective, report.landmark_tol);
    entry.total_updates = trace.empty() ? 0 : trace.back().membership_updates;
    entry.outer_iters = trace.empty() ? 0 : trace.back().outer_iter;
    entry.wall_time_ns = run.result.wall_time.count();
    entry.termination = run.result.termination;
    report.entries.push_back(entry);
    report.objective_traces_match =
        report.objective_traces_match &&
        traces_match(trace, outcome.runs.front().result.trace);
  }

  // Fewest updates wins; algorithms that never reached the landmark lose.
  std::optional<std::size_t> best_count;
  std::size_t holders = 0;
  for (const CompareEntry& e : report.entries) {
    if (!e.updates_to_landmark) continue;
    if (!best_count || *e.updates_to_landmark < *best_count) {
      best_count = e.updates_to_landmark;
      report.fewest_updates = e.algorithm;
      holders = 1;
    } else if (*e.updates_to_landmark == *best_count) {
      ++holders;
    }
  }
  if (holders > 1) {
    report.tie = true;
    report.fewest_updates.reset();
  }

  json out = {{"best_objective", report.best_objective},
              {"landmark_tol", report.landmark_tol},
              {"tie", report.tie},
              {"objective_traces_match", report.objective_traces_match}};
  if (report.fewest_updates) {
    out["fewest_updates"] = std::string(to_string(*report.fewest_updates));
  }
  for (const CompareEntry& e : report.entries) {
    json row = {{"final_objective", e.final_objective},
                {"total_updates", e.total_updates},
                {"outer_iters", e.outer_iters},
                {"wall_time_ns", e.wall_time_ns},
                {"termination", std::string(to_string(e.termination))}};
    row["updates_to_landmark"] =
        e.updates_to_landmark ? json(*e.updates_to_landmark) : json(nullptr);
    out["algorithms"][std::string(to_string(e.algorithm))] = row;
  }
  detail::write_file_atomic(manifest.output_dir / "compare.json",
                            out.dump(2) + "\n");
  return report;
}

void print_compare(std::ostream& os, const CompareReport& report) {
  const auto flags = os.flags();
  os << "best final objective: " << std::setprecision(12)
     << report.best_objective << "\n";
  os << std::left << std::setw(9) << "algo" << std::right << std::setw(20)
     << "final_objective" << std::setw(18) << "updates_to_1e-6" << std::setw(14)
     << "total_updates" << std::setw(8) << "outer" << std::setw(14) << "wall_ms"
     << "  termination\n";
  for (const CompareEntry& e : report.entries) {
    os << std::left << std::setw(9) << to_string(e.algorithm) << std::right
       << std::setw(20) << std::setprecision(12) << e.final_objective
       << std::setw(18)
       << (e.updates_to_landmark ? std::to_string(*e.updates_to_landmark)
                                 : std::string("never"))
       << std::setw(14) << e.total_updates << std::setw(8) << e.outer_iters
       << std::setw(14) << std::fixed << std::setprecision(3)
       << static_cast<double>(e.wall_time_ns) / 1e6 << "  "
       << to_string(e.termination) << "\n";
    os.flags(flags);
  }
  if (report.tie) {
    os << "result: tie on membership updates";
  } else if (report.fewest_updates) {
    os << "result: " << to_string(*report.fewest_updates)
       << " needed the fewest membership updates";
  } else {
    os << "result: no algorithm reached the landmark";
  }
  if (report.objective_traces_match) os << " (objective traces identical)";
  os << "\n";
  os.flags(flags);
}

int cmd_validate(oracle::SuiteScale scale,
                 const std::optional<std::filesystem::path>& iris_csv,
                 std::ostream& os) {
  const auto reports = oracle::run_validation_suite(scale, iris_csv);
  bool all = true;
  for (const auto& report : reports) {
    os << report << "\n";
    all = all && report.passed;
  }
  os << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace fcmm
