// fcmm: run, compare and validate the fuzzy c-means solvers.
//
//   fcmm run      --preset iris --c 3 --algos irw,mm --seed 42 --out out/
//   fcmm compare  --synthetic blobs-small --c 3 --algos irw,mm --out out/
//   fcmm validate --scale quick
//
// Options may also come from a key=value file given with --config; flags on
// the command line take precedence.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcmm/experiment.hpp"
#include "fcmm/kernels.hpp"

namespace {

std::filesystem::path bundled_iris() {
  return std::filesystem::path(FCMM_DATA_DIR) / "iris.csv";
}

struct Options {
  std::string data;
  std::vector<std::size_t> drop_cols;
  bool header = false;
  std::string synthetic;
  std::string preset;
  std::size_t clusters = 3;
  double exponent = 2.0;
  std::uint64_t seed = 0;
  std::vector<std::string> algos{"irw", "mm"};
  double outer_tol = 1e-8;
  double inner_tol = 1e-8;
  std::size_t max_outer = 500;
  std::size_t max_inner = 100;
  double dist_floor = 1e-12;
  bool no_standardize = false;
  std::string out = "fcmm-out";
  bool dump_membership = false;
  std::string kernels;
  std::string scale = "quick";
  std::string iris;
};

fcmm::RunManifest build_manifest(const Options& opt) {
  fcmm::RunManifest manifest;
  fcmm::DatasetSource& source = manifest.dataset;

  if (!opt.preset.empty()) {
    if (opt.preset != "iris") {
      throw fcmm::ConfigError("unknown preset '" + opt.preset + "'");
    }
    source.preset_name = "iris";
    source.csv_path = opt.data.empty() ? bundled_iris()
                                       : std::filesystem::path(opt.data);
    source.drop_columns = {4};
    source.has_header = true;
  } else if (!opt.data.empty()) {
    source.csv_path = opt.data;
    source.drop_columns = {opt.drop_cols.begin(), opt.drop_cols.end()};
    source.has_header = opt.header;
  }
  if (!opt.synthetic.empty()) {
    if (source.csv_path) {
      throw fcmm::ConfigError("--synthetic cannot be combined with --data/--preset");
    }
    source.preset_name = opt.synthetic;
    try {
      source.synthetic = fcmm::synthetic_preset(opt.synthetic);
    } catch (const std::invalid_argument& err) {
      throw fcmm::ConfigError(err.what());
    }
  }

  fcmm::SolverConfig& cfg = manifest.cfg;
  cfg.clusters = opt.clusters;
  cfg.exponent = opt.exponent;
  cfg.seed = opt.seed;
  cfg.outer_tol = opt.outer_tol;
  cfg.inner_tol = opt.inner_tol;
  cfg.max_outer_iters = opt.max_outer;
  cfg.max_inner_iters = opt.max_inner;
  cfg.dist_floor = opt.dist_floor;
  cfg.standardize = !opt.no_standardize;

  for (const std::string& name : opt.algos) {
    if (name.empty()) continue;
    try {
      manifest.algorithms.push_back(fcmm::parse_algorithm(name));
    } catch (const std::invalid_argument& err) {
      throw fcmm::ConfigError(err.what());
    }
  }
  manifest.output_dir = opt.out;
  manifest.dump_memberships = opt.dump_membership;
  manifest.validate();
  return manifest;
}

void print_run(std::ostream& os, const fcmm::RunOutcome& outcome,
               const fcmm::RunManifest& manifest) {
  os << "data: " << outcome.points << " points x " << outcome.dims
     << " features, c=" << manifest.cfg.clusters
     << ", r=" << manifest.cfg.exponent << ", seed=" << manifest.cfg.seed
     << ", kernels=" << fcmm::kernels::name(fcmm::kernels::active_backend())
     << "\n";
  for (const auto& run : outcome.runs) {
    const auto& trace = run.result.trace;
    os << "  " << fcmm::to_string(run.algorithm) << ": objective "
       << std::setprecision(12) << run.result.objective << ", "
       << fcmm::to_string(run.result.termination) << " after "
       << (trace.empty() ? 0 : trace.back().outer_iter) << " outer iterations, "
       << (trace.empty() ? 0 : trace.back().membership_updates)
       << " membership updates\n";
    if (!run.result.message.empty()) os << "    " << run.result.message << "\n";
  }
  os << "wrote " << manifest.output_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy c-means solvers: classic, iteratively re-weighted, and MM"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--data", opt.data, "CSV dataset");
  app.add_option("--drop-cols", opt.drop_cols,
                 "Comma separated 0-based columns to ignore")
      ->delimiter(',');
  app.add_flag("--header", opt.header, "CSV has a header row");
  app.add_option("--synthetic", opt.synthetic, "blobs-small | blobs-large");
  app.add_option("--preset", opt.preset,
                 "iris (uses --data if given, else the bundled copy)");
  app.add_option("--c", opt.clusters, "Cluster count")->capture_default_str();
  app.add_option("--r", opt.exponent, "Fuzziness exponent > 1")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed of the shared initial memberships")
      ->capture_default_str();
  app.add_option("--algos", opt.algos, "Subset of classic,irw,mm")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--outer-tol", opt.outer_tol)->capture_default_str();
  app.add_option("--inner-tol", opt.inner_tol)->capture_default_str();
  app.add_option("--max-outer", opt.max_outer)->capture_default_str();
  app.add_option("--max-inner", opt.max_inner)->capture_default_str();
  app.add_option("--dist-floor", opt.dist_floor)->capture_default_str();
  app.add_flag("--no-standardize", opt.no_standardize,
               "Use raw features instead of z-scores");
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_flag("--dump-membership", opt.dump_membership,
               "Also write membership matrices as CSV");
  app.add_option("--kernels", opt.kernels, "scalar | avx2 | neon");

  auto* run = app.add_subcommand("run", "Run solvers from one shared start");
  auto* compare = app.add_subcommand("compare", "Run, then compare solver work");
  auto* validate = app.add_subcommand("validate", "Run the oracle checks");
  validate->add_option("--scale", opt.scale, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  validate->add_option("--iris", opt.iris, "Iris CSV for the descent audit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.kernels.empty()) {
      fcmm::kernels::select(fcmm::kernels::parse_backend(opt.kernels));
    }
    if (validate->parsed()) {
      std::optional<std::filesystem::path> iris;
      if (!opt.iris.empty()) {
        iris = opt.iris;
      } else if (std::filesystem::exists(bundled_iris())) {
        iris = bundled_iris();
      }
      return fcmm::cmd_validate(opt.scale == "full" ? fcmm::oracle::SuiteScale::full
                                                    : fcmm::oracle::SuiteScale::quick,
                                iris, std::cout);
    }
    const fcmm::RunManifest manifest = build_manifest(opt);
    if (run->parsed()) {
      print_run(std::cout, fcmm::cmd_run(manifest), manifest);
    } else if (compare->parsed()) {
      fcmm::print_compare(std::cout, fcmm::cmd_compare(manifest));
    }
  } catch (const fcmm::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const fcmm::CsvError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
