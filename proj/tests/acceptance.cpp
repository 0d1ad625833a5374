// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Each criterion carries its own runtime bound.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcmm/experiment.hpp"
#include "fcmm/oracle.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fcmm;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0: unbounded
  std::function<Outcome()> body;
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Outcome from_reports(const std::vector<oracle::OracleReport>& reports) {
  Outcome out{true, {}};
  for (const auto& r : reports) {
    out.passed = out.passed && r.passed;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += r.check_name + fmt(" %.2e/%.0e", r.max_error, r.tolerance) +
                  " n=" + std::to_string(r.samples);
  }
  return out;
}

DataMatrix iris() {
  return standardize(load_csv(fs::path(FCMM_DATA_DIR) / "iris.csv", {4}, true));
}

DataMatrix blobs60() {
  return standardize(make_blobs(synthetic_preset("blobs-small")));
}

double max_abs_diff(const MembershipMatrix& a, const MembershipMatrix& b) {
  double worst = 0.0;
  for (std::size_t q = 0; q < a.values().size(); ++q) {
    worst = std::max(worst, std::abs(a.values()[q] - b.values()[q]));
  }
  return worst;
}

Outcome single_step() {
  return from_reports({oracle::check_single_step_equivalence(100, 2024)});
}

Outcome descent() {
  SolverConfig cfg;
  const DataMatrix b = blobs60();
  const DataMatrix i = iris();
  auto rb = oracle::descent_chain_audit(b, init_random(b.rows(), 3, 0), cfg, 100);
  auto ri = oracle::descent_chain_audit(i, init_random(i.rows(), 3, 0), cfg, 100);
  rb.check_name = "blobs";
  ri.check_name = "iris";
  return from_reports({rb, ri});
}

Outcome surrogate() {
  return from_reports({oracle::check_tangency(20, 31),
                       oracle::check_domination(20, 25, 32)});
}

Outcome gradient() { return from_reports({oracle::check_gradient(50, 1e-5, 41)}); }

Outcome gram_free() {
  return from_reports({oracle::check_gram_quad(50, 100, 51),
                       oracle::check_gram_directions(50, 100, 52)});
}

Outcome protocol() {
  struct Case {
    std::string name;
    DataMatrix data;
  };
  SyntheticSpec three = synthetic_preset("blobs-small");
  std::vector<Case> cases{{"iris", iris()}, {"blobs", standardize(make_blobs(three))}};
  SolverConfig cfg;
  cfg.clusters = 3;
  cfg.exponent = 2.0;
  cfg.seed = 42;

  Outcome out{true, {}};
  for (const Case& c : cases) {
    const MembershipMatrix f0 = init_random(c.data.rows(), cfg.clusters, cfg.seed);
    const SolverResult irw = solve_irw_fcm(c.data, f0, cfg);
    const SolverResult mm = solve_fcm_mm(c.data, f0, cfg);
    const double best = std::min(irw.objective, mm.objective);
    const double agree = std::abs(irw.objective - mm.objective) / std::abs(best);
    const auto n_irw = updates_to_reach(irw.trace, best, 1e-6);
    const auto n_mm = updates_to_reach(mm.trace, best, 1e-6);
    const bool ok = irw.termination == Termination::converged &&
                    mm.termination == Termination::converged && agree <= 1e-6 &&
                    n_irw && n_mm && *n_mm <= *n_irw;
    out.passed = out.passed && ok;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += c.name + fmt(" rel_gap=%.1e", agree) + " updates mm=" +
                  (n_mm ? std::to_string(*n_mm) : "never") + " irw=" +
                  (n_irw ? std::to_string(*n_irw) : "never");
  }
  return out;
}

Outcome classic_coincidence() {
  std::mt19937_64 rng(71);
  double worst = 0.0;
  std::size_t compared = 0;
  std::size_t length_mismatches = 0;
  for (int t = 0; t < 20; ++t) {
    const auto inst = oracle::random_instance(rng, 10, 60, 4, 4);
    SolverConfig cfg;
    cfg.clusters = inst.memberships.clusters();
    cfg.exponent = inst.exponent;
    std::vector<MembershipMatrix> classic, mm;
    solve_fcm_classic(inst.data, inst.memberships, cfg,
                      [&](std::size_t, std::size_t, const MembershipMatrix& f) {
                        classic.push_back(f);
                      });
    solve_fcm_mm(inst.data, inst.memberships, cfg,
                 [&](std::size_t, std::size_t, const MembershipMatrix& f) {
                   mm.push_back(f);
                 });
    if (classic.size() != mm.size()) ++length_mismatches;
    for (std::size_t k = 0; k < std::min(classic.size(), mm.size()); ++k) {
      worst = std::max(worst, max_abs_diff(classic[k], mm[k]));
      ++compared;
    }
  }
  Outcome out;
  out.passed = worst <= 1e-12 && length_mismatches == 0;
  out.detail = fmt("max |dF|=%.2e over ", worst) + std::to_string(compared) +
               " iterates, length mismatches=" + std::to_string(length_mismatches);
  return out;
}

Outcome simplex() {
  std::size_t checked = 0;
  double worst_dev = 0.0;
  double min_entry = 1.0;
  bool ok = true;
  auto watch = [&](std::size_t, std::size_t, const MembershipMatrix& f) {
    const MembershipReport r = validate(f);
    ok = ok && r.passed;
    worst_dev = std::max(worst_dev, r.max_row_deviation);
    min_entry = std::min(min_entry, r.min_entry);
    ++checked;
  };
  auto run_all = [&](const DataMatrix& data, const MembershipMatrix& f0,
                     const SolverConfig& cfg) {
    for (Algorithm a : {Algorithm::classic, Algorithm::irw, Algorithm::mm}) {
      const SolverResult res = solve(a, data, f0, cfg, watch);
      watch(0, 0, res.memberships);
    }
  };

  SolverConfig cfg;
  const DataMatrix i = iris();
  const DataMatrix b = blobs60();
  run_all(i, init_random(i.rows(), 3, 1), cfg);
  run_all(b, init_random(b.rows(), 3, 2), cfg);

  std::mt19937_64 rng(81);
  for (int t = 0; t < 10; ++t) {
    const auto inst = oracle::random_instance(rng, 5, 50, 5, 5);
    SolverConfig c;
    c.clusters = inst.memberships.clusters();
    c.exponent = inst.exponent;
    run_all(inst.data, inst.memberships, c);
  }

  // Points sitting exactly on their centers hit the zero-distance rule on
  // every update; duplicated points also tie two clusters at distance zero.
  SolverConfig two;
  two.clusters = 2;
  run_all(DataMatrix(4, 1, {1, 1, 4, 4}),
          MembershipMatrix(4, 2, {1, 0, 1, 0, 0, 1, 0, 1}), two);
  SolverConfig three;
  three.clusters = 3;
  run_all(DataMatrix(5, 2, {0, 1, 0, 1, 0, 1, 3, 3, 3, 3}),
          MembershipMatrix(5, 3, {0.5, 0.5, 0, 0.5, 0.5, 0, 0.5, 0.5, 0, 0, 0, 1, 0, 0, 1}),
          three);

  Outcome out;
  out.passed = ok;
  out.detail = std::to_string(checked) + " iterates" +
               fmt(", max row deviation %.1e, min entry %.1e", worst_dev, min_entry);
  return out;
}

std::string trace_without_timing(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const auto c = line.find(',', b + 1);
    out += line.substr(0, b) + line.substr(c) + "\n";
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "fcmm_acceptance_determinism";
  fs::remove_all(root);
  RunManifest m;
  m.dataset.csv_path = fs::path(FCMM_DATA_DIR) / "iris.csv";
  m.dataset.drop_columns = {4};
  m.dataset.has_header = true;
  m.cfg.seed = 42;
  m.algorithms = {Algorithm::classic, Algorithm::irw, Algorithm::mm};
  m.output_dir = root / "first";
  RunManifest again = m;
  again.output_dir = root / "second";
  cmd_run(m);
  cmd_run(again);

  Outcome out{true, {}};
  for (const char* name : {"trace_classic.csv", "trace_irw.csv", "trace_mm.csv"}) {
    const std::string a = trace_without_timing(m.output_dir / name);
    const std::string b = trace_without_timing(again.output_dir / name);
    const bool same = !a.empty() && a == b;
    out.passed = out.passed && same;
    if (!out.detail.empty()) out.detail += ", ";
    out.detail += std::string(name) + (same ? " identical" : " DIFFERS");
  }
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "single-step MM equals one IRW inner step", 10, single_step},
      {2, "MM descent chain on blobs and Iris", 5, descent},
      {3, "majorizer tangency and domination", 10, surrogate},
      {4, "tangent gradient vs finite differences", 5, gradient},
      {5, "Gram-free aggregates vs explicit Gram", 5, gram_free},
      {6, "shared-start protocol: IRW vs MM work", 30, protocol},
      {7, "classic and MM trajectories coincide", 10, classic_coincidence},
      {8, "every emitted membership matrix is on the simplex", 0, simplex},
      {9, "repeated runs give identical traces", 0, determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& err) {
      out = {false, std::string("exception: ") + err.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s == 0 || secs < c.time_limit_s;
    const bool passed = out.passed && in_time;
    failures += passed ? 0 : 1;
    std::printf("%s  [%d] %s: %s (%.2fs%s)\n", passed ? "PASS" : "FAIL", c.id,
                c.title.c_str(), out.detail.c_str(), secs,
                c.time_limit_s == 0
                    ? ""
                    : (in_time ? fmt(" < %.0fs", c.time_limit_s)
                               : fmt(" over the %.0fs limit", c.time_limit_s))
                          .c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
