// Acceptance suite: one line per criterion, exit status 0 iff every selected
// criterion passes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "levyflow/cli.hpp"
#include "levyflow/config.hpp"
#include "levyflow/experiments.hpp"

using namespace levyflow;
namespace fs = std::filesystem;

namespace {

struct Limit {
  std::string check;
  double tolerance;
  bool at_least = false;
};

struct Outcome {
  bool passed = true;
  std::vector<std::string> lines;
};

// Re-judges the named checks of a report at the stated tolerances.
void judge(const VerificationReport& rep, const std::vector<Limit>& limits, Outcome& out) {
  for (const auto& lim : limits) {
    const Check& c = rep.find(lim.check);
    const bool ok = lim.at_least ? c.residual >= lim.tolerance : c.residual <= lim.tolerance;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-48s %s %10.3e %s %8.1e", lim.check.c_str(),
                  ok ? "ok  " : "FAIL", c.residual, lim.at_least ? ">=" : "<=", lim.tolerance);
    out.lines.push_back(buf);
    out.passed = out.passed && ok;
  }
}

void require(bool cond, const std::string& what, Outcome& out) {
  out.lines.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
  out.passed = out.passed && cond;
}

class Suite {
 public:
  Suite(int threads) : cfg_(default_config()) {
    cfg_.seed = 42;
    cfg_.threads = threads;
    field_ = make_field(cfg_);
    curves_ = make_curves(cfg_);
  }

  Outcome transport_laws() {
    Outcome o;
    require(curves_.size() >= 10, "10 seeded curves", o);
    judge(check_transport_laws(*field_, curves_, cfg_, 100), {{"unitarity", 1e-10},
                                                               {"group_law", 1e-8},
                                                               {"reparametrization", 1e-8}},
          o);
    return o;
  }

  Outcome duhamel() {
    Outcome o;
    require(cfg_.checks >= 20, "20 random (Z, dZ) pairs", o);
    judge(check_duhamel(cfg_), {{"duhamel", 1e-6}}, o);
    return o;
  }

  Outcome first_derivative() {
    Outcome o;
    const VerificationReport rep = check_first_derivative(*field_, curves_, cfg_);
    judge(rep, {{"first_derivative", 1e-5}}, o);
    const int with_ends = rep.find("first_derivative").details.at("nonzero_endpoint_cases");
    require(with_ends >= 5, std::to_string(with_ends) + " cases with nonzero endpoint fields", o);
    return o;
  }

  Outcome gradient() {
    Outcome o;
    require(cfg_.checks >= 20, "20 random (X, Phi) pairs per curve", o);
    judge(check_gradient(*field_, curves_, cfg_), {{"riesz_pairing", 1e-5}}, o);
    return o;
  }

  Outcome kernels() {
    Outcome o;
    judge(check_kernels(*field_, curves_, cfg_, 10), {{"bilinear_form", 1e-4},
                                                      {"levy_kernel_symmetry", 1e-10},
                                                      {"singular_kernel_antisymmetry", 1e-10}},
          o);
    return o;
  }

  Outcome laplacian() {
    Outcome o;
    require(cfg_.levy.cesaro_n.back() == 64, "Cesaro sweep ends at n = 64", o);
    const LaplacianIdentity id = verify_laplacian_identity(*field_, curves_, cfg_);
    // slope in [0.7, 1.3]  <=>  |slope - 1| <= 0.3
    judge(id.report, {{"kernel_vs_closed_form", 1e-8},
                      {"cesaro_at_n64", 0.05},
                      {"cesaro_rate", 0.3}},
          o);
    return o;
  }

  Outcome functionals() {
    Outcome o;
    judge(check_functionals(curves_, cfg_), {{"gradient_vs_fd", 1e-6},
                                             {"laplacian_closed_form", 1e-6},
                                             {"functional_heat", 1e-8}},
          o);
    return o;
  }

  Outcome heat_flow() {
    Outcome o;
    require(cfg_.flow.grid == 64 && cfg_.dim == 2, "configured flow on 64^2", o);
    judge(check_heat_flow(cfg_, flow()), {{"abelian_oracle", 1e-6},
                                          {"action_monotone", 0.0},
                                          {"critical_stationary", 1e-6},
                                          {"pure_gauge_drift_order", 0.2},
                                          {"rk4_order", 0.2},
                                          {"stencil_order", 0.2}},
          o);
    return o;
  }

  Outcome theorem() {
    Outcome o;
    const VerificationReport rep = verify_main_theorem(cfg_, flow(), curves_);
    const std::size_t cases = rep.find("su2_formula_vs_laplacian").details.size();
    require(curves_.size() >= 10 && cfg_.flow.checkpoints.size() == 3 && cases == 30,
            std::to_string(cases) + " (curve, checkpoint) cases", o);
    judge(rep, {{"su2_formula_vs_laplacian", 1e-6},
                {"su2_fd_vs_laplacian", 1e-3},
                {"abelian_fd_vs_laplacian", 1e-3},
                {"critical_field_both_sides_zero", 1e-6}},
          o);
    const RDiagnostic r = run_r_diagnostic(cfg_, flow(), curves_.at(0));
    judge(r.report, {{"exact_flow_integral", 1e-5},
                     {"exact_flow_definition", 1e-5},
                     {"perturbed_routes_agree", 1e-5},
                     {"perturbed_flat_outside_window", 1e-5},
                     {"perturbed_moves_inside_window", 1e-3, true}},
          o);
    return o;
  }

  Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "levyflow_acceptance_determinism";
    fs::remove_all(root);
    int status[2];
    for (int i = 0; i < 2; ++i) {
      Command cmd;
      cmd.subcommand = "all";
      cmd.seed = 42;
      cmd.threads = cfg_.threads;
      cmd.out = root / ("run" + std::to_string(i));
      std::ostringstream log, err;
      status[i] = run(cmd, log, err);
      require(status[i] == kExitPass || status[i] == kExitCheckFailed,
              "all --seed 42 run " + std::to_string(i + 1) + " completed (status " +
                  std::to_string(status[i]) + ")",
              o);
    }
    require(status[0] == status[1], "both runs report the same status", o);
    const fs::path a = root / "run0", b = root / "run1";
    std::set<fs::path> files;
    for (const auto& dir : {a, b}) {
      for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.insert(fs::relative(e.path(), dir));
      }
    }
    int compared = 0, reports = 0;
    for (const auto& rel : files) {
      const std::string name = rel.filename().string();
      if (name == "timing.json" || name == "summary.txt") continue;
      const bool same = fs::exists(a / rel) && fs::exists(b / rel) && slurp(a / rel) == slurp(b / rel);
      if (!same) require(false, "byte-identical " + rel.string(), o);
      ++compared;
      if (name.ends_with(".report.json")) ++reports;
    }
    require(reports > 0, std::to_string(compared) + " artifacts compared, " +
                             std::to_string(reports) + " reports", o);
    fs::remove_all(root);
    return o;
  }

 private:
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  const FlowRun& flow() {
    if (!flow_) flow_ = run_configured_flow(cfg_);
    return *flow_;
  }

  ExperimentConfig cfg_;
  std::optional<GaugeField> field_;
  std::vector<Curve> curves_;
  std::optional<FlowRun> flow_;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome(Suite&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levyflow acceptance suite"};
  std::vector<int> selected;
  int threads = 1;
  bool verbose = false;
  app.add_option("--criterion", selected, "criterion to run (repeatable; default all)")
      ->check(CLI::Range(1, 10));
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "print sub-checks of passing criteria too");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "transport laws", &Suite::transport_laws},
      {2, "Duhamel formula", &Suite::duhamel},
      {3, "first derivative", &Suite::first_derivative},
      {4, "H0-gradient pairing", &Suite::gradient},
      {5, "kernel decomposition", &Suite::kernels},
      {6, "Levy Laplacian of transport", &Suite::laplacian},
      {7, "scalar functionals", &Suite::functionals},
      {8, "heat flow", &Suite::heat_flow},
      {9, "heat equation for transport", &Suite::theorem},
      {10, "determinism", &Suite::determinism},
  };

  Suite suite(threads);
  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(suite);
    } catch (const std::exception& e) {
      o.passed = false;
      o.lines.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d  %-30s %s  (%.1f s)\n", c.id, c.title.c_str(),
                o.passed ? "PASS" : "FAIL", secs);
    if (!o.passed || verbose) {
      for (const auto& line : o.lines) std::printf("    %s\n", line.c_str());
    }
    std::fflush(stdout);
    ok = ok && o.passed;
  }
  return ok ? 0 : 1;
}
