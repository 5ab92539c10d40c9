#pragma once

// Verification runs that tie the modules together. Each returns a
// VerificationReport; reports are deterministic given the configuration
// (wall times are kept apart in timing_json()).

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyflow/config.hpp"
#include "levyflow/field.hpp"
#include "levyflow/heatflow.hpp"
#include "levyflow/levy.hpp"
#include "levyflow/path.hpp"
#include "levyflow/transport.hpp"

namespace levyflow {

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  /// true: passes when residual >= tolerance (a required signal).
  bool lower_bound = false;
  bool passed = false;
  nlohmann::json details;
  double seconds = 0.0;
};

class VerificationReport {
 public:
  explicit VerificationReport(std::string title = {}) : title_(std::move(title)) {}

  const std::string& title() const { return title_; }

  /// residual <= tolerance passes; NaN never does.
  Check& add(std::string name, double residual, double tolerance,
             nlohmann::json details = nullptr, double seconds = 0.0);
  /// residual >= minimum passes.
  Check& require_at_least(std::string name, double value, double minimum,
                          nlohmann::json details = nullptr, double seconds = 0.0);
  void note(std::string text) { notes_.push_back(std::move(text)); }
  /// Appends the other report's checks (names prefixed with "prefix/" when
  /// given) and notes.
  void merge(const VerificationReport& other, std::string_view prefix = {});

  bool passed() const;
  const std::vector<Check>& checks() const { return checks_; }
  /// Throws DomainError if absent.
  const Check& find(std::string_view name) const;
  const std::vector<std::string>& notes() const { return notes_; }

  /// Everything except wall times.
  nlohmann::json to_json() const;
  nlohmann::json timing_json() const;
  /// One line per check, with times.
  std::string summary() const;

 private:
  std::string title_;
  std::vector<Check> checks_;
  std::vector<std::string> notes_;
};

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written by index; the first exception (lowest i) is rethrown.
template <typename Body>
void parallel_for(int n, int threads, Body&& body) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// ||a - b||_F / ||b||_F, or ||a - b||_F when b vanishes.
double relative_error(const Matrix& a, const Matrix& b);

// ----- transport -----

/// Unitarity of U_{1,0} per curve, the group law over `triples` random
/// r <= s <= t and invariance under t + 0.5 sin(2 pi t) / (2 pi).
VerificationReport check_transport_laws(const GaugeField& field, const std::vector<Curve>& curves,
                                        const ExperimentConfig& cfg, int triples = 100);

/// duhamel_derivative against central differences (eps 1e-5) over cfg.checks
/// random su(2) pairs (Z, dZ).
VerificationReport check_duhamel(const ExperimentConfig& cfg);

/// transport_derivative against central differences of transport along
/// perturb(gamma, X, +-eps), alternating vanishing and free endpoints.
VerificationReport check_first_derivative(const GaugeField& field,
                                          const std::vector<Curve>& curves,
                                          const ExperimentConfig& cfg);

/// The H^0-gradient pairing <J, X (x) Phi> against g(d_X U, Phi) with d_X U
/// from central differences, cfg.checks pairs per curve.
VerificationReport check_gradient(const GaugeField& field, const std::vector<Curve>& curves,
                                  const ExperimentConfig& cfg);

// ----- Levy Laplacian -----

/// The kernel bilinear form against the mixed second difference of
/// transport over 10 random (X, Y) in H^1_{0,0}, and the kernel symmetries.
VerificationReport check_kernels(const GaugeField& field, const std::vector<Curve>& curves,
                                 const ExperimentConfig& cfg, int pairs = 10);

/// Leading coefficient c of the Cesaro bias, estimate_n - exact = c / n + ...:
/// with g = tr K^L, the Levy part contributes -(g(0) + g(1)) / 4 + (int g) / 2
/// and the Volterra part its diagonal trace int tr K^V(t, t) dt.
Matrix cesaro_bias_coefficient(const TransportCache& cache, const KernelTriple& kernels,
                               const Matrix& laplacian);

struct CesaroRow {
  int curve = 0;
  int n = 0;
  double err_abs = 0.0;
  double err_rel = 0.0;
};

struct LaplacianIdentity {
  VerificationReport report;
  std::vector<CesaroRow> sweep;
  std::vector<FiberMap> laplacian;
};

/// Per curve: kernel route vs closed form, Cesaro estimate at the largest n
/// vs closed form, and the log-log slope of the Cesaro error.
LaplacianIdentity verify_laplacian_identity(const GaugeField& field,
                                            const std::vector<Curve>& curves,
                                            const ExperimentConfig& cfg);

/// The scalar functional L_f for a seeded f: its gradient against central
/// differences, its Levy Laplacian against the Fourier closed form and the
/// Cesaro estimator, and the heat-flow identity.
VerificationReport check_functionals(const std::vector<Curve>& curves,
                                     const ExperimentConfig& cfg);

/// d/ds L_{f(s)} (five-point difference of the closed-form flow) against
/// Delta_L L_{f(s)} at each of `times`.
VerificationReport verify_functional_heat(const ScalarField& f0, const std::vector<Curve>& curves,
                                          const std::vector<double>& times, double tolerance);

// ----- heat flow -----

struct FlowRun {
  std::shared_ptr<const FlowTrajectory> trajectory;
  double seconds = 0.0;
};

/// The configured su(2) flow, keeping the checkpoints and their FD
/// neighbours; every offered state is also passed to `on_save`.
FlowRun run_configured_flow(const ExperimentConfig& cfg,
                            std::function<void(const FlowState&)> on_save = {});

/// Action monotonicity along `run`, the abelian oracle on a multi-mode field,
/// stationarity of critical fields and the RK4 / stencil order factors.
VerificationReport check_heat_flow(const ExperimentConfig& cfg, const FlowRun& run);

// ----- the heat equation for transport -----

/// At each checkpoint and curve: (i) d_s U from the rhs velocity, (ii) d_s U
/// by central differences across snapshots, (iii) the Levy Laplacian; plus an
/// abelian flow and s-independent critical fields.
VerificationReport verify_main_theorem(const ExperimentConfig& cfg, const FlowRun& run,
                                       const std::vector<Curve>& curves);

struct RSample {
  double r = 0.0;
  /// -int_0^r U_{1,t} (d_s A_n - nabla^m F_mn) gamma'^n U_{t,0} dt
  FiberMap integral;
  /// U_{1,r}(gamma) (d_s U(gamma^r) - Delta_L U(gamma^r))
  FiberMap definition;
};

/// d_s U of a (plateau) curve at fixed s.
using SDerivative = std::function<FiberMap(const Curve&)>;

/// R(r) both ways on r_grid. `ds_u` defaults to transport_s_derivative of the
/// flow.
std::vector<RSample> r_diagnostic(const ConnectionFlow& flow, const Curve& gamma, double s,
                                  const std::vector<double>& r_grid, SDerivative ds_u = {},
                                  TransportOptions options = {}, int threads = 1);

/// r = 0, step, ..., 1.
std::vector<double> r_grid(double step = 0.025);

struct RDiagnostic {
  VerificationReport report;
  /// (label, samples) per diagnosed flow.
  std::vector<std::pair<std::string, std::vector<RSample>>> tables;
};

/// R(r) for the configured flow (exact: both routes near zero) and for the
/// same flow perturbed by a bump centred at gamma(1/2) (R moves only while
/// the curve crosses the bump).
RDiagnostic run_r_diagnostic(const ExperimentConfig& cfg, const FlowRun& run,
                             const Curve& gamma);

}  // namespace levyflow
