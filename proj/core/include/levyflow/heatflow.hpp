#pragma once

// Yang-Mills heat flow  d_s A_nu = nabla^mu F_{mu nu}  on the lattice, by
// classical RK4 in s with the site stencils of field.hpp, plus the abelian
// closed form and several ConnectionFlow adapters for the s-derivative of
// transport.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/transport.hpp"

namespace levyflow {

struct FlowState {
  double s = 0.0;
  GaugeField field;
  double action = 0.0;
};

/// Builds a state at flow time s, computing the action. Throws DomainError
/// unless the field is a lattice field.
FlowState make_state(const GaugeField& field, double s = 0.0);

/// nabla^mu F_{mu nu} at every site, projected to su(N); layout as
/// LatticeField::values (mu fastest).
std::vector<LieElem> ym_rhs(const LatticeField& field);

/// (sum_x a^d sum_nu g(r_nu, r_nu))^(1/2)
double rhs_norm(const LatticeField& field, const std::vector<LieElem>& rhs);

/// a^2 / (2 d 4)
double cfl_limit(const LatticeField& field);

/// One RK4 step. Throws NumericalAbort if ds exceeds cfl_limit.
FlowState step(const FlowState& state, double ds);

struct FlowLogEntry {
  double s = 0.0;
  double action = 0.0;
  double rhs_norm = 0.0;
};

struct FlowOptions {
  double total = 0.0;
  double ds = 0.0;
  /// Save cadence in steps; step 0 and the final step always count.
  int save_every = 1;
  /// Asked at every step whether to keep the state in memory (default: the
  /// save cadence).
  std::function<bool(int step, double s)> keep;
  /// Called for every state on the save cadence.
  std::function<void(const FlowState&)> on_save;
  /// Abort when the action grows by more than this relative amount in a step.
  double blowup_tolerance = 1e-6;
};

class FlowTrajectory {
 public:
  FlowTrajectory(double ds, std::vector<FlowState> states, std::vector<FlowLogEntry> log);

  double ds() const { return ds_; }
  const std::vector<FlowState>& states() const { return states_; }
  const std::vector<FlowLogEntry>& log() const { return log_; }

  /// The kept state at flow time s (to 1e-9 ds). Throws DomainError if absent.
  const FlowState& at(double s) const;
  bool has(double s) const;

 private:
  const FlowState* find(double s) const;

  double ds_;
  std::vector<FlowState> states_;
  std::vector<FlowLogEntry> log_;
};

/// Integrates from a lattice field over [0, total] with uniform steps no
/// larger than options.ds. Throws NumericalAbort on CFL violation or blow-up.
FlowTrajectory flow(const GaugeField& initial, const FlowOptions& options);

/// Closed-form abelian flow: each Fourier mode group is split into its
/// transverse part, scaled by exp(-(2 pi |k| / L)^2 s), and its gradient part,
/// kept. Throws DomainError if the coefficients do not commute.
AnalyticField abelian_oracle(const AnalyticField& initial, double s);
/// d/ds of abelian_oracle.
AnalyticField abelian_oracle_velocity(const AnalyticField& initial, double s);

// ----- flows for transport_s_derivative -----

/// The flow through a trajectory's kept states, with d_s A := ym_rhs of the
/// state, interpolated like the field itself.
class TrajectoryFlow final : public ConnectionFlow {
 public:
  explicit TrajectoryFlow(std::shared_ptr<const FlowTrajectory> trajectory);

  GaugeField field(double s) const override;
  Matrix velocity(double s, const Point& x, const Vector& v) const override;

 private:
  const GaugeField& rhs_field(double s) const;

  std::shared_ptr<const FlowTrajectory> trajectory_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const GaugeField>> rhs_;
};

/// The exact abelian flow of an analytic field.
class AbelianHeatFlow final : public ConnectionFlow {
 public:
  explicit AbelianHeatFlow(AnalyticField initial);

  GaugeField field(double s) const override;
  Matrix velocity(double s, const Point& x, const Vector& v) const override;

 private:
  AnalyticField initial_;
};

/// A flow given by closures, e.g. A(s) = s B.
class PrescribedFlow final : public ConnectionFlow {
 public:
  using FieldFn = std::function<GaugeField(double)>;
  using VelocityFn = std::function<Matrix(double, const Point&, const Vector&)>;

  PrescribedFlow(FieldFn field, VelocityFn velocity);

  GaugeField field(double s) const override { return field_(s); }
  Matrix velocity(double s, const Point& x, const Vector& v) const override;

 private:
  FieldFn field_;
  VelocityFn velocity_;
};

/// Smooth compactly supported bump exp(1 - 1 / (1 - rho^2)), rho = |x - c| / R
/// in the periodic distance; 1 at the centre, 0 for rho >= 1.
double bump(const Torus& torus, const Point& centre, double radius, const Point& x);

/// Adds bump(x) (w . v) B to the velocity of a base flow: the flow no longer
/// obeys the heat equation inside the bump.
class PerturbedFlow final : public ConnectionFlow {
 public:
  PerturbedFlow(std::shared_ptr<const ConnectionFlow> base, Torus torus, Point centre,
                double radius, Vector direction, LieElem generator);

  GaugeField field(double s) const override { return base_->field(s); }
  Matrix velocity(double s, const Point& x, const Vector& v) const override;

 private:
  std::shared_ptr<const ConnectionFlow> base_;
  Torus torus_;
  Point centre_;
  double radius_;
  Vector direction_;
  LieElem generator_;
};

}  // namespace levyflow
