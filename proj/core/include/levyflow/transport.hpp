#pragma once

// Parallel transport U_{t,s}(gamma), the solution of
//   d/dt U_{t,s} = -A_mu(gamma(t)) gamma'^mu(t) U_{t,s},  U_{s,s} = I,
// and its derivatives: Duhamel's formula, the first functional derivative
// d_X U and the flow-time derivative d_s U.
//
// Integrator: exponential midpoint steps U <- exp(-h Z(t + h/2)) U, with one
// Richardson level (4 U_{h/2} - U_h) / 3 per sub-interval and projection back
// to SU(N). The midpoint rule is symmetric, so the extrapolated scheme is of
// order 4.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "levyflow/algebra.hpp"
#include "levyflow/field.hpp"
#include "levyflow/path.hpp"
#include "levyflow/quadrature.hpp"

namespace levyflow {

inline constexpr double kDefaultStep = 1.0 / 4096.0;

struct TransportOptions {
  double step = kDefaultStep;
  int panels = kDefaultPanels;
};

/// t -> Z(t), the generator of dP/dt = -Z P.
using Generator = std::function<Matrix(double)>;

/// P(b) for dP/dt = -Z P, P(a) = I, integrated with step about h.
/// `breaks` are points in (a, b) where Z may jump; steps never straddle them.
/// With `special_unitary` set the result is projected onto SU(N).
Matrix propagate(const Generator& z, double a, double b, double h, int rank,
                 std::span<const double> breaks = {}, bool special_unitary = true);

/// P(t) at every node of a quadrature grid and at its upper end, from one
/// sweep. P(grid.lower()) = I.
class Propagator {
 public:
  Propagator(const Generator& z, QuadratureGrid grid, double h, int rank,
             bool special_unitary = true);

  const QuadratureGrid& grid() const { return grid_; }
  int rank() const { return rank_; }
  /// P(t_i)
  const Matrix& at(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  /// P(t_i)^-1
  const Matrix& inverse_at(int i) const { return inverses_[static_cast<std::size_t>(i)]; }
  /// P(upper)
  const Matrix& end() const { return end_; }

 private:
  QuadratureGrid grid_;
  int rank_;
  std::vector<Matrix> nodes_;
  std::vector<Matrix> inverses_;
  Matrix end_;
};

/// Transports along one curve cached on its quadrature grid, plus the curve
/// data at the nodes. U_{1,t} = U_{1,0} U_{t,0}^dagger.
class TransportCache {
 public:
  TransportCache(GaugeField field, Curve curve, TransportOptions options = {});

  const GaugeField& field() const { return field_; }
  const Curve& curve() const { return curve_; }
  const QuadratureGrid& grid() const { return prop_->grid(); }
  const TransportOptions& options() const { return options_; }
  int rank() const { return prop_->rank(); }
  int size() const { return grid().size(); }

  /// U_{t_i,0}
  const Matrix& forward(int i) const { return prop_->at(i); }
  /// U_{1,0}
  const Matrix& total() const { return prop_->end(); }
  /// U_{1,t_i}
  Matrix backward(int i) const { return total() * prop_->inverse_at(i); }
  /// U_{1,t_i} m U_{t_i,0}
  Matrix sandwich(int i, const Matrix& m) const { return backward(i) * m * forward(i); }
  /// U_{t_i,0}^-1 m U_{t_i,0}
  Matrix pullback(int i, const Matrix& m) const {
    return prop_->inverse_at(i) * m * forward(i);
  }

  const Point& position(int i) const { return positions_[static_cast<std::size_t>(i)]; }
  const Vector& velocity(int i) const { return velocities_[static_cast<std::size_t>(i)]; }

 private:
  GaugeField field_;
  Curve curve_;
  TransportOptions options_;
  std::unique_ptr<Propagator> prop_;
  std::vector<Point> positions_;
  std::vector<Vector> velocities_;
};

struct TransportRequest {
  GaugeField field;
  Curve curve;
  double s = 0.0;
  double t = 1.0;
  double step = kDefaultStep;
};

/// U_{t,s}(gamma). Throws DomainError unless 0 <= s <= t <= 1 and step > 0.
GroupElem transport(const TransportRequest& req);
/// U_{1,0}(gamma)
GroupElem transport(const GaugeField& field, const Curve& curve, double step = kDefaultStep);

/// -P(d) integral_c^d P(t)^-1 dZ(t) P(t) dt with dP/dt = -Z P, P(c) = I: the
/// derivative of P(d) in the direction dZ.
FiberMap duhamel_derivative(const Generator& z, const Generator& dz, double c, double d,
                            TransportOptions options = {});

/// d_X U_{1,0}: the bulk curvature integral plus the two endpoint terms.
FiberMap transport_derivative(const TransportCache& cache, const CurveField& x);
FiberMap transport_derivative(const GaugeField& field, const Curve& curve, const CurveField& x,
                              TransportOptions options = {});

/// (x, v) -> d_s A_mu(s, x) v^mu
using FieldVelocity = std::function<Matrix(const Point&, const Vector&)>;

/// A time-dependent connection s -> A(s, .) with access to d_s A.
class ConnectionFlow {
 public:
  virtual ~ConnectionFlow() = default;
  virtual GaugeField field(double s) const = 0;
  /// d_s A_mu(s, x) v^mu. Throws DomainError when unavailable at s.
  virtual Matrix velocity(double s, const Point& x, const Vector& v) const = 0;
};

/// -integral U_{1,t} dA_mu(gamma(t)) gamma'^mu U_{t,0} dt at fixed s.
FiberMap transport_s_derivative(const TransportCache& cache, const FieldVelocity& da);
FiberMap transport_s_derivative(const ConnectionFlow& flow, const Curve& curve, double s,
                                TransportOptions options = {});

}  // namespace levyflow
