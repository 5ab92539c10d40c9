#pragma once

// H^1 curves on the torus and vector fields along them.
//
// Curves are closed-form parametric maps [0,1] -> R^d, read as lifts of
// curves on T^d: positions are not wrapped, fields wrap on evaluation. On the
// flat torus the exponential map is addition, the covariant derivative along
// a curve is the plain t-derivative, and the H^0 / H^1 products are the
// Euclidean ones.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/quadrature.hpp"

namespace levyflow {

inline constexpr int kDefaultPanels = 256;

struct CurveSamples {
  std::vector<double> t;
  std::vector<Point> position;
  std::vector<Vector> velocity;
};

class Curve {
 public:
  using PositionFn = std::function<Point(double)>;
  using VelocityFn = std::function<Vector(double)>;

  /// `breaks` lists interior parameters where the velocity may jump.
  Curve(int dim, PositionFn position, VelocityFn velocity, std::vector<double> breaks = {});

  int dim() const { return dim_; }
  Point position(double t) const { return position_(t); }
  Vector velocity(double t) const { return velocity_(t); }
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Uniform grid of m + 1 nodes on [0, 1].
  CurveSamples sample(int m) const;

  /// Composite Gauss-Legendre grid aligned with the breakpoints.
  QuadratureGrid grid(int panels = kDefaultPanels) const;

  /// Euclidean length, by quadrature.
  double length(int panels = kDefaultPanels) const;

 private:
  int dim_;
  PositionFn position_;
  VelocityFn velocity_;
  std::vector<double> breaks_;
};

/// A vector field X(t) along a curve, optionally with its t-derivative.
class CurveField {
 public:
  using Fn = std::function<Vector(double)>;

  CurveField(int dim, Fn value, Fn derivative = {}, bool vanishes_at_ends = false);

  static CurveField zero(int dim);

  int dim() const { return dim_; }
  Vector value(double t) const { return value_(t); }
  bool has_derivative() const { return static_cast<bool>(derivative_); }
  /// Throws DomainError when no derivative was supplied.
  Vector derivative(double t) const;
  /// Flag for the H^1_{0,0} subspace: X(0) = X(1) = 0 exactly.
  bool vanishes_at_ends() const { return vanishes_at_ends_; }

  /// c * X
  CurveField scaled(double c) const;

 private:
  int dim_;
  Fn value_;
  Fn derivative_;
  bool vanishes_at_ends_;
};

// ----- curve library -----

Curve straight_line(int dim, const Point& from, const Point& to);
Curve constant_curve(int dim, const Point& at);
/// Circle of `radius` in the (axis0, axis1) plane, `turns` revolutions.
Curve circle(int dim, const Point& center, double radius, double turns = 1.0, int axis0 = 0,
             int axis1 = 1);
/// x0 + v t + amplitude * sum_k (a_k sin(pi k t) + b_k (1 - cos(pi k t))) / k
/// with x0 in [0, L)^d, v in [-L/2, L/2)^d, a_k, b_k in [-1, 1)^d from `seed`.
Curve fourier_curve(const Torus& torus, int modes, double amplitude, std::uint64_t seed);

// ----- field library -----

/// e_n(t) ê_axis with e_n(t) = sqrt 2 sin(pi n t). Throws DomainError if n < 1.
CurveField sine_basis(int n, int dim, int axis = 0);
/// X(t) = a + b t + sum_k c_k sqrt 2 sin(pi k t), coefficients uniform in
/// [-amplitude, amplitude). With `vanishing` set, a = b = 0.
CurveField random_curve_field(int dim, int modes, double amplitude, bool vanishing,
                              std::uint64_t seed);
CurveField constant_field(int dim, const Vector& v);

// ----- operations -----

/// integral_0^1 X(t).Y(t) dt on the curve's grid.
double h0_inner(const CurveField& x, const CurveField& y, const Curve& gamma,
                int panels = kDefaultPanels);
/// h0_inner plus integral_0^1 X'(t).Y'(t) dt.
double h1_inner(const CurveField& x, const CurveField& y, const Curve& gamma,
                int panels = kDefaultPanels);

/// nabla X along gamma; on the flat torus this is X'.
CurveField covariant_deriv_along(const CurveField& x, const Curve& gamma);

/// t -> gamma(t) + eps X(t), velocity gamma' + eps X'.
Curve perturb(const Curve& gamma, const CurveField& x, double eps);

/// gamma stopped at parameter r: gamma(t) for t <= r, gamma(r) after.
Curve plateau(const Curve& gamma, double r);

struct Reparametrization {
  std::function<double(double)> map;
  std::function<double(double)> derivative;
};
/// phi(t) = t + alpha sin(2 pi t) / (2 pi), monotone for |alpha| < 1.
Reparametrization sine_reparametrization(double alpha);
/// t -> gamma(phi(t)). Throws DomainError unless phi(0) = 0, phi(1) = 1 and
/// phi' > 0 on a check grid.
Curve reparametrize(const Curve& gamma, const Reparametrization& phi);

/// gamma1 on [0, 1/2], gamma2 on [1/2, 1], both at double speed. Endpoints must
/// agree on the torus to 1e-10; gamma2's lift is shifted to continue gamma1's.
Curve concat(const Curve& first, const Curve& second, const Torus& torus);

}  // namespace levyflow
