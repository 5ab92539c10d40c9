#pragma once

// Connections on the flat torus T^d = [0, L)^d, d in {2, 3}.
//
// The metric is Euclidean, so index raising is the identity and every base
// Christoffel symbol vanishes: covariant derivatives of the curvature reduce
// to  nabla_l F_mn = d_l F_mn + [A_l, F_mn].
//
// Two representations share one interface:
//   * AnalyticField: a finite Fourier sum, evaluated and differentiated
//     exactly at any point;
//   * LatticeField: LieElem values on a uniform m^d grid. Site quantities use
//     4th-order central differences; off-grid values come from periodic cubic
//     B-spline interpolation of the corresponding site arrays.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "levyflow/algebra.hpp"

namespace levyflow {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using Vector = std::array<double, kMaxDim>;
using WaveVector = std::array<int, kMaxDim>;

/// Entries [0, dim) are meaningful.
using LieTuple = std::array<LieElem, kMaxDim>;

class Torus {
 public:
  Torus(int dim, double length);

  int dim() const { return dim_; }
  double length() const { return length_; }

  /// Reduces every coordinate into [0, L).
  Point wrap(const Point& x) const;

  /// 2 pi |k| / L
  double wavenumber(const WaveVector& k) const;

  double volume() const;

  friend bool operator==(const Torus&, const Torus&) = default;

 private:
  int dim_;
  double length_;
};

/// F_{mu nu} with antisymmetry enforced by storing mu < nu only.
class CurvatureValue {
 public:
  CurvatureValue() = default;
  CurvatureValue(int dim, int rank);

  int dim() const { return dim_; }
  static int num_pairs(int dim) { return dim * (dim - 1) / 2; }
  /// Index of the pair (mu, nu), mu < nu.
  static int pair_index(int mu, int nu, int dim);

  /// F_{mu nu}; zero on the diagonal, sign-flipped below it.
  LieElem operator()(int mu, int nu) const;
  void set(int mu, int nu, const LieElem& value);

  const LieElem& pair(int p) const { return upper_[static_cast<std::size_t>(p)]; }
  LieElem& pair(int p) { return upper_[static_cast<std::size_t>(p)]; }

 private:
  int dim_ = 0;
  int rank_ = 0;
  std::array<LieElem, 3> upper_{};
};

enum class Phase { Cos, Sin };

/// coeff * cos(2 pi k.x / L) (or sin) contributing to A_mu.
struct FourierMode {
  WaveVector k{};
  int mu = 0;
  Phase phase = Phase::Cos;
  LieElem coeff;
};

class AnalyticField {
 public:
  AnalyticField(Torus torus, int rank, std::vector<FourierMode> modes);

  static AnalyticField zero(const Torus& torus, int rank) { return {torus, rank, {}}; }

  const Torus& torus() const { return torus_; }
  int rank() const { return rank_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  /// max_i |k_i| over all modes
  int max_wavenumber() const;

 private:
  Torus torus_;
  int rank_;
  std::vector<FourierMode> modes_;
};

/// Site values on a uniform grid. Sites are ordered row-major (axis 0 slowest);
/// the d components of a site are contiguous (mu fastest).
class LatticeField {
 public:
  LatticeField(Torus torus, int rank, int resolution, std::vector<LieElem> values);

  static LatticeField zero(const Torus& torus, int rank, int resolution);

  const Torus& torus() const { return torus_; }
  int rank() const { return rank_; }
  int resolution() const { return m_; }
  int num_sites() const { return num_sites_; }
  double spacing() const { return torus_.length() / m_; }

  const LieElem& at(int site, int mu) const {
    return values_[static_cast<std::size_t>(site * torus_.dim() + mu)];
  }
  const std::vector<LieElem>& values() const { return values_; }

  std::array<int, kMaxDim> site_coords(int site) const;
  /// Periodic: coordinates are reduced modulo m.
  int site_index(const std::array<int, kMaxDim>& coords) const;
  Point site_position(int site) const;

 private:
  Torus torus_;
  int rank_;
  int m_;
  int num_sites_;
  std::vector<LieElem> values_;
};

namespace detail {
class FieldRepr;
}

/// A connection A = A_mu dx^mu on the torus. Immutable; copies share state.
class GaugeField {
 public:
  GaugeField(AnalyticField field);  // NOLINT(google-explicit-constructor)
  GaugeField(LatticeField field);   // NOLINT(google-explicit-constructor)

  bool is_analytic() const;
  bool is_lattice() const { return !is_analytic(); }
  /// Throws DomainError if the representation differs.
  const AnalyticField& analytic() const;
  const LatticeField& lattice() const;

  const Torus& torus() const;
  int dim() const { return torus().dim(); }
  int rank() const;

  LieTuple eval(const Point& x) const;
  /// A_mu(x) v^mu
  Matrix contract(const Point& x, const Vector& v) const;
  /// (d_axis A_mu)(x), mu = 0..d-1
  LieTuple partial_deriv(const Point& x, int axis) const;
  CurvatureValue curvature(const Point& x) const;
  /// nabla_axis F_{mu nu}(x)
  CurvatureValue cov_deriv_curvature(const Point& x, int axis) const;
  /// (nabla^mu F_{mu nu})(x), nu = 0..d-1
  LieTuple cov_div_curvature(const Point& x) const;

 private:
  std::shared_ptr<const detail::FieldRepr> repr_;
};

/// Samples a field at the sites of an m^d grid.
LatticeField sample_lattice(const GaugeField& field, int resolution);

/// max over index triples of |nabla_m F_nl + nabla_n F_lm + nabla_l F_mn|.
double bianchi_residual(const GaugeField& field, const Point& x);

/// A smooth map psi: T^d -> SU(N), with an optional exact derivative. Without
/// one, 4th-order central differences are used.
struct GaugeFunction {
  std::function<Matrix(const Point&)> value;
  std::function<Matrix(const Point&, int)> derivative;
};

/// psi(x) = exp(theta(x) T) with theta = sum_j c_j sin(2 pi k_j.x/L + phi_j).
/// The derivative is exact.
struct PhaseMode {
  WaveVector k{};
  double amplitude = 0.0;
  double offset = 0.0;
};
GaugeFunction phase_gauge(const Torus& torus, const LieElem& generator,
                          std::vector<PhaseMode> modes);

/// A'_mu = psi^-1 A_mu psi + psi^-1 d_mu psi, sampled on an m^d lattice.
GaugeField gauge_transform(const GaugeField& field, const GaugeFunction& psi,
                           int resolution);

/// -1/2 sum_x a^d sum_{mu,nu} tr(F_mn F_mn). Lattice fields sum over their
/// sites; analytic fields over a grid fine enough to be exact for their
/// trigonometric content (or `quadrature_points` per axis when > 0).
double ym_action(const GaugeField& field, int quadrature_points = 0);

/// Seeded random su(2) Fourier field: `modes` modes with wave-vector
/// components in [-max_k, max_k] (not all zero), random direction mu and
/// phase, coefficients uniform in the su(2) ball of radius `amplitude`.
AnalyticField random_su2_field(const Torus& torus, int modes, double amplitude,
                               int max_k, std::uint64_t seed);

/// Real scalar Fourier series on the torus, f = sum_j c_j cos/sin(2 pi k_j.x/L).
struct ScalarMode {
  WaveVector k{};
  Phase phase = Phase::Cos;
  double coeff = 0.0;
};

class ScalarField {
 public:
  ScalarField(Torus torus, std::vector<ScalarMode> modes);

  const Torus& torus() const { return torus_; }
  const std::vector<ScalarMode>& modes() const { return modes_; }

  double value(const Point& x) const;
  Vector gradient(const Point& x) const;
  double laplacian(const Point& x) const;

  /// Solution of d_s f = Delta f at time s with this field as initial data.
  ScalarField heat_evolved(double s) const;

 private:
  Torus torus_;
  std::vector<ScalarMode> modes_;
};

ScalarField random_scalar_field(const Torus& torus, int modes, double amplitude,
                                int max_k, std::uint64_t seed);

}  // namespace levyflow
