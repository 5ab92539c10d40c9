#pragma once

// Site-level finite differences and periodic spline interpolation for
// LatticeField. Internal to the library.

#include <vector>

#include "levyflow/field.hpp"

namespace levyflow::detail {

/// Derived site arrays of a lattice connection. Flattened layouts:
///   da    [(site * d + l) * d + mu]          d_l A_mu
///   f     [site * P + p]                     F for pair p (mu < nu)
///   cov_f [(site * d + l) * P + p]           nabla_l F_p
///   div   [site * d + nu]                    nabla^mu F_{mu nu}
struct LatticeDerivatives {
  int dim = 0;
  int pairs = 0;
  std::vector<Matrix> da;
  std::vector<Matrix> f;
  std::vector<Matrix> cov_f;
  std::vector<Matrix> div;
};

/// `with_covariant` = false stops after F (enough for the action).
LatticeDerivatives lattice_derivatives(const LatticeField& field, bool with_covariant = true);

/// Periodic cubic B-spline interpolant of `components` matrix-valued arrays
/// laid out as [site * components + c].
class PeriodicSpline {
 public:
  PeriodicSpline(const Torus& torus, int resolution, int components,
                 const std::vector<Matrix>& site_values);

  int components() const { return components_; }

  /// Writes all components at x into out[0..components).
  void eval(const Point& x, Matrix* out) const;
  /// sum_c weights[c] * component c at x.
  Matrix eval_contracted(const Point& x, const double* weights) const;

 private:
  struct Stencil {
    std::array<std::array<int, 4>, kMaxDim> idx{};
    std::array<std::array<double, 4>, kMaxDim> w{};
  };
  Stencil stencil(const Point& x) const;

  Torus torus_;
  int m_;
  int components_;
  int rank_;
  std::vector<Matrix> coeffs_;
};

}  // namespace levyflow::detail
