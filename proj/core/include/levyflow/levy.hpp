#pragma once

// H^0-gradients, the second-derivative kernels of parallel transport and the
// covariant Levy Laplacian.
//
// For X, Y vanishing at the endpoints the Hessian of U = U_{1,0}(gamma) splits
// into three kernels,
//   d_Y d_X U = int int K^V_mn(t, s) X^m(t) Y^n(s) ds dt
//             + int K^L_mn(t) X^m(t) Y^n(t) dt
//             + 1/2 int K^S_mn(t) (X'^m Y^n + Y'^m X^n)(t) dt,
// and the Levy Laplacian is the trace int K^L_mm dt. With M_m = F_ml gamma'^l,
//   K^V_mn(t, s) = U_{1,t} M_m(t) U_{t,s} M_n(s) U_{s,0}   (t >= s),
//   K^L_mn(t)    = 1/2 U_{1,t} (-nabla_m F_nl - nabla_n F_ml) gamma'^l U_{t,0},
//   K^S_mn(t)    = U_{1,t} F_mn U_{t,0}.

#include <cstdint>
#include <functional>
#include <vector>

#include "levyflow/errors.hpp"
#include "levyflow/field.hpp"
#include "levyflow/path.hpp"
#include "levyflow/transport.hpp"

namespace levyflow {

/// Nodal values J^mu(t_i) of an H^0-gradient.
class GradientField {
 public:
  GradientField(int dim, QuadratureGrid grid, std::vector<FiberMap> values);

  int dim() const { return dim_; }
  const QuadratureGrid& grid() const { return grid_; }
  const FiberMap& at(int i, int mu) const {
    return values_[static_cast<std::size_t>(i * dim_ + mu)];
  }

  /// sum_mu int J^mu(t) X^mu(t) dt, the directional derivative along X.
  FiberMap apply(const CurveField& x) const;
  /// sum_mu int g(J^mu(t), Phi) X^mu(t) dt
  double pair(const CurveField& x, const FiberMap& phi) const;

 private:
  int dim_;
  QuadratureGrid grid_;
  std::vector<FiberMap> values_;
};

/// J^mu(t) = -U_{1,t} F_{mu nu} gamma'^nu U_{t,0}
GradientField h0_gradient_transport(const TransportCache& cache);
GradientField h0_gradient_transport(const GaugeField& field, const Curve& curve,
                                    TransportOptions options = {});

/// L_f(gamma) = int_0^1 f(gamma(t)) dt
double functional_value(const ScalarField& f, const Curve& curve, int panels = kDefaultPanels);
/// grad L_f(gamma; t) = nabla f(gamma(t)), as 1 x 1 fiber maps.
GradientField h0_gradient_functional(const ScalarField& f, const Curve& curve,
                                     int panels = kDefaultPanels);
/// Delta_L L_f(gamma) = int_0^1 (Delta f)(gamma(t)) dt
double levy_laplacian_functional(const ScalarField& f, const Curve& curve,
                                 int panels = kDefaultPanels);

class KernelTriple {
 public:
  /// Volterra factors G_mu(t_i) = U_{t_i,0}^-1 M_mu(t_i) U_{t_i,0}, stored
  /// with U_{1,0}: K^V_mn(t_i, t_j) = U_{1,0} G_m(t_i) G_n(t_j) for i >= j.
  /// Levy values per node (d x d, symmetric) and singular values per node
  /// (pairs mu < nu).
  KernelTriple(int dim, QuadratureGrid grid, FiberMap total, std::vector<FiberMap> volterra,
               std::vector<FiberMap> levy, std::vector<FiberMap> singular);

  static KernelTriple zero(int dim, int rank, const QuadratureGrid& grid);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(total_.rows()); }
  const QuadratureGrid& grid() const { return grid_; }

  /// K^V_{mu nu}(t_i, t_j), with the t >= s / t < s branch by node order.
  FiberMap volterra(int i, int j, int mu, int nu) const;
  const FiberMap& levy(int i, int mu, int nu) const {
    return levy_[static_cast<std::size_t>((i * dim_ + mu) * dim_ + nu)];
  }
  FiberMap singular(int i, int mu, int nu) const;

  /// The assembled form K<X, Y>. The Volterra part is integrated through the
  /// running integral of G_Y, which follows the jump across t = s exactly.
  FiberMap bilinear(const CurveField& x, const CurveField& y) const;

  /// max over nodes of |K^L_mn - K^L_nm|, |K^S_mn + K^S_nm|
  double levy_asymmetry() const;
  double singular_symmetry() const;

  /// max over nodes and index pairs of |K|, per kernel. The Volterra kernel
  /// is scanned on every `stride`-th node in each argument.
  double volterra_norm(int stride = kGaussOrder) const;
  double levy_norm() const;
  double singular_norm() const;

 private:
  int dim_;
  QuadratureGrid grid_;
  FiberMap total_;
  std::vector<FiberMap> g_;
  std::vector<FiberMap> levy_;
  std::vector<FiberMap> singular_;
};

KernelTriple second_kernels(const TransportCache& cache);
KernelTriple second_kernels(const GaugeField& field, const Curve& curve,
                            TransportOptions options = {});

/// int sum_mu K^L_{mu mu}(t) dt
FiberMap levy_divergence(const KernelTriple& kernels);

/// -int U_{1,t} nabla^mu F_{mu nu} gamma'^nu U_{t,0} dt. Cross-checked against
/// levy_divergence(second_kernels(.)); throws NumericalAbort if the two routes
/// differ by more than 1e-8 (relative to max(1, |result|)).
FiberMap levy_laplacian_transport(const TransportCache& cache);
FiberMap levy_laplacian_transport(const GaugeField& field, const Curve& curve,
                                  TransportOptions options = {});
/// The closed-form integral alone.
FiberMap levy_laplacian_closed_form(const TransportCache& cache);

struct CesaroOptions {
  double eps = 1e-3;
  double step = kDefaultStep;
};

/// Per-k terms T_k = sum_mu second central difference of `value` along
/// gamma +- eps e_k e_mu, k = 1..n. The Cesaro mean at n is their average.
template <typename T>
std::vector<T> cesaro_terms(const std::function<T(const Curve&)>& value, const Curve& curve,
                            int n, double eps);

/// (1/n) sum_{k<=n} sum_mu D^2 U(e_k e_mu, e_k e_mu) for parallel transport.
FiberMap cesaro_levy_estimate(const GaugeField& field, const Curve& curve, int n,
                              CesaroOptions options = {});
/// The running Cesaro means at every n in `ns` (ascending) from one sweep.
std::vector<FiberMap> cesaro_levy_sweep(const GaugeField& field, const Curve& curve,
                                        const std::vector<int>& ns, CesaroOptions options = {});
/// The same estimator for L_f.
double cesaro_functional_estimate(const ScalarField& f, const Curve& curve, int n,
                                  double eps = 1e-3);

/// Running means of terms[0..n-1] at each n in `ns`.
template <typename T>
std::vector<T> running_means(const std::vector<T>& terms, const std::vector<int>& ns);

// ----- implementation -----

template <typename T>
std::vector<T> cesaro_terms(const std::function<T(const Curve&)>& value, const Curve& curve,
                            int n, double eps) {
  if (n < 1) throw DomainError("cesaro: n must be >= 1");
  const T centre = value(curve);
  std::vector<T> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    T acc = T(0.0 * centre);
    for (int mu = 0; mu < curve.dim(); ++mu) {
      const CurveField e = sine_basis(k, curve.dim(), mu);
      const T plus = value(perturb(curve, e, eps));
      const T minus = value(perturb(curve, e, -eps));
      acc = acc + (plus - 2.0 * centre + minus) / (eps * eps);
    }
    terms.push_back(acc);
  }
  return terms;
}

template <typename T>
std::vector<T> running_means(const std::vector<T>& terms, const std::vector<int>& ns) {
  std::vector<T> out;
  if (terms.empty()) return out;
  T sum = T(0.0 * terms.front());
  int k = 0;
  for (const int n : ns) {
    if (n < 1 || n > static_cast<int>(terms.size())) {
      throw DomainError("running_means: n out of range");
    }
    for (; k < n; ++k) sum = sum + terms[static_cast<std::size_t>(k)];
    out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

}  // namespace levyflow
