#include "levyflow/levy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levyflow {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

Matrix scalar(double x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

}  // namespace

// --------------------------------------------------------- GradientField ----

GradientField::GradientField(int dim, QuadratureGrid grid, std::vector<FiberMap> values)
    : dim_(dim), grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != u(grid_.size() * dim_)) {
    throw DomainError("GradientField: expected one value per node and direction");
  }
}

FiberMap GradientField::apply(const CurveField& x) const {
  if (x.dim() != dim_) throw DomainError("GradientField: dimension mismatch");
  FiberMap acc = FiberMap::Zero(values_.front().rows(), values_.front().cols());
  for (int i = 0; i < grid_.size(); ++i) {
    const Vector xv = x.value(grid_.node(i));
    for (int mu = 0; mu < dim_; ++mu) acc += (grid_.weight(i) * xv[u(mu)]) * at(i, mu);
  }
  return acc;
}

double GradientField::pair(const CurveField& x, const FiberMap& phi) const {
  return fiber_metric(apply(x), phi);
}

GradientField h0_gradient_transport(const TransportCache& cache) {
  const GaugeField& a = cache.field();
  const int d = a.dim();
  std::vector<FiberMap> values;
  values.reserve(u(cache.size() * d));
  for (int i = 0; i < cache.size(); ++i) {
    const CurvatureValue f = a.curvature(cache.position(i));
    const Vector& v = cache.velocity(i);
    for (int mu = 0; mu < d; ++mu) {
      Matrix m = zero_matrix(a.rank());
      for (int nu = 0; nu < d; ++nu) {
        if (nu != mu) m += v[u(nu)] * f(mu, nu).matrix();
      }
      values.push_back(-cache.sandwich(i, m));
    }
  }
  return {d, cache.grid(), std::move(values)};
}

GradientField h0_gradient_transport(const GaugeField& field, const Curve& curve,
                                    TransportOptions options) {
  return h0_gradient_transport(TransportCache(field, curve, options));
}

double functional_value(const ScalarField& f, const Curve& curve, int panels) {
  const QuadratureGrid g = curve.grid(panels);
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) acc += g.weight(i) * f.value(curve.position(g.node(i)));
  return acc;
}

GradientField h0_gradient_functional(const ScalarField& f, const Curve& curve, int panels) {
  const QuadratureGrid g = curve.grid(panels);
  const int d = curve.dim();
  std::vector<FiberMap> values;
  values.reserve(u(g.size() * d));
  for (int i = 0; i < g.size(); ++i) {
    const Vector grad = f.gradient(curve.position(g.node(i)));
    for (int mu = 0; mu < d; ++mu) values.push_back(scalar(grad[u(mu)]));
  }
  return {d, g, std::move(values)};
}

double levy_laplacian_functional(const ScalarField& f, const Curve& curve, int panels) {
  const QuadratureGrid g = curve.grid(panels);
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) acc += g.weight(i) * f.laplacian(curve.position(g.node(i)));
  return acc;
}

// ---------------------------------------------------------- KernelTriple ----

KernelTriple::KernelTriple(int dim, QuadratureGrid grid, FiberMap total,
                           std::vector<FiberMap> volterra, std::vector<FiberMap> levy,
                           std::vector<FiberMap> singular)
    : dim_(dim),
      grid_(std::move(grid)),
      total_(std::move(total)),
      g_(std::move(volterra)),
      levy_(std::move(levy)),
      singular_(std::move(singular)) {
  const int n = grid_.size();
  if (g_.size() != u(n * dim_) || levy_.size() != u(n * dim_ * dim_) ||
      singular_.size() != u(n * CurvatureValue::num_pairs(dim_))) {
    throw DomainError("KernelTriple: inconsistent kernel sizes");
  }
}

KernelTriple KernelTriple::zero(int dim, int rank, const QuadratureGrid& grid) {
  const int n = grid.size();
  const Matrix z = zero_matrix(rank);
  return {dim,
          grid,
          identity_matrix(rank),
          std::vector<FiberMap>(u(n * dim), z),
          std::vector<FiberMap>(u(n * dim * dim), z),
          std::vector<FiberMap>(u(n * CurvatureValue::num_pairs(dim)), z)};
}

FiberMap KernelTriple::volterra(int i, int j, int mu, int nu) const {
  const FiberMap& gm = g_[u(i * dim_ + mu)];
  const FiberMap& gn = g_[u(j * dim_ + nu)];
  if (grid_.node(i) >= grid_.node(j)) return total_ * gm * gn;
  return total_ * gn * gm;
}

FiberMap KernelTriple::singular(int i, int mu, int nu) const {
  if (mu == nu) return zero_matrix(rank());
  const int p = CurvatureValue::pair_index(std::min(mu, nu), std::max(mu, nu), dim_);
  const FiberMap& s = singular_[u(i * CurvatureValue::num_pairs(dim_) + p)];
  return mu < nu ? s : FiberMap(-s);
}

FiberMap KernelTriple::bilinear(const CurveField& x, const CurveField& y) const {
  if (x.dim() != dim_ || y.dim() != dim_) throw DomainError("bilinear: dimension mismatch");
  if (!x.has_derivative() || !y.has_derivative()) {
    throw DomainError("bilinear: fields need derivatives");
  }
  const int n = grid_.size();
  const int r = rank();
  std::vector<Vector> xv(u(n));
  std::vector<Vector> yv(u(n));
  std::vector<Vector> xd(u(n));
  std::vector<Vector> yd(u(n));
  std::vector<Matrix> gx(u(n), zero_matrix(r));
  std::vector<Matrix> gy(u(n), zero_matrix(r));
  for (int i = 0; i < n; ++i) {
    const double t = grid_.node(i);
    xv[u(i)] = x.value(t);
    yv[u(i)] = y.value(t);
    xd[u(i)] = x.derivative(t);
    yd[u(i)] = y.derivative(t);
    for (int mu = 0; mu < dim_; ++mu) {
      gx[u(i)] += xv[u(i)][u(mu)] * g_[u(i * dim_ + mu)];
      gy[u(i)] += yv[u(i)][u(mu)] * g_[u(i * dim_ + mu)];
    }
  }
  // int int_{t >= s} G_X(t) G_Y(s) + int int_{t < s} G_Y(s) G_X(t)
  const std::vector<Matrix> cy = grid_.cumulative(gy, zero_matrix(r));
  Matrix cy_end = zero_matrix(r);
  for (int i = 0; i < n; ++i) cy_end += grid_.weight(i) * gy[u(i)];
  Matrix vol = zero_matrix(r);
  Matrix local = zero_matrix(r);
  for (int i = 0; i < n; ++i) {
    const double w = grid_.weight(i);
    vol += w * (gx[u(i)] * cy[u(i)] + (cy_end - cy[u(i)]) * gx[u(i)]);
    for (int mu = 0; mu < dim_; ++mu) {
      for (int nu = 0; nu < dim_; ++nu) {
        const double cl = xv[u(i)][u(mu)] * yv[u(i)][u(nu)];
        if (cl != 0.0) local += (w * cl) * levy(i, mu, nu);
        if (mu == nu) continue;
        const double cs =
            0.5 * (xd[u(i)][u(mu)] * yv[u(i)][u(nu)] + yd[u(i)][u(mu)] * xv[u(i)][u(nu)]);
        if (cs != 0.0) local += (w * cs) * singular(i, mu, nu);
      }
    }
  }
  return total_ * vol + local;
}

double KernelTriple::levy_asymmetry() const {
  double r = 0.0;
  for (int i = 0; i < grid_.size(); ++i) {
    for (int mu = 0; mu < dim_; ++mu) {
      for (int nu = mu + 1; nu < dim_; ++nu) {
        r = std::max(r, max_abs(levy(i, mu, nu) - levy(i, nu, mu)));
      }
    }
  }
  return r;
}

double KernelTriple::singular_symmetry() const {
  double r = 0.0;
  for (int i = 0; i < grid_.size(); ++i) {
    for (int mu = 0; mu < dim_; ++mu) {
      for (int nu = 0; nu < dim_; ++nu) {
        r = std::max(r, max_abs(singular(i, mu, nu) + singular(i, nu, mu)));
      }
    }
  }
  return r;
}

double KernelTriple::volterra_norm(int stride) const {
  if (stride < 1) throw DomainError("volterra_norm: stride must be >= 1");
  double r = 0.0;
  const int n = grid_.size();
  for (int i = 0; i < n; i += stride) {
    for (int j = 0; j < n; j += stride) {
      for (int mu = 0; mu < dim_; ++mu) {
        for (int nu = 0; nu < dim_; ++nu) r = std::max(r, max_abs(volterra(i, j, mu, nu)));
      }
    }
  }
  return r;
}

double KernelTriple::levy_norm() const {
  double r = 0.0;
  for (const auto& k : levy_) r = std::max(r, max_abs(k));
  return r;
}

double KernelTriple::singular_norm() const {
  double r = 0.0;
  for (const auto& k : singular_) r = std::max(r, max_abs(k));
  return r;
}

KernelTriple second_kernels(const TransportCache& cache) {
  const GaugeField& a = cache.field();
  const int d = a.dim();
  const int n = cache.size();
  const int pairs = CurvatureValue::num_pairs(d);
  std::vector<FiberMap> g;
  std::vector<FiberMap> levy(u(n * d * d));
  std::vector<FiberMap> singular;
  g.reserve(u(n * d));
  singular.reserve(u(n * pairs));
  std::array<CurvatureValue, kMaxDim> cov;
  for (int i = 0; i < n; ++i) {
    const Point& x = cache.position(i);
    const Vector& v = cache.velocity(i);
    const CurvatureValue f = a.curvature(x);
    for (int l = 0; l < d; ++l) cov[u(l)] = a.cov_deriv_curvature(x, l);
    for (int mu = 0; mu < d; ++mu) {
      Matrix m = zero_matrix(a.rank());
      for (int l = 0; l < d; ++l) {
        if (l != mu) m += v[u(l)] * f(mu, l).matrix();
      }
      g.push_back(cache.pullback(i, m));
    }
    // c[mu][nu] = nabla_mu F_{nu l} gamma'^l
    std::array<std::array<Matrix, kMaxDim>, kMaxDim> c;
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        Matrix m = zero_matrix(a.rank());
        for (int l = 0; l < d; ++l) {
          if (l != nu) m += v[u(l)] * cov[u(mu)](nu, l).matrix();
        }
        c[u(mu)][u(nu)] = std::move(m);
      }
    }
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu; nu < d; ++nu) {
        const Matrix k = cache.sandwich(i, -0.5 * (c[u(mu)][u(nu)] + c[u(nu)][u(mu)]));
        levy[u((i * d + mu) * d + nu)] = k;
        levy[u((i * d + nu) * d + mu)] = k;
      }
    }
    for (int p = 0; p < pairs; ++p) singular.push_back(cache.sandwich(i, f.pair(p).matrix()));
  }
  return {d, cache.grid(), cache.total(), std::move(g), std::move(levy), std::move(singular)};
}

KernelTriple second_kernels(const GaugeField& field, const Curve& curve,
                            TransportOptions options) {
  return second_kernels(TransportCache(field, curve, options));
}

FiberMap levy_divergence(const KernelTriple& kernels) {
  const QuadratureGrid& g = kernels.grid();
  Matrix acc = zero_matrix(kernels.rank());
  for (int i = 0; i < g.size(); ++i) {
    for (int mu = 0; mu < kernels.dim(); ++mu) acc += g.weight(i) * kernels.levy(i, mu, mu);
  }
  return acc;
}

FiberMap levy_laplacian_closed_form(const TransportCache& cache) {
  const GaugeField& a = cache.field();
  Matrix acc = zero_matrix(a.rank());
  for (int i = 0; i < cache.size(); ++i) {
    const LieTuple div = a.cov_div_curvature(cache.position(i));
    const Vector& v = cache.velocity(i);
    Matrix m = zero_matrix(a.rank());
    for (int nu = 0; nu < a.dim(); ++nu) m += v[u(nu)] * div[u(nu)].matrix();
    acc += cache.grid().weight(i) * cache.sandwich(i, m);
  }
  return -acc;
}

FiberMap levy_laplacian_transport(const TransportCache& cache) {
  FiberMap closed = levy_laplacian_closed_form(cache);
  const FiberMap kernel = levy_divergence(second_kernels(cache));
  const double diff = max_abs(closed - kernel);
  if (diff > 1e-8 * std::max(1.0, max_abs(closed))) {
    throw NumericalAbort("levy_laplacian_transport: kernel route differs from closed form by " +
                         std::to_string(diff));
  }
  return closed;
}

FiberMap levy_laplacian_transport(const GaugeField& field, const Curve& curve,
                                  TransportOptions options) {
  return levy_laplacian_transport(TransportCache(field, curve, options));
}

std::vector<FiberMap> cesaro_levy_sweep(const GaugeField& field, const Curve& curve,
                                        const std::vector<int>& ns, CesaroOptions options) {
  if (ns.empty()) return {};
  if (!std::is_sorted(ns.begin(), ns.end())) throw DomainError("cesaro: ns must be ascending");
  const std::function<FiberMap(const Curve&)> value = [&](const Curve& c) {
    return FiberMap(transport(field, c, options.step).matrix());
  };
  const auto terms = cesaro_terms(value, curve, ns.back(), options.eps);
  return running_means(terms, ns);
}

FiberMap cesaro_levy_estimate(const GaugeField& field, const Curve& curve, int n,
                              CesaroOptions options) {
  return cesaro_levy_sweep(field, curve, {n}, options).front();
}

double cesaro_functional_estimate(const ScalarField& f, const Curve& curve, int n, double eps) {
  const std::function<double(const Curve&)> value = [&](const Curve& c) {
    return functional_value(f, c);
  };
  const auto terms = cesaro_terms(value, curve, n, eps);
  return running_means(terms, {n}).front();
}

}  // namespace levyflow
