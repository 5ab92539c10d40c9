#include "lattice_ops.hpp"

#include <cmath>
#include <numbers>

namespace levyflow::detail {

namespace {

// Strides for row-major site order (axis 0 slowest).
std::array<int, kMaxDim> strides(int dim, int m) {
  std::array<int, kMaxDim> s{};
  int stride = 1;
  for (int a = dim - 1; a >= 0; --a) {
    s[static_cast<std::size_t>(a)] = stride;
    stride *= m;
  }
  return s;
}

int wrap_index(int i, int m) {
  i %= m;
  return i < 0 ? i + m : i;
}

// Neighbour tables: nb[a][k][site] is the site shifted by (k - 2) along a,
// k = 0..4 (offsets -2..2).
using Neighbours = std::vector<std::array<std::array<int, 5>, kMaxDim>>;

Neighbours neighbours(const LatticeField& field) {
  const int d = field.torus().dim();
  const int m = field.resolution();
  const auto st = strides(d, m);
  Neighbours nb(static_cast<std::size_t>(field.num_sites()));
  for (int site = 0; site < field.num_sites(); ++site) {
    const auto c = field.site_coords(site);
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      for (int k = 0; k < 5; ++k) {
        const int shifted = wrap_index(c[ua] + k - 2, m);
        nb[static_cast<std::size_t>(site)][ua][static_cast<std::size_t>(k)] =
            site + (shifted - c[ua]) * st[ua];
      }
    }
  }
  return nb;
}

// 4th-order central difference  (8 (g+1 - g-1) - (g+2 - g-2)) / (12 a)
template <typename Get>
Matrix central_difference(const std::array<int, 5>& nb, double inv12a, Get&& get) {
  return inv12a * (8.0 * (get(nb[3]) - get(nb[1])) - (get(nb[4]) - get(nb[0])));
}

// First row of the inverse of the periodic circulant (1/6, 4/6, 1/6).
std::vector<double> prefilter_row(int m) {
  std::vector<double> g(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * k / m;
      const double lambda = (4.0 + 2.0 * std::cos(th)) / 6.0;
      acc += std::cos(th * j) / lambda;
    }
    g[static_cast<std::size_t>(j)] = acc / m;
  }
  return g;
}

}  // namespace

LatticeDerivatives lattice_derivatives(const LatticeField& field, bool with_covariant) {
  const int d = field.torus().dim();
  const int n_sites = field.num_sites();
  const int pairs = CurvatureValue::num_pairs(d);
  const double inv12a = 1.0 / (12.0 * field.spacing());
  const Neighbours nb = neighbours(field);

  LatticeDerivatives out;
  out.dim = d;
  out.pairs = pairs;
  out.da.resize(static_cast<std::size_t>(n_sites * d * d));
  out.f.resize(static_cast<std::size_t>(n_sites * pairs));

  for (int site = 0; site < n_sites; ++site) {
    const auto& nbs = nb[static_cast<std::size_t>(site)];
    for (int l = 0; l < d; ++l) {
      for (int mu = 0; mu < d; ++mu) {
        out.da[static_cast<std::size_t>((site * d + l) * d + mu)] = central_difference(
            nbs[static_cast<std::size_t>(l)], inv12a,
            [&](int s) -> const Matrix& { return field.at(s, mu).matrix(); });
      }
    }
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu + 1; nu < d; ++nu) {
        const Matrix& am = field.at(site, mu).matrix();
        const Matrix& an = field.at(site, nu).matrix();
        out.f[static_cast<std::size_t>(site * pairs + CurvatureValue::pair_index(mu, nu, d))] =
            out.da[static_cast<std::size_t>((site * d + mu) * d + nu)] -
            out.da[static_cast<std::size_t>((site * d + nu) * d + mu)] + am * an - an * am;
      }
    }
  }
  if (!with_covariant) return out;

  out.cov_f.resize(static_cast<std::size_t>(n_sites * d * pairs));
  out.div.resize(static_cast<std::size_t>(n_sites * d));
  for (int site = 0; site < n_sites; ++site) {
    const auto& nbs = nb[static_cast<std::size_t>(site)];
    for (int l = 0; l < d; ++l) {
      const Matrix& al = field.at(site, l).matrix();
      for (int p = 0; p < pairs; ++p) {
        const Matrix& fp = out.f[static_cast<std::size_t>(site * pairs + p)];
        Matrix g = central_difference(nbs[static_cast<std::size_t>(l)], inv12a,
                                      [&](int s) -> const Matrix& {
                                        return out.f[static_cast<std::size_t>(s * pairs + p)];
                                      });
        g += al * fp - fp * al;
        out.cov_f[static_cast<std::size_t>((site * d + l) * pairs + p)] = std::move(g);
      }
    }
    for (int nu = 0; nu < d; ++nu) {
      Matrix acc = zero_matrix(field.rank());
      for (int mu = 0; mu < d; ++mu) {
        if (mu == nu) continue;
        const int p = CurvatureValue::pair_index(std::min(mu, nu), std::max(mu, nu), d);
        const Matrix& c = out.cov_f[static_cast<std::size_t>((site * d + mu) * pairs + p)];
        if (mu < nu) {
          acc += c;
        } else {
          acc -= c;
        }
      }
      out.div[static_cast<std::size_t>(site * d + nu)] = std::move(acc);
    }
  }
  return out;
}

PeriodicSpline::PeriodicSpline(const Torus& torus, int resolution, int components,
                               const std::vector<Matrix>& site_values)
    : torus_(torus), m_(resolution), components_(components), rank_(0), coeffs_(site_values) {
  const int d = torus.dim();
  if (!coeffs_.empty()) rank_ = static_cast<int>(coeffs_.front().rows());
  const auto st = strides(d, m_);
  int n_sites = 1;
  for (int a = 0; a < d; ++a) n_sites *= m_;

  const std::vector<double> g = prefilter_row(m_);
  // Exact circulant inverse for small grids; the inverse decays like
  // (2 - sqrt 3)^|j|, so 30 taps each side are exact in double precision.
  const int half = m_ <= 61 ? -1 : 30;

  std::vector<Matrix> line(static_cast<std::size_t>(m_));
  for (int a = 0; a < d; ++a) {
    const int stride_a = st[static_cast<std::size_t>(a)];
    for (int base = 0; base < n_sites; ++base) {
      // Visit each line once, from its first point.
      if ((base / stride_a) % m_ != 0) continue;
      for (int c = 0; c < components_; ++c) {
        for (int i = 0; i < m_; ++i) {
          line[static_cast<std::size_t>(i)] =
              coeffs_[static_cast<std::size_t>((base + i * stride_a) * components_ + c)];
        }
        for (int i = 0; i < m_; ++i) {
          Matrix acc = zero_matrix(rank_);
          if (half < 0) {
            for (int j = 0; j < m_; ++j) {
              acc += g[static_cast<std::size_t>(wrap_index(i - j, m_))] *
                     line[static_cast<std::size_t>(j)];
            }
          } else {
            for (int o = -half; o <= half; ++o) {
              acc += g[static_cast<std::size_t>(wrap_index(o, m_))] *
                     line[static_cast<std::size_t>(wrap_index(i - o, m_))];
            }
          }
          coeffs_[static_cast<std::size_t>((base + i * stride_a) * components_ + c)] =
              std::move(acc);
        }
      }
    }
  }
}

PeriodicSpline::Stencil PeriodicSpline::stencil(const Point& x) const {
  Stencil s;
  const int d = torus_.dim();
  const auto st = strides(d, m_);
  const Point y = torus_.wrap(x);
  const double inv_a = m_ / torus_.length();
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double u = y[ua] * inv_a;
    int i0 = static_cast<int>(std::floor(u));
    double f = u - i0;
    if (i0 >= m_) {
      i0 = m_ - 1;
      f = 1.0;
    }
    const double g = 1.0 - f;
    s.w[ua] = {g * g * g / 6.0, 2.0 / 3.0 - f * f + 0.5 * f * f * f,
               2.0 / 3.0 - g * g + 0.5 * g * g * g, f * f * f / 6.0};
    for (int k = 0; k < 4; ++k) {
      s.idx[ua][static_cast<std::size_t>(k)] = wrap_index(i0 - 1 + k, m_) * st[ua];
    }
  }
  return s;
}

void PeriodicSpline::eval(const Point& x, Matrix* out) const {
  const Stencil s = stencil(x);
  for (int c = 0; c < components_; ++c) out[c] = zero_matrix(rank_);
  const int d = torus_.dim();
  const int kz = d == 3 ? 4 : 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < kz; ++k) {
        double w = s.w[0][static_cast<std::size_t>(i)] * s.w[1][static_cast<std::size_t>(j)];
        int site = s.idx[0][static_cast<std::size_t>(i)] + s.idx[1][static_cast<std::size_t>(j)];
        if (d == 3) {
          w *= s.w[2][static_cast<std::size_t>(k)];
          site += s.idx[2][static_cast<std::size_t>(k)];
        }
        const Matrix* base = &coeffs_[static_cast<std::size_t>(site * components_)];
        for (int c = 0; c < components_; ++c) out[c] += w * base[c];
      }
    }
  }
}

Matrix PeriodicSpline::eval_contracted(const Point& x, const double* weights) const {
  const Stencil s = stencil(x);
  Matrix acc = zero_matrix(rank_);
  const int d = torus_.dim();
  const int kz = d == 3 ? 4 : 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < kz; ++k) {
        double w = s.w[0][static_cast<std::size_t>(i)] * s.w[1][static_cast<std::size_t>(j)];
        int site = s.idx[0][static_cast<std::size_t>(i)] + s.idx[1][static_cast<std::size_t>(j)];
        if (d == 3) {
          w *= s.w[2][static_cast<std::size_t>(k)];
          site += s.idx[2][static_cast<std::size_t>(k)];
        }
        const Matrix* base = &coeffs_[static_cast<std::size_t>(site * components_)];
        for (int c = 0; c < components_; ++c) {
          if (weights[c] != 0.0) acc += (w * weights[c]) * base[c];
        }
      }
    }
  }
  return acc;
}

}  // namespace levyflow::detail
