#include "levyflow/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

struct Reference {
  std::array<double, kGaussOrder> x{};
  std::array<double, kGaussOrder> w{};
  std::array<std::array<double, kGaussOrder>, kGaussOrder> s{};
  // c[k][j]: monomial coefficient k of the Lagrange basis polynomial l_j.
  std::array<std::array<double, kGaussOrder>, kGaussOrder> c{};
};

Reference build_reference() {
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  Reference r;
  const auto& ab = Rule::abscissa();
  const auto& wt = Rule::weights();
  constexpr int half = kGaussOrder / 2;
  for (int i = 0; i < half; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    r.x[static_cast<std::size_t>(half - 1 - i)] = -ab[ui];
    r.w[static_cast<std::size_t>(half - 1 - i)] = wt[ui];
    r.x[static_cast<std::size_t>(half + i)] = ab[ui];
    r.w[static_cast<std::size_t>(half + i)] = wt[ui];
  }

  // Lagrange basis in monomial form: column j of V^-1 holds the coefficients
  // of l_j.
  Eigen::Matrix<double, kGaussOrder, kGaussOrder> v;
  for (int i = 0; i < kGaussOrder; ++i) {
    for (int k = 0; k < kGaussOrder; ++k) v(i, k) = std::pow(r.x[static_cast<std::size_t>(i)], k);
  }
  const Eigen::Matrix<double, kGaussOrder, kGaussOrder> coeffs = v.inverse();
  for (int k = 0; k < kGaussOrder; ++k) {
    for (int j = 0; j < kGaussOrder; ++j) {
      r.c[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = coeffs(k, j);
    }
  }
  for (int i = 0; i < kGaussOrder; ++i) {
    const double xi = r.x[static_cast<std::size_t>(i)];
    for (int j = 0; j < kGaussOrder; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kGaussOrder; ++k) {
        acc += coeffs(k, j) * (std::pow(xi, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      }
      r.s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
    }
  }
  return r;
}

const Reference& reference() {
  static const Reference r = build_reference();
  return r;
}

}  // namespace

const std::array<double, kGaussOrder>& gauss_nodes() { return reference().x; }
const std::array<double, kGaussOrder>& gauss_weights() { return reference().w; }
const std::array<std::array<double, kGaussOrder>, kGaussOrder>& gauss_cumulative_matrix() {
  return reference().s;
}

std::array<double, kGaussOrder> gauss_partial_weights(double xi) {
  const auto& c = reference().c;
  std::array<double, kGaussOrder> out{};
  for (int j = 0; j < kGaussOrder; ++j) {
    double acc = 0.0;
    for (int k = 0; k < kGaussOrder; ++k) {
      acc += c[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
             (std::pow(xi, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

QuadratureGrid QuadratureGrid::composite(int panels, std::span<const double> breaks, double a,
                                         double b) {
  if (panels < 1) throw DomainError("QuadratureGrid: need at least one panel");
  if (!(b > a)) throw DomainError("QuadratureGrid: empty interval");
  std::vector<double> cuts{a};
  std::vector<double> sorted(breaks.begin(), breaks.end());
  std::sort(sorted.begin(), sorted.end());
  const double min_gap = 1e-12 * (b - a);
  for (const double t : sorted) {
    if (t > a + min_gap && t < b - min_gap && t - cuts.back() > min_gap) cuts.push_back(t);
  }
  cuts.push_back(b);

  QuadratureGrid g;
  g.a_ = a;
  g.b_ = b;
  const auto& x = gauss_nodes();
  const auto& w = gauss_weights();
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c];
    const double hi = cuts[c + 1];
    const int n = std::max(1, static_cast<int>(std::lround(panels * (hi - lo) / (b - a))));
    const double width = (hi - lo) / n;
    for (int p = 0; p < n; ++p) {
      const double plo = lo + p * width;
      const double phi = p + 1 == n ? hi : plo + width;
      const double mid = 0.5 * (plo + phi);
      const double half = 0.5 * (phi - plo);
      g.panel_lo_.push_back(plo);
      g.panel_hi_.push_back(phi);
      for (int i = 0; i < kGaussOrder; ++i) {
        g.nodes_.push_back(mid + half * x[static_cast<std::size_t>(i)]);
        g.weights_.push_back(half * w[static_cast<std::size_t>(i)]);
      }
    }
  }
  return g;
}

double QuadratureGrid::cumulative_weight(int i, int j) const {
  const int p = panel_of(i);
  if (panel_of(j) != p) return 0.0;
  const double half = 0.5 * (panel_upper(p) - panel_lower(p));
  return half * gauss_cumulative_matrix()[static_cast<std::size_t>(i % kGaussOrder)]
                                         [static_cast<std::size_t>(j % kGaussOrder)];
}

}  // namespace levyflow
