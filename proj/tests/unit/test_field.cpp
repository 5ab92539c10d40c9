#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/field.hpp"

using namespace levyflow;
using testutil::diff;

namespace {

constexpr double kPi = std::numbers::pi;

// A_0 = c T cos(kappa y), T = i sigma_3, on the torus of side L.
AnalyticField single_mode(double length, double c) {
  return AnalyticField(Torus(2, length), 2, {{{0, 1, 0}, 0, Phase::Cos, su2(0, 0, c)}});
}

// (A, curvature) derived from eval alone: central differences plus commutator.
Matrix fd_curvature(const GaugeField& a, const Point& x, int mu, int nu) {
  const double h = 1e-5;
  auto shifted = [&](int axis, double d) {
    Point y = x;
    y[axis] += d;
    return a.eval(y);
  };
  const Matrix dmu_anu = (shifted(mu, h)[nu].matrix() - shifted(mu, -h)[nu].matrix()) / (2 * h);
  const Matrix dnu_amu = (shifted(nu, h)[mu].matrix() - shifted(nu, -h)[mu].matrix()) / (2 * h);
  const auto v = a.eval(x);
  return dmu_anu - dnu_amu + commutator(v[mu], v[nu]).matrix();
}

}  // namespace

TEST_CASE("torus") {
  const Torus t(3, 2.0);
  const Point w = t.wrap({-0.5, 2.5, 4.0});
  CHECK(w[0] == doctest::Approx(1.5));
  CHECK(w[1] == doctest::Approx(0.5));
  CHECK(w[2] == doctest::Approx(0.0));
  CHECK(t.volume() == doctest::Approx(8.0));
  CHECK(t.wavenumber({1, 1, 0}) == doctest::Approx(std::sqrt(2.0) * kPi));
  CHECK_THROWS_AS(Torus(4, 1.0), DomainError);
}

TEST_CASE("curvature value storage is antisymmetric") {
  CurvatureValue f(3, 2);
  f.set(0, 2, su2(1, 0, 0));
  CHECK(diff(f(2, 0).matrix(), su2(-1, 0, 0).matrix()) == 0.0);
  CHECK(diff(f(1, 1).matrix(), zero_matrix(2)) == 0.0);
  CHECK(CurvatureValue::num_pairs(3) == 3);
}

TEST_CASE("single-mode field against closed forms") {
  const double length = 2.0, c = 0.7, kappa = 2 * kPi / length;
  const GaugeField a = single_mode(length, c);
  const Point x{0.3, 0.45, 0};
  const double y = x[1];
  CHECK(diff(a.eval(x)[0].matrix(), su2(0, 0, c * std::cos(kappa * y)).matrix()) < 1e-15);
  CHECK(diff(a.curvature(x)(0, 1).matrix(),
             su2(0, 0, c * kappa * std::sin(kappa * y)).matrix()) < 1e-14);
  const auto div = a.cov_div_curvature(x);
  CHECK(diff(div[0].matrix(), -kappa * kappa * a.eval(x)[0].matrix()) < 1e-13);
  CHECK(diff(div[1].matrix(), zero_matrix(2)) < 1e-14);
  CHECK(ym_action(a) == doctest::Approx(4 * kPi * kPi * c * c).epsilon(1e-12));
  CHECK(diff(a.contract(x, {2.0, 5.0, 0}), 2.0 * a.eval(x)[0].matrix()) < 1e-15);
}

TEST_CASE("random analytic field: curvature and covariant derivatives") {
  const Torus torus(3, 2 * kPi);
  const GaugeField a = random_su2_field(torus, 5, 0.4, 2, 17);
  CHECK(a.analytic().modes().size() == 5);
  CHECK(a.analytic().max_wavenumber() <= 2);
  for (const auto& m : a.analytic().modes()) {
    CHECK(std::sqrt(0.5 * fiber_metric(m.coeff.matrix(), m.coeff.matrix())) <= 0.4 + 1e-15);
  }
  const Point x{0.4, 1.9, 5.1};
  for (int mu = 0; mu < 3; ++mu) {
    for (int nu = 0; nu < 3; ++nu) {
      CHECK(diff(a.curvature(x)(mu, nu).matrix(), fd_curvature(a, x, mu, nu)) < 1e-8);
    }
  }
  // nabla_l F = d_l F + [A_l, F], by differences of curvature()
  const double h = 1e-5;
  for (int l = 0; l < 3; ++l) {
    Point p = x, m = x;
    p[l] += h;
    m[l] -= h;
    const auto cov = a.cov_deriv_curvature(x, l);
    for (int mu = 0; mu < 3; ++mu) {
      for (int nu = mu + 1; nu < 3; ++nu) {
        const Matrix expect =
            (a.curvature(p)(mu, nu).matrix() - a.curvature(m)(mu, nu).matrix()) / (2 * h) +
            commutator(a.eval(x)[l], a.curvature(x)(mu, nu)).matrix();
        CHECK(diff(cov(mu, nu).matrix(), expect) < 1e-8);
      }
    }
  }
  CHECK(bianchi_residual(a, x) < 1e-13);
  // partial_deriv by differences of eval
  const auto d1 = a.partial_deriv(x, 1);
  Point p = x, m = x;
  p[1] += h;
  m[1] -= h;
  CHECK(diff(d1[2].matrix(), (a.eval(p)[2].matrix() - a.eval(m)[2].matrix()) / (2 * h)) < 1e-9);
}

TEST_CASE("lattice field sampling, layout and stencils") {
  const Torus torus(2, 2 * kPi);
  const GaugeField a = random_su2_field(torus, 4, 0.3, 2, 5);
  const LatticeField lat = sample_lattice(a, 48);
  CHECK(lat.num_sites() == 48 * 48);
  CHECK(lat.values().size() == static_cast<std::size_t>(48 * 48 * 2));
  const int site = lat.site_index({3, 7, 0});
  CHECK(site == 3 * 48 + 7);
  CHECK(lat.site_coords(site)[1] == 7);
  CHECK(lat.site_index({51, -41, 0}) == site);
  const Point pos = lat.site_position(site);
  CHECK(pos[0] == doctest::Approx(3 * lat.spacing()));
  CHECK(diff(lat.at(site, 1).matrix(), a.eval(pos)[1].matrix()) < 1e-15);

  const GaugeField g(lat);
  CHECK(g.is_lattice());
  CHECK_THROWS_AS(g.analytic(), DomainError);
  // at sites: 4th-order differences; off-grid: spline interpolation
  CHECK(diff(g.curvature(pos)(0, 1).matrix(), a.curvature(pos)(0, 1).matrix()) < 1e-4);
  const Point off{1.234, 4.321, 0};
  CHECK(diff(g.eval(off)[0].matrix(), a.eval(off)[0].matrix()) < 1e-4);
  CHECK(ym_action(g) == doctest::Approx(ym_action(a)).epsilon(1e-3));
}

TEST_CASE("lattice stencil errors shrink at fourth order") {
  const Torus torus(2, 2 * kPi);
  const GaugeField a = random_su2_field(torus, 3, 0.3, 1, 8);
  double err[2];
  int idx = 0;
  for (int m : {16, 32}) {
    const GaugeField g(sample_lattice(a, m));
    double e = 0.0;
    for (int site = 0; site < m * m; site += 7) {
      const Point p = g.lattice().site_position(site);
      e = std::max(e, diff(g.cov_div_curvature(p)[0].matrix(), a.cov_div_curvature(p)[0].matrix()));
    }
    err[idx++] = e;
  }
  CHECK(err[0] / err[1] > 12.0);
}

TEST_CASE("gauge transformations act covariantly") {
  const Torus torus(2, 2 * kPi);
  const GaugeField a = random_su2_field(torus, 3, 0.3, 1, 21);
  const GaugeFunction psi = phase_gauge(torus, su2(0.3, 0.0, 0.4), {{{1, 0, 0}, 0.8, 0.2}});
  const GaugeField b = gauge_transform(a, psi, 64);
  const LatticeField& lat = b.lattice();
  const int site = lat.site_index({10, 20, 0});
  const Point x = lat.site_position(site);
  const Matrix p = psi.value(x);
  CHECK(unitarity_residual(p) < 1e-14);
  const Matrix expect = p.adjoint() * a.curvature(x)(0, 1).matrix() * p;
  CHECK(diff(b.curvature(x)(0, 1).matrix(), expect) < 1e-4);
  CHECK(ym_action(b) == doctest::Approx(ym_action(a)).epsilon(1e-4));
  // exact derivative against differences
  const double h = 1e-6;
  Point xp = x, xm = x;
  xp[0] += h;
  xm[0] -= h;
  CHECK(diff(psi.derivative(x, 0), (psi.value(xp) - psi.value(xm)) / (2 * h)) < 1e-8);
}

TEST_CASE("scalar fields") {
  const Torus torus(2, 2.0);
  const double kappa = kPi;
  const ScalarField f(torus, {{{1, 2, 0}, Phase::Sin, 0.5}, {{0, 1, 0}, Phase::Cos, -1.0}});
  const Point x{0.3, 0.8, 0};
  const double v = 0.5 * std::sin(kappa * (x[0] + 2 * x[1])) - std::cos(kappa * x[1]);
  CHECK(f.value(x) == doctest::Approx(v));
  const double lap = -5 * kappa * kappa * 0.5 * std::sin(kappa * (x[0] + 2 * x[1])) +
                     kappa * kappa * std::cos(kappa * x[1]);
  CHECK(f.laplacian(x) == doctest::Approx(lap));
  CHECK(f.gradient(x)[1] ==
        doctest::Approx(kappa * std::cos(kappa * (x[0] + 2 * x[1])) + kappa * std::sin(kappa * x[1])));
  const double s = 0.01;
  const double evolved = 0.5 * std::exp(-5 * kappa * kappa * s) * std::sin(kappa * (x[0] + 2 * x[1])) -
                         std::exp(-kappa * kappa * s) * std::cos(kappa * x[1]);
  CHECK(f.heat_evolved(s).value(x) == doctest::Approx(evolved));
  const ScalarField r = random_scalar_field(torus, 4, 1.0, 2, 3);
  CHECK(r.modes().size() == 4);
}
