#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/levy.hpp"

using namespace levyflow;
using testutil::diff;
using testutil::taylor_exp;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLength = 2.0;
constexpr double kKappa = 2 * kPi / kLength;

AnalyticField abelian_mode(double c) {
  return AnalyticField(Torus(2, kLength), 2, {{{0, 1, 0}, 0, Phase::Cos, su2(0, 0, c)}});
}

double line_phase(double y0, double vx, double vy) {
  return vx * (std::sin(kKappa * (y0 + vy)) - std::sin(kKappa * y0)) / (kKappa * vy);
}

}  // namespace

TEST_CASE("Levy Laplacian of an abelian transport") {
  // nabla^mu F_{mu 0} = -kappa^2 A_0, so Delta_L U = kappa^2 U int A.gamma'
  const double c = 0.5;
  const GaugeField a = abelian_mode(c);
  const double y0 = 0.2, vx = 1.3, vy = 0.6;
  const Curve line = straight_line(2, {0.4, y0, 0}, {0.4 + vx, y0 + vy, 0});
  const Matrix phase = c * line_phase(y0, vx, vy) * su2(0, 0, 1).matrix();
  const Matrix expect = kKappa * kKappa * taylor_exp(-phase) * phase;
  const TransportCache cache(a, line);
  CHECK(diff(levy_laplacian_closed_form(cache), expect) < 1e-12);
  CHECK(diff(levy_laplacian_transport(cache), expect) < 1e-12);
  CHECK(diff(levy_divergence(second_kernels(cache)), expect) < 1e-10);
}

TEST_CASE("gradient of transport reproduces the first derivative") {
  const Torus torus(2, 2 * kPi);
  const GaugeField field = random_su2_field(torus, 4, 0.3, 2, 2);
  const Curve g = fourier_curve(torus, 3, 0.2, 4);
  const TransportCache cache(field, g);
  const GradientField grad = h0_gradient_transport(cache);
  CHECK(grad.dim() == 2);
  const CurveField x = random_curve_field(2, 3, 0.5, true, 8);
  const FiberMap dxu = transport_derivative(cache, x);
  CHECK(diff(grad.apply(x), dxu) < 1e-12);
  const Matrix phi = su2(0.3, -0.2, 0.9).matrix();
  CHECK(grad.pair(x, phi) == doctest::Approx(fiber_metric(dxu, phi)).epsilon(1e-12));
}

TEST_CASE("kernel symmetries and the bilinear form") {
  const Torus torus(2, 2 * kPi);
  const GaugeField field = random_su2_field(torus, 4, 0.3, 2, 6);
  const Curve g = fourier_curve(torus, 3, 0.2, 1);
  const TransportCache cache(field, g);
  const KernelTriple k = second_kernels(cache);
  CHECK(k.levy_asymmetry() < 1e-12);
  CHECK(k.singular_symmetry() < 1e-12);
  CHECK(k.levy_norm() > 0.0);
  CHECK(k.volterra_norm() > 0.0);
  const int i = 40, j = 17;
  // K^V(t_i, t_j) = U_{1,t} M_m(t) U_{t,s} M_n(s) U_{s,0} for t >= s
  auto m_of = [&](int node, int mu) {
    const CurvatureValue f = field.curvature(cache.position(node));
    Matrix out = zero_matrix(2);
    for (int l = 0; l < 2; ++l) out += f(mu, l).matrix() * cache.velocity(node)[l];
    return out;
  };
  const Matrix u_ts = cache.forward(i) * cache.forward(j).adjoint();
  const Matrix kv = cache.backward(i) * m_of(i, 0) * u_ts * m_of(j, 1) * cache.forward(j);
  CHECK(diff(k.volterra(i, j, 0, 1), kv) < 1e-12);
  // the form is symmetric in (X, Y)
  const CurveField x = random_curve_field(2, 3, 0.5, true, 1);
  const CurveField y = random_curve_field(2, 3, 0.5, true, 2);
  CHECK(diff(k.bilinear(x, y), k.bilinear(y, x)) < 1e-10);
  const KernelTriple z = KernelTriple::zero(2, 2, cache.grid());
  CHECK(max_abs(z.bilinear(x, y)) == 0.0);
}

TEST_CASE("running means") {
  const std::vector<double> terms{1, 2, 3, 4};
  const auto m = running_means(terms, {1, 2, 4});
  REQUIRE(m.size() == 3);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 1.5);
  CHECK(m[2] == 2.5);
  CHECK_THROWS_AS(running_means(terms, {5}), DomainError);
}

TEST_CASE("Cesaro terms of a quadratic functional are exact") {
  // Q(gamma) = int |gamma|^2 dt has D^2 Q(e_k e_mu, e_k e_mu) = 2 for every k, mu
  const Curve g = straight_line(2, {0.1, 0.2, 0}, {0.7, -0.3, 0});
  const std::function<double(const Curve&)> q = [](const Curve& c) {
    const auto grid = c.grid(64);
    double s = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      const Point p = c.position(grid.node(i));
      s += grid.weight(i) * (p[0] * p[0] + p[1] * p[1]);
    }
    return s;
  };
  const auto terms = cesaro_terms(q, g, 5, 1e-3);
  for (double t : terms) CHECK(t == doctest::Approx(4.0).epsilon(1e-8));
  CHECK_THROWS_AS(cesaro_terms(q, g, 0, 1e-3), DomainError);
}

TEST_CASE("scalar functional and its Levy Laplacian") {
  const Torus torus(2, kLength);
  const ScalarField f(torus, {{{0, 1, 0}, Phase::Cos, 1.5}});
  // along a horizontal line f is constant
  const Curve h = straight_line(2, {0.0, 0.25, 0}, {1.0, 0.25, 0});
  CHECK(functional_value(f, h) == doctest::Approx(1.5 * std::cos(kKappa * 0.25)));
  CHECK(levy_laplacian_functional(f, h) ==
        doctest::Approx(-kKappa * kKappa * 1.5 * std::cos(kKappa * 0.25)));
  const Curve g = fourier_curve(torus, 2, 0.2, 3);
  const GradientField grad = h0_gradient_functional(f, g);
  const CurveField x = constant_field(2, {0.0, 1.0, 0.0});
  const double eps = 1e-5;
  const double fd =
      (functional_value(f, perturb(g, x, eps)) - functional_value(f, perturb(g, x, -eps))) / (2 * eps);
  CHECK(grad.apply(x)(0, 0).real() == doctest::Approx(fd).epsilon(1e-8));
  // Cesaro means approach the Laplacian
  const double exact = levy_laplacian_functional(f, g);
  const double e8 = std::abs(cesaro_functional_estimate(f, g, 8) - exact);
  const double e32 = std::abs(cesaro_functional_estimate(f, g, 32) - exact);
  CHECK(e32 < e8);
}

TEST_CASE("Cesaro sweep agrees with single estimates") {
  const Torus torus(2, 2 * kPi);
  const GaugeField field = random_su2_field(torus, 2, 0.3, 1, 4);
  const Curve g = fourier_curve(torus, 2, 0.2, 5);
  CesaroOptions opts;
  opts.step = 1.0 / 512;
  const auto sweep = cesaro_levy_sweep(field, g, {1, 3}, opts);
  REQUIRE(sweep.size() == 2);
  CHECK(diff(sweep[1], cesaro_levy_estimate(field, g, 3, opts)) < 1e-12);
}
