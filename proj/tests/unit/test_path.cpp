#include <doctest.h>

#include <cmath>
#include <numbers>

#include "levyflow/errors.hpp"
#include "levyflow/path.hpp"

using namespace levyflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("curve library lengths") {
  const Curve line = straight_line(2, {0, 0, 0}, {3, 4, 0});
  CHECK(line.length() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(line.position(0.5)[0] == doctest::Approx(1.5));
  const Curve c = circle(3, {1, 1, 1}, 0.5, 2.0, 0, 2);
  CHECK(c.length() == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(c.position(0.0)[1] == doctest::Approx(1.0));
  CHECK(c.position(0.0)[0] == doctest::Approx(c.position(1.0)[0]));
  CHECK(constant_curve(2, {1, 2, 0}).length() == doctest::Approx(0.0));
  CHECK_THROWS_AS(circle(2, {0, 0, 0}, 1.0, 1.0, 0, 0), DomainError);
}

TEST_CASE("curve velocity matches the position derivative") {
  const Torus torus(3, 2 * kPi);
  const Curve g = fourier_curve(torus, 3, 0.4, 11);
  const double h = 1e-5;
  for (double t : {0.1, 0.45, 0.9}) {
    const Point p = g.position(t + h), m = g.position(t - h);
    for (int a = 0; a < 3; ++a) {
      CHECK(g.velocity(t)[a] == doctest::Approx((p[a] - m[a]) / (2 * h)).epsilon(1e-8));
    }
  }
  const Curve same = fourier_curve(torus, 3, 0.4, 11);
  CHECK(same.position(0.3) == g.position(0.3));
  CHECK(fourier_curve(torus, 3, 0.4, 12).position(0.3) != g.position(0.3));
}

TEST_CASE("curve sampling") {
  const auto s = straight_line(2, {0, 0, 0}, {1, 2, 0}).sample(4);
  REQUIRE(s.t.size() == 5);
  CHECK(s.t[4] == 1.0);
  CHECK(s.position[2][1] == doctest::Approx(1.0));
  CHECK(s.velocity[3][1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(straight_line(2, {}, {}).sample(0), DomainError);
}

TEST_CASE("sine basis is H0 orthonormal") {
  const Curve g = straight_line(2, {0, 0, 0}, {1, 0, 0});
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      const double ip = h0_inner(sine_basis(n, 2, 0), sine_basis(m, 2, 0), g);
      CHECK(ip == doctest::Approx(n == m ? 1.0 : 0.0).scale(1.0).epsilon(1e-13));
    }
    CHECK(h0_inner(sine_basis(n, 2, 0), sine_basis(n, 2, 1), g) == doctest::Approx(0.0));
    // ||e_n'||^2 = (pi n)^2
    CHECK(h1_inner(sine_basis(n, 2, 1), sine_basis(n, 2, 1), g) ==
          doctest::Approx(1.0 + kPi * kPi * n * n).epsilon(1e-12));
  }
  CHECK(sine_basis(3, 2).vanishes_at_ends());
  CHECK_THROWS_AS(sine_basis(0, 2), DomainError);
}

TEST_CASE("random curve fields") {
  const CurveField v = random_curve_field(2, 3, 0.5, true, 4);
  CHECK(v.vanishes_at_ends());
  CHECK(std::abs(v.value(0.0)[0]) < 1e-15);
  CHECK(std::abs(v.value(1.0)[1]) < 1e-14);
  const CurveField f = random_curve_field(2, 3, 0.5, false, 4);
  CHECK_FALSE(f.vanishes_at_ends());
  const double h = 1e-6;
  CHECK(f.derivative(0.3)[1] ==
        doctest::Approx((f.value(0.3 + h)[1] - f.value(0.3 - h)[1]) / (2 * h)).epsilon(1e-7));
  CHECK(f.scaled(2.0).value(0.7)[0] == doctest::Approx(2.0 * f.value(0.7)[0]));
  CHECK_THROWS_AS(CurveField(2, [](double) { return Vector{}; }).derivative(0.1), DomainError);
}

TEST_CASE("perturb, plateau and covariant derivative") {
  const Curve g = straight_line(2, {0, 0, 0}, {1, 0, 0});
  const CurveField x = sine_basis(1, 2, 1);
  const Curve p = perturb(g, x, 0.1);
  CHECK(p.position(0.5)[1] == doctest::Approx(0.1 * std::sqrt(2.0)));
  CHECK(p.velocity(0.0)[1] == doctest::Approx(0.1 * std::sqrt(2.0) * kPi));
  CHECK(covariant_deriv_along(x, g).value(0.0)[1] == doctest::Approx(std::sqrt(2.0) * kPi));

  const Curve q = plateau(g, 0.4);
  CHECK(q.position(0.2)[0] == doctest::Approx(0.2));
  CHECK(q.position(0.9)[0] == doctest::Approx(0.4));
  CHECK(q.velocity(0.9)[0] == 0.0);
  CHECK(q.length() == doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(plateau(g, 1.5), DomainError);
}

TEST_CASE("reparametrization keeps the image and the length") {
  const Torus torus(2, 2 * kPi);
  const Curve g = fourier_curve(torus, 2, 0.3, 3);
  const auto phi = sine_reparametrization(0.5);
  const Curve r = reparametrize(g, phi);
  CHECK(r.length() == doctest::Approx(g.length()).epsilon(1e-10));
  const double t = 0.3;
  CHECK(r.position(t)[0] == doctest::Approx(g.position(phi.map(t))[0]));
  CHECK_THROWS_AS(reparametrize(g, sine_reparametrization(1.5)), DomainError);
  Reparametrization shift{[](double t) { return t + 0.1; }, [](double) { return 1.0; }};
  CHECK_THROWS_AS(reparametrize(g, shift), DomainError);
}

TEST_CASE("concatenation") {
  const Torus torus(2, 1.0);
  const Curve a = straight_line(2, {0.2, 0.2, 0}, {0.9, 0.2, 0});
  // starts at the same torus point as a's end, lifted by one period
  const Curve b = straight_line(2, {-0.1, 0.2, 0}, {-0.1, 0.7, 0});
  const Curve c = concat(a, b, torus);
  CHECK(c.length() == doctest::Approx(1.2).epsilon(1e-13));
  CHECK(c.position(0.5)[0] == doctest::Approx(0.9));
  CHECK(c.position(1.0)[0] == doctest::Approx(0.9));
  CHECK(c.position(1.0)[1] == doctest::Approx(0.7));
  CHECK(c.velocity(0.25)[0] == doctest::Approx(1.4));
  const Curve off = straight_line(2, {0.5, 0.5, 0}, {0.6, 0.5, 0});
  CHECK_THROWS_AS(concat(a, off, torus), DomainError);
}
