#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "levyflow/quadrature.hpp"
#include "levyflow/random.hpp"

using namespace levyflow;

TEST_CASE("derive_seed is a stable function of its arguments") {
  CHECK(derive_seed(42, "field", 1) == derive_seed(42, "field", 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t parent : {0ull, 1ull, 42ull}) {
    for (const char* label : {"field", "curve", "flow"}) {
      for (std::uint64_t i = 0; i < 4; ++i) seen.insert(derive_seed(parent, label, i));
    }
  }
  CHECK(seen.size() == 36);
}

TEST_CASE("uniform stays in range with the right mean") {
  Rng rng = make_rng(derive_seed(5, "test"));
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform(rng, -2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  Rng a = make_rng(9), b = make_rng(9);
  CHECK(uniform(a, 0, 1) == uniform(b, 0, 1));
}

TEST_CASE("Gauss-Legendre reference rule") {
  double wsum = 0.0;
  for (double w : gauss_weights()) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
  // exact through degree 15
  for (int k = 0; k <= 15; ++k) {
    double s = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) s += gauss_weights()[i] * std::pow(gauss_nodes()[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-14).scale(1.0));
  }
  // partial weights reproduce integrals of x^k from -1 to xi, k < 8
  const double xi = 0.3;
  const auto pw = gauss_partial_weights(xi);
  for (int k = 0; k < kGaussOrder; ++k) {
    double s = 0.0;
    for (int j = 0; j < kGaussOrder; ++j) s += pw[j] * std::pow(gauss_nodes()[j], k);
    const double exact = (std::pow(xi, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("composite grid integrates smooth functions") {
  const auto grid = QuadratureGrid::composite(16, {}, 0.0, 2.0);
  CHECK(grid.num_panels() == 16);
  CHECK(grid.size() == 16 * kGaussOrder);
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) s += grid.weight(i) * std::exp(grid.node(i));
  CHECK(s == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("composite grid respects breakpoints") {
  const std::vector<double> breaks{0.3};
  const auto grid = QuadratureGrid::composite(10, breaks);
  bool aligned = false;
  for (int p = 0; p < grid.num_panels(); ++p) {
    CHECK_FALSE((grid.panel_lower(p) < 0.3 && grid.panel_upper(p) > 0.3));
    if (std::abs(grid.panel_upper(p) - 0.3) < 1e-15) aligned = true;
  }
  CHECK(aligned);
  // |t - 0.3| is integrated exactly
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) s += grid.weight(i) * std::abs(grid.node(i) - 0.3);
  CHECK(s == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-14));
}

TEST_CASE("running integrals") {
  const auto grid = QuadratureGrid::composite(8);
  std::vector<double> f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f[i] = std::cos(3.0 * grid.node(i));
  const auto cum = grid.cumulative(f, 0.0);
  for (int i = 0; i < grid.size(); i += 5) {
    CHECK(cum[i] == doctest::Approx(std::sin(3.0 * grid.node(i)) / 3.0).epsilon(1e-9).scale(1.0));
  }
  for (double x : {0.0, 0.123, 0.5, 0.77, 1.0}) {
    CHECK(grid.integral_to(f, x, 0.0) ==
          doctest::Approx(std::sin(3.0 * x) / 3.0).epsilon(1e-9).scale(1.0));
  }
}
