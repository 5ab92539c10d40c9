#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/heatflow.hpp"

using namespace levyflow;
using testutil::diff;

namespace {

constexpr double kPi = std::numbers::pi;

// the symbol of the composed 4th-order central first difference
double stencil_symbol(double kappa, double a) {
  const double th = kappa * a;
  return (8 * std::sin(th) - std::sin(2 * th)) / (6 * a);
}

}  // namespace

TEST_CASE("rhs of the zero field and of a transverse abelian mode") {
  const Torus torus(2, 2 * kPi);
  const int m = 32;
  const LatticeField zero = LatticeField::zero(torus, 2, m);
  for (const auto& r : ym_rhs(zero)) CHECK(max_abs(r.matrix()) == 0.0);
  CHECK(rhs_norm(zero, ym_rhs(zero)) == 0.0);

  // A_0 = c T cos(2 y): rhs_0 = -D^2 A_0 with the discrete symbol D
  const AnalyticField a(torus, 2, {{{0, 2, 0}, 0, Phase::Cos, su2(0.1, 0, 0.3)}});
  const LatticeField lat = sample_lattice(a, m);
  const auto rhs = ym_rhs(lat);
  const double d = stencil_symbol(2.0, lat.spacing());
  for (int site = 0; site < lat.num_sites(); site += 13) {
    CHECK(diff(rhs[site * 2].matrix(), -d * d * lat.at(site, 0).matrix()) < 1e-12);
    CHECK(max_abs(rhs[site * 2 + 1].matrix()) < 1e-12);
  }
  CHECK(cfl_limit(lat) == doctest::Approx(lat.spacing() * lat.spacing() / 16));
}

TEST_CASE("single RK4 step against the semi-discrete exponential") {
  const Torus torus(2, 2 * kPi);
  const AnalyticField a(torus, 2, {{{0, 1, 0}, 0, Phase::Sin, su2(0, 0, 0.4)}});
  const LatticeField lat = sample_lattice(a, 16);
  const double d = stencil_symbol(1.0, lat.spacing());
  const double ds = 0.5 * cfl_limit(lat);
  const FlowState next = step(make_state(lat), ds);
  const double z = -d * d * ds;
  const double rk4 = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
  const int site = lat.site_index({0, 3, 0});
  CHECK(diff(next.field.lattice().at(site, 0).matrix(), rk4 * lat.at(site, 0).matrix()) < 1e-14);
  CHECK(next.s == doctest::Approx(ds));
  CHECK(next.action < make_state(lat).action);
  CHECK_THROWS_AS(step(make_state(lat), 2 * cfl_limit(lat)), NumericalAbort);
  CHECK_THROWS_AS(make_state(GaugeField(a)), DomainError);
}

TEST_CASE("flow trajectory bookkeeping") {
  const Torus torus(2, 2 * kPi);
  const GaugeField init = sample_lattice(random_su2_field(torus, 3, 0.3, 2, 7), 16);
  FlowOptions opts;
  const double cfl = cfl_limit(init.lattice());
  opts.ds = 0.9 * cfl;
  opts.total = 20 * opts.ds;
  opts.save_every = 5;
  int saved = 0;
  opts.on_save = [&](const FlowState&) { ++saved; };
  const FlowTrajectory traj = flow(init, opts);
  CHECK(traj.log().size() == 21);
  CHECK(saved == 5);
  CHECK(traj.states().size() == 5);
  CHECK(traj.has(10 * opts.ds));
  CHECK_FALSE(traj.has(3 * opts.ds));
  CHECK_THROWS_AS(traj.at(3 * opts.ds), DomainError);
  for (std::size_t i = 1; i < traj.log().size(); ++i) {
    CHECK(traj.log()[i].action <= traj.log()[i - 1].action);
  }
  opts.keep = [](int k, double) { return k == 3; };
  opts.on_save = {};
  const FlowTrajectory kept = flow(init, opts);
  CHECK(kept.states().size() == 1);
  CHECK(kept.has(3 * opts.ds));

  FlowOptions bad = opts;
  bad.ds = 0.0;
  CHECK_THROWS(flow(init, bad));
}

TEST_CASE("abelian oracle splits transverse and gradient parts") {
  const Torus torus(2, 2.0);
  const double kappa = kPi;
  // A_0 cos(pi y): transverse; A_1 cos(pi y): gradient
  const AnalyticField a(torus, 2,
                        {{{0, 1, 0}, 0, Phase::Cos, su2(0, 0, 0.5)},
                         {{0, 1, 0}, 1, Phase::Cos, su2(0, 0, 0.2)}});
  const double s = 0.03;
  const GaugeField evolved(abelian_oracle(a, s));
  const Point x{0.3, 0.4, 0};
  const auto v = evolved.eval(x);
  const double c = std::cos(kappa * x[1]);
  CHECK(diff(v[0].matrix(), su2(0, 0, 0.5 * std::exp(-kappa * kappa * s) * c).matrix()) < 1e-14);
  CHECK(diff(v[1].matrix(), su2(0, 0, 0.2 * c).matrix()) < 1e-14);
  const GaugeField vel(abelian_oracle_velocity(a, s));
  const double h = 1e-6;
  const Matrix fd = (GaugeField(abelian_oracle(a, s + h)).eval(x)[0].matrix() -
                     GaugeField(abelian_oracle(a, s - h)).eval(x)[0].matrix()) /
                    (2 * h);
  CHECK(diff(vel.eval(x)[0].matrix(), fd) < 1e-8);
  CHECK(max_abs(vel.eval(x)[1].matrix()) < 1e-15);

  const AnalyticField noncommuting(torus, 2,
                                   {{{0, 1, 0}, 0, Phase::Cos, su2(0.5, 0, 0)},
                                    {{1, 0, 0}, 1, Phase::Cos, su2(0, 0.5, 0)}});
  CHECK_THROWS_AS(abelian_oracle(noncommuting, 0.1), DomainError);
  CHECK_THROWS_AS(abelian_oracle(a, -1.0), DomainError);
}

TEST_CASE("bump and perturbed flow") {
  const Torus torus(2, 1.0);
  const Point c{0.05, 0.5, 0};
  CHECK(bump(torus, c, 0.2, c) == doctest::Approx(1.0));
  CHECK(bump(torus, c, 0.2, {0.5, 0.5, 0}) == 0.0);
  // periodic distance 0.1 across the seam
  const double rho = 0.5;
  CHECK(bump(torus, c, 0.2, {0.95, 0.5, 0}) == doctest::Approx(std::exp(1 - 1 / (1 - rho * rho))));

  const AnalyticField zero = AnalyticField::zero(torus, 2);
  auto base = std::make_shared<PrescribedFlow>(
      [&](double) { return GaugeField(zero); },
      [](double, const Point&, const Vector&) { return zero_matrix(2); });
  const PerturbedFlow p(base, torus, c, 0.2, {1.0, 0.0, 0.0}, su2(0, 0, 0.5));
  const Matrix v = p.velocity(0.0, c, {2.0, 3.0, 0});
  CHECK(diff(v, 2.0 * su2(0, 0, 0.5).matrix()) < 1e-15);
  CHECK(max_abs(p.velocity(0.0, {0.5, 0.5, 0}, {2.0, 3.0, 0})) == 0.0);
}

TEST_CASE("trajectory flow serves states and their rhs") {
  const Torus torus(2, 2 * kPi);
  const GaugeField init = sample_lattice(random_su2_field(torus, 2, 0.2, 1, 3), 16);
  FlowOptions opts;
  opts.ds = 0.5 * cfl_limit(init.lattice());
  opts.total = 4 * opts.ds;
  opts.save_every = 2;
  auto traj = std::make_shared<const FlowTrajectory>(flow(init, opts));
  const TrajectoryFlow tf(traj);
  const GaugeField f = tf.field(2 * opts.ds);
  const LatticeField& lat = f.lattice();
  const auto rhs = ym_rhs(lat);
  const int site = 37;
  const Point x = lat.site_position(site);
  const Vector v{0.3, -1.2, 0};
  const Matrix expect = rhs[site * 2].matrix() * v[0] + rhs[site * 2 + 1].matrix() * v[1];
  CHECK(diff(tf.velocity(2 * opts.ds, x, v), expect) < 1e-13);
  CHECK_THROWS_AS(tf.field(opts.ds), DomainError);
}
