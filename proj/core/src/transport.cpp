#include "levyflow/transport.hpp"

#include <algorithm>
#include <cmath>

#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

// Increment P(b) P(a)^-1 over [a, b] by extrapolated exponential midpoint.
Matrix advance(const Generator& z, double a, double b, double h, int rank, bool unitary) {
  if (b <= a) return identity_matrix(rank);
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
  auto march = [&](int steps) {
    const double hh = (b - a) / steps;
    Matrix p = identity_matrix(rank);
    for (int j = 0; j < steps; ++j) {
      const double tm = a + (j + 0.5) * hh;
      p = exp_matrix(-hh * z(tm)) * p;
    }
    return p;
  };
  const Matrix coarse = march(n);
  const Matrix fine = march(2 * n);
  Matrix m = (4.0 * fine - coarse) / 3.0;
  return unitary ? project_special_unitary(m) : m;
}

Matrix invert(const Matrix& p, bool unitary) {
  if (unitary) return p.adjoint();
  return p.partialPivLu().inverse();
}

}  // namespace

Matrix propagate(const Generator& z, double a, double b, double h, int rank,
                 std::span<const double> breaks, bool special_unitary) {
  if (!(h > 0.0)) throw DomainError("propagate: step must be positive");
  if (b < a) throw DomainError("propagate: interval reversed");
  std::vector<double> cuts{a};
  for (const double t : breaks) {
    if (t > a && t < b) cuts.push_back(t);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  // Chunks of at most 16 steps keep the extrapolation local.
  const double chunk = 16.0 * h;
  Matrix p = identity_matrix(rank);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / chunk - 1e-9)));
    for (int j = 0; j < pieces; ++j) {
      const double x0 = lo + (hi - lo) * j / pieces;
      const double x1 = j + 1 == pieces ? hi : lo + (hi - lo) * (j + 1) / pieces;
      p = advance(z, x0, x1, h, rank, special_unitary) * p;
    }
  }
  return p;
}

Propagator::Propagator(const Generator& z, QuadratureGrid grid, double h, int rank,
                       bool special_unitary)
    : grid_(std::move(grid)), rank_(rank) {
  if (!(h > 0.0)) throw DomainError("Propagator: step must be positive");
  nodes_.reserve(static_cast<std::size_t>(grid_.size()));
  inverses_.reserve(static_cast<std::size_t>(grid_.size()));
  Matrix p = identity_matrix(rank);
  double t = grid_.lower();
  for (int panel = 0; panel < grid_.num_panels(); ++panel) {
    for (int j = 0; j < kGaussOrder; ++j) {
      const double tn = grid_.node(panel * kGaussOrder + j);
      p = advance(z, t, tn, h, rank, special_unitary) * p;
      t = tn;
      nodes_.push_back(p);
      inverses_.push_back(invert(p, special_unitary));
    }
    const double hi = grid_.panel_upper(panel);
    p = advance(z, t, hi, h, rank, special_unitary) * p;
    t = hi;
  }
  end_ = p;
}

TransportCache::TransportCache(GaugeField field, Curve curve, TransportOptions options)
    : field_(std::move(field)), curve_(std::move(curve)), options_(options) {
  if (field_.dim() != curve_.dim()) throw DomainError("transport: field/curve dimension mismatch");
  const GaugeField& a = field_;
  const Curve& c = curve_;
  Generator z = [&a, &c](double t) { return a.contract(c.position(t), c.velocity(t)); };
  prop_ = std::make_unique<Propagator>(z, c.grid(options.panels), options.step, a.rank());
  const QuadratureGrid& g = prop_->grid();
  positions_.reserve(static_cast<std::size_t>(g.size()));
  velocities_.reserve(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) {
    positions_.push_back(c.position(g.node(i)));
    velocities_.push_back(c.velocity(g.node(i)));
  }
}

GroupElem transport(const TransportRequest& req) {
  if (!(req.s >= 0.0 && req.s <= req.t && req.t <= 1.0)) {
    throw DomainError("transport: need 0 <= s <= t <= 1");
  }
  if (!(req.step > 0.0)) throw DomainError("transport: step must be positive");
  if (req.field.dim() != req.curve.dim()) {
    throw DomainError("transport: field/curve dimension mismatch");
  }
  const GaugeField& a = req.field;
  const Curve& c = req.curve;
  Generator z = [&a, &c](double t) { return a.contract(c.position(t), c.velocity(t)); };
  return GroupElem::unchecked(
      propagate(z, req.s, req.t, req.step, a.rank(), c.breakpoints(), true));
}

GroupElem transport(const GaugeField& field, const Curve& curve, double step) {
  return transport(TransportRequest{field, curve, 0.0, 1.0, step});
}

FiberMap duhamel_derivative(const Generator& z, const Generator& dz, double c, double d,
                            TransportOptions options) {
  if (!(c < d)) throw DomainError("duhamel_derivative: need c < d");
  const int rank = static_cast<int>(z(c).rows());
  const Propagator p(z, QuadratureGrid::composite(options.panels, {}, c, d), options.step, rank,
                     false);
  const QuadratureGrid& g = p.grid();
  Matrix acc = zero_matrix(rank);
  for (int i = 0; i < g.size(); ++i) {
    acc += g.weight(i) * (p.inverse_at(i) * dz(g.node(i)) * p.at(i));
  }
  return -(p.end() * acc);
}

FiberMap transport_derivative(const TransportCache& cache, const CurveField& x) {
  const GaugeField& a = cache.field();
  const int d = a.dim();
  if (x.dim() != d) throw DomainError("transport_derivative: field dimension mismatch");
  const QuadratureGrid& g = cache.grid();
  Matrix bulk = zero_matrix(cache.rank());
  for (int i = 0; i < g.size(); ++i) {
    const Vector xv = x.value(g.node(i));
    const Vector& v = cache.velocity(i);
    const CurvatureValue f = a.curvature(cache.position(i));
    Matrix m = zero_matrix(cache.rank());
    for (int mu = 0; mu < d; ++mu) {
      if (xv[static_cast<std::size_t>(mu)] == 0.0) continue;
      for (int nu = 0; nu < d; ++nu) {
        if (mu == nu) continue;
        m += (xv[static_cast<std::size_t>(mu)] * v[static_cast<std::size_t>(nu)]) *
             f(mu, nu).matrix();
      }
    }
    bulk += g.weight(i) * cache.sandwich(i, m);
  }
  FiberMap out = -bulk;
  if (!x.vanishes_at_ends()) {
    const Curve& c = cache.curve();
    out -= a.contract(c.position(1.0), x.value(1.0)) * cache.total();
    out += cache.total() * a.contract(c.position(0.0), x.value(0.0));
  }
  return out;
}

FiberMap transport_derivative(const GaugeField& field, const Curve& curve, const CurveField& x,
                              TransportOptions options) {
  return transport_derivative(TransportCache(field, curve, options), x);
}

FiberMap transport_s_derivative(const TransportCache& cache, const FieldVelocity& da) {
  const QuadratureGrid& g = cache.grid();
  Matrix acc = zero_matrix(cache.rank());
  for (int i = 0; i < g.size(); ++i) {
    acc += g.weight(i) * cache.sandwich(i, da(cache.position(i), cache.velocity(i)));
  }
  return -acc;
}

FiberMap transport_s_derivative(const ConnectionFlow& flow, const Curve& curve, double s,
                                TransportOptions options) {
  const TransportCache cache(flow.field(s), curve, options);
  return transport_s_derivative(
      cache, [&flow, s](const Point& x, const Vector& v) { return flow.velocity(s, x, v); });
}

}  // namespace levyflow
