#include "levyflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "levyflow/errors.hpp"
#include "levyflow/random.hpp"

namespace levyflow {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

double dot(const Vector& a, const Vector& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[u(i)] * b[u(i)];
  return s;
}

void check_dims(int a, int b, const char* op) {
  if (a != b) throw DomainError(std::string(op) + ": dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------- Curve ----

Curve::Curve(int dim, PositionFn position, VelocityFn velocity, std::vector<double> breaks)
    : dim_(dim),
      position_(std::move(position)),
      velocity_(std::move(velocity)),
      breaks_(std::move(breaks)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("Curve: dimension out of range");
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  std::erase_if(breaks_, [](double t) { return t <= 0.0 || t >= 1.0; });
}

CurveSamples Curve::sample(int m) const {
  if (m < 1) throw DomainError("Curve::sample: need at least one interval");
  CurveSamples s;
  for (int i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / m;
    s.t.push_back(t);
    s.position.push_back(position(t));
    s.velocity.push_back(velocity(t));
  }
  return s;
}

QuadratureGrid Curve::grid(int panels) const { return QuadratureGrid::composite(panels, breaks_); }

double Curve::length(int panels) const {
  const QuadratureGrid g = grid(panels);
  double len = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const Vector v = velocity(g.node(i));
    len += g.weight(i) * std::sqrt(dot(v, v, dim_));
  }
  return len;
}

// ----------------------------------------------------------- CurveField ----

CurveField::CurveField(int dim, Fn value, Fn derivative, bool vanishes_at_ends)
    : dim_(dim),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      vanishes_at_ends_(vanishes_at_ends) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("CurveField: dimension out of range");
  if (!value_) throw DomainError("CurveField: value function required");
}

CurveField CurveField::zero(int dim) {
  auto z = [](double) { return Vector{}; };
  return {dim, z, z, true};
}

Vector CurveField::derivative(double t) const {
  if (!derivative_) throw DomainError("CurveField: derivative not available");
  return derivative_(t);
}

CurveField CurveField::scaled(double c) const {
  const int d = dim_;
  Fn v = [f = value_, c, d](double t) {
    Vector x = f(t);
    for (int i = 0; i < d; ++i) x[u(i)] *= c;
    return x;
  };
  Fn dv;
  if (derivative_) {
    dv = [f = derivative_, c, d](double t) {
      Vector x = f(t);
      for (int i = 0; i < d; ++i) x[u(i)] *= c;
      return x;
    };
  }
  return {d, std::move(v), std::move(dv), vanishes_at_ends_};
}

// --------------------------------------------------------- curve library ----

Curve straight_line(int dim, const Point& from, const Point& to) {
  Vector v{};
  for (int i = 0; i < dim; ++i) v[u(i)] = to[u(i)] - from[u(i)];
  return {dim,
          [=](double t) {
            Point p{};
            for (int i = 0; i < dim; ++i) p[u(i)] = from[u(i)] + t * v[u(i)];
            return p;
          },
          [=](double) { return v; }};
}

Curve constant_curve(int dim, const Point& at) {
  return {dim, [=](double) { return at; }, [](double) { return Vector{}; }};
}

Curve circle(int dim, const Point& center, double radius, double turns, int axis0, int axis1) {
  if (axis0 == axis1 || axis0 < 0 || axis1 < 0 || axis0 >= dim || axis1 >= dim) {
    throw DomainError("circle: bad plane axes");
  }
  const double w = 2.0 * std::numbers::pi * turns;
  return {dim,
          [=](double t) {
            Point p = center;
            p[u(axis0)] += radius * std::cos(w * t);
            p[u(axis1)] += radius * std::sin(w * t);
            return p;
          },
          [=](double t) {
            Vector v{};
            v[u(axis0)] = -radius * w * std::sin(w * t);
            v[u(axis1)] = radius * w * std::cos(w * t);
            return v;
          }};
}

Curve fourier_curve(const Torus& torus, int modes, double amplitude, std::uint64_t seed) {
  if (modes < 0) throw DomainError("fourier_curve: negative mode count");
  const int d = torus.dim();
  const double len = torus.length();
  Rng rng = make_rng(seed);
  Point x0{};
  Vector vel{};
  for (int i = 0; i < d; ++i) x0[u(i)] = uniform(rng, 0.0, len);
  for (int i = 0; i < d; ++i) vel[u(i)] = uniform(rng, -0.5 * len, 0.5 * len);
  std::vector<Vector> a(u(modes));
  std::vector<Vector> b(u(modes));
  for (int k = 0; k < modes; ++k) {
    for (int i = 0; i < d; ++i) a[u(k)][u(i)] = uniform(rng, -1.0, 1.0);
    for (int i = 0; i < d; ++i) b[u(k)][u(i)] = uniform(rng, -1.0, 1.0);
  }
  const double pi = std::numbers::pi;
  return {d,
          [=](double t) {
            Point p{};
            for (int i = 0; i < d; ++i) p[u(i)] = x0[u(i)] + vel[u(i)] * t;
            for (int k = 1; k <= modes; ++k) {
              const double s = std::sin(pi * k * t);
              const double c = 1.0 - std::cos(pi * k * t);
              for (int i = 0; i < d; ++i) {
                p[u(i)] += amplitude * (a[u(k - 1)][u(i)] * s + b[u(k - 1)][u(i)] * c) / k;
              }
            }
            return p;
          },
          [=](double t) {
            Vector v = vel;
            for (int k = 1; k <= modes; ++k) {
              const double c = pi * std::cos(pi * k * t);
              const double s = pi * std::sin(pi * k * t);
              for (int i = 0; i < d; ++i) {
                v[u(i)] += amplitude * (a[u(k - 1)][u(i)] * c + b[u(k - 1)][u(i)] * s);
              }
            }
            return v;
          }};
}

// --------------------------------------------------------- field library ----

CurveField sine_basis(int n, int dim, int axis) {
  if (n < 1) throw DomainError("sine_basis: n must be >= 1");
  if (axis < 0 || axis >= dim) throw DomainError("sine_basis: axis out of range");
  const double w = std::numbers::pi * n;
  const double r2 = std::numbers::sqrt2;
  return {dim,
          [=](double t) {
            Vector x{};
            // Exact zeros at the endpoints.
            x[u(axis)] = (t == 0.0 || t == 1.0) ? 0.0 : r2 * std::sin(w * t);
            return x;
          },
          [=](double t) {
            Vector x{};
            x[u(axis)] = r2 * w * std::cos(w * t);
            return x;
          },
          true};
}

CurveField random_curve_field(int dim, int modes, double amplitude, bool vanishing,
                              std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Vector a{};
  Vector b{};
  if (!vanishing) {
    for (int i = 0; i < dim; ++i) a[u(i)] = uniform(rng, -amplitude, amplitude);
    for (int i = 0; i < dim; ++i) b[u(i)] = uniform(rng, -amplitude, amplitude);
  }
  std::vector<Vector> c(u(modes));
  for (int k = 0; k < modes; ++k) {
    for (int i = 0; i < dim; ++i) c[u(k)][u(i)] = uniform(rng, -amplitude, amplitude);
  }
  const double pi = std::numbers::pi;
  const double r2 = std::numbers::sqrt2;
  return {dim,
          [=](double t) {
            Vector x{};
            for (int i = 0; i < dim; ++i) x[u(i)] = a[u(i)] + b[u(i)] * t;
            if (t == 0.0 || t == 1.0) {
              if (vanishing) return Vector{};
              return x;
            }
            for (int k = 1; k <= modes; ++k) {
              const double s = r2 * std::sin(pi * k * t);
              for (int i = 0; i < dim; ++i) x[u(i)] += c[u(k - 1)][u(i)] * s;
            }
            return x;
          },
          [=](double t) {
            Vector x = b;
            for (int k = 1; k <= modes; ++k) {
              const double s = r2 * pi * k * std::cos(pi * k * t);
              for (int i = 0; i < dim; ++i) x[u(i)] += c[u(k - 1)][u(i)] * s;
            }
            return x;
          },
          vanishing};
}

CurveField constant_field(int dim, const Vector& v) {
  const bool zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  return {dim, [=](double) { return v; }, [](double) { return Vector{}; }, zero};
}

// ------------------------------------------------------------ operations ----

double h0_inner(const CurveField& x, const CurveField& y, const Curve& gamma, int panels) {
  check_dims(x.dim(), y.dim(), "h0_inner");
  check_dims(x.dim(), gamma.dim(), "h0_inner");
  const QuadratureGrid g = gamma.grid(panels);
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    s += g.weight(i) * dot(x.value(g.node(i)), y.value(g.node(i)), x.dim());
  }
  return s;
}

double h1_inner(const CurveField& x, const CurveField& y, const Curve& gamma, int panels) {
  if (!x.has_derivative() || !y.has_derivative()) {
    throw DomainError("h1_inner: both fields need derivatives");
  }
  const QuadratureGrid g = gamma.grid(panels);
  double s = h0_inner(x, y, gamma, panels);
  for (int i = 0; i < g.size(); ++i) {
    s += g.weight(i) * dot(x.derivative(g.node(i)), y.derivative(g.node(i)), x.dim());
  }
  return s;
}

CurveField covariant_deriv_along(const CurveField& x, const Curve& gamma) {
  check_dims(x.dim(), gamma.dim(), "covariant_deriv_along");
  if (!x.has_derivative()) throw DomainError("covariant_deriv_along: field has no derivative");
  return {x.dim(), [x](double t) { return x.derivative(t); }};
}

Curve perturb(const Curve& gamma, const CurveField& x, double eps) {
  check_dims(x.dim(), gamma.dim(), "perturb");
  if (!x.has_derivative()) throw DomainError("perturb: field has no derivative");
  const int d = gamma.dim();
  return {d,
          [=](double t) {
            Point p = gamma.position(t);
            const Vector v = x.value(t);
            for (int i = 0; i < d; ++i) p[u(i)] += eps * v[u(i)];
            return p;
          },
          [=](double t) {
            Vector v = gamma.velocity(t);
            const Vector w = x.derivative(t);
            for (int i = 0; i < d; ++i) v[u(i)] += eps * w[u(i)];
            return v;
          },
          gamma.breakpoints()};
}

Curve plateau(const Curve& gamma, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("plateau: r must lie in [0, 1]");
  if (r == 1.0) return gamma;
  const int d = gamma.dim();
  if (r == 0.0) return constant_curve(d, gamma.position(0.0));
  const Point end = gamma.position(r);
  std::vector<double> breaks;
  for (const double b : gamma.breakpoints()) {
    if (b < r) breaks.push_back(b);
  }
  breaks.push_back(r);
  return {d, [=](double t) { return t <= r ? gamma.position(t) : end; },
          [=](double t) { return t <= r ? gamma.velocity(t) : Vector{}; }, std::move(breaks)};
}

Reparametrization sine_reparametrization(double alpha) {
  const double w = 2.0 * std::numbers::pi;
  return {[=](double t) { return t + alpha * std::sin(w * t) / w; },
          [=](double t) { return 1.0 + alpha * std::cos(w * t); }};
}

Curve reparametrize(const Curve& gamma, const Reparametrization& phi) {
  if (!phi.map || !phi.derivative) throw DomainError("reparametrize: map and derivative required");
  if (std::abs(phi.map(0.0)) > 1e-14 || std::abs(phi.map(1.0) - 1.0) > 1e-14) {
    throw DomainError("reparametrize: phi must fix 0 and 1");
  }
  constexpr int kChecks = 1024;
  for (int i = 0; i <= kChecks; ++i) {
    if (!(phi.derivative(static_cast<double>(i) / kChecks) > 0.0)) {
      throw DomainError("reparametrize: phi is not monotone increasing");
    }
  }
  // Pull breakpoints back through phi by bisection.
  std::vector<double> breaks;
  for (const double b : gamma.breakpoints()) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi.map(mid) < b ? lo : hi) = mid;
    }
    breaks.push_back(0.5 * (lo + hi));
  }
  const int d = gamma.dim();
  return {d, [=](double t) { return gamma.position(phi.map(t)); },
          [=](double t) {
            Vector v = gamma.velocity(phi.map(t));
            const double s = phi.derivative(t);
            for (int i = 0; i < d; ++i) v[u(i)] *= s;
            return v;
          },
          std::move(breaks)};
}

Curve concat(const Curve& first, const Curve& second, const Torus& torus) {
  check_dims(first.dim(), second.dim(), "concat");
  const int d = first.dim();
  const Point a = first.position(1.0);
  const Point b = second.position(0.0);
  Vector shift{};
  for (int i = 0; i < d; ++i) {
    const double diff = a[u(i)] - b[u(i)];
    const double s = torus.length() * std::round(diff / torus.length());
    if (std::abs(diff - s) > 1e-10) throw DomainError("concat: endpoints do not match");
    shift[u(i)] = s;
  }
  std::vector<double> breaks{0.5};
  for (const double t : first.breakpoints()) breaks.push_back(0.5 * t);
  for (const double t : second.breakpoints()) breaks.push_back(0.5 + 0.5 * t);
  return {d,
          [=](double t) {
            if (t <= 0.5) return first.position(2.0 * t);
            Point p = second.position(2.0 * t - 1.0);
            for (int i = 0; i < d; ++i) p[u(i)] += shift[u(i)];
            return p;
          },
          [=](double t) {
            Vector v = t <= 0.5 ? first.velocity(2.0 * t) : second.velocity(2.0 * t - 1.0);
            for (int i = 0; i < d; ++i) v[u(i)] *= 2.0;
            return v;
          },
          std::move(breaks)};
}

}  // namespace levyflow
