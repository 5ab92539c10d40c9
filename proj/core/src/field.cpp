#include "levyflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "lattice_ops.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/random.hpp"

namespace levyflow {

// ---------------------------------------------------------------- Torus ----

Torus::Torus(int dim, double length) : dim_(dim), length_(length) {
  if (dim != 2 && dim != 3) throw DomainError("Torus: dimension must be 2 or 3");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("Torus: side length must be positive");
  }
}

Point Torus::wrap(const Point& x) const {
  Point y{};
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    double v = x[ua] - length_ * std::floor(x[ua] / length_);
    if (v >= length_) v = 0.0;
    y[ua] = v;
  }
  return y;
}

double Torus::wavenumber(const WaveVector& k) const {
  double k2 = 0.0;
  for (int a = 0; a < dim_; ++a) {
    k2 += static_cast<double>(k[static_cast<std::size_t>(a)]) * k[static_cast<std::size_t>(a)];
  }
  return 2.0 * std::numbers::pi * std::sqrt(k2) / length_;
}

double Torus::volume() const { return std::pow(length_, dim_); }

// ------------------------------------------------------- CurvatureValue ----

CurvatureValue::CurvatureValue(int dim, int rank) : dim_(dim), rank_(rank) {
  for (int p = 0; p < num_pairs(dim); ++p) pair(p) = LieElem(rank);
}

int CurvatureValue::pair_index(int mu, int nu, int dim) {
  if (mu < 0 || nu <= mu || nu >= dim) throw DomainError("CurvatureValue: bad index pair");
  // (0,1) (0,2) (1,2) for d = 3; (0,1) for d = 2.
  return mu == 0 ? nu - 1 : dim - 1;
}

LieElem CurvatureValue::operator()(int mu, int nu) const {
  if (mu == nu) return LieElem(rank_);
  if (mu < nu) return pair(pair_index(mu, nu, dim_));
  return -pair(pair_index(nu, mu, dim_));
}

void CurvatureValue::set(int mu, int nu, const LieElem& value) {
  if (mu == nu) throw DomainError("CurvatureValue: diagonal components are zero");
  if (mu < nu) {
    pair(pair_index(mu, nu, dim_)) = value;
  } else {
    pair(pair_index(nu, mu, dim_)) = -value;
  }
}

// -------------------------------------------------------- AnalyticField ----

AnalyticField::AnalyticField(Torus torus, int rank, std::vector<FourierMode> modes)
    : torus_(torus), rank_(rank), modes_(std::move(modes)) {
  if (rank < 1 || rank > kMaxRank) throw DomainError("AnalyticField: rank out of range");
  for (const auto& mode : modes_) {
    if (mode.mu < 0 || mode.mu >= torus_.dim()) {
      throw DomainError("AnalyticField: mode direction out of range");
    }
    if (mode.coeff.rank() != rank) throw DomainError("AnalyticField: coefficient rank mismatch");
    LieElem::from_matrix(mode.coeff.matrix(), 1e-12);
    for (int a = torus_.dim(); a < kMaxDim; ++a) {
      if (mode.k[static_cast<std::size_t>(a)] != 0) {
        throw DomainError("AnalyticField: wave vector has components beyond the dimension");
      }
    }
  }
}

int AnalyticField::max_wavenumber() const {
  int kmax = 0;
  for (const auto& mode : modes_) {
    for (const int k : mode.k) kmax = std::max(kmax, std::abs(k));
  }
  return kmax;
}

// --------------------------------------------------------- LatticeField ----

LatticeField::LatticeField(Torus torus, int rank, int resolution, std::vector<LieElem> values)
    : torus_(torus), rank_(rank), m_(resolution), num_sites_(1), values_(std::move(values)) {
  if (rank < 1 || rank > kMaxRank) throw DomainError("LatticeField: rank out of range");
  if (resolution < 5) throw DomainError("LatticeField: resolution must be at least 5");
  for (int a = 0; a < torus_.dim(); ++a) num_sites_ *= m_;
  if (values_.size() != static_cast<std::size_t>(num_sites_ * torus_.dim())) {
    throw DomainError("LatticeField: expected " + std::to_string(num_sites_ * torus_.dim()) +
                      " site values, got " + std::to_string(values_.size()));
  }
  for (const auto& v : values_) {
    if (v.rank() != rank) throw DomainError("LatticeField: site value rank mismatch");
  }
}

LatticeField LatticeField::zero(const Torus& torus, int rank, int resolution) {
  int n = 1;
  for (int a = 0; a < torus.dim(); ++a) n *= resolution;
  return {torus, rank, resolution,
          std::vector<LieElem>(static_cast<std::size_t>(n * torus.dim()), LieElem(rank))};
}

std::array<int, kMaxDim> LatticeField::site_coords(int site) const {
  std::array<int, kMaxDim> c{};
  for (int a = torus_.dim() - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = site % m_;
    site /= m_;
  }
  return c;
}

int LatticeField::site_index(const std::array<int, kMaxDim>& coords) const {
  int site = 0;
  for (int a = 0; a < torus_.dim(); ++a) {
    int c = coords[static_cast<std::size_t>(a)] % m_;
    if (c < 0) c += m_;
    site = site * m_ + c;
  }
  return site;
}

Point LatticeField::site_position(int site) const {
  const auto c = site_coords(site);
  Point x{};
  for (int a = 0; a < torus_.dim(); ++a) {
    x[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] * spacing();
  }
  return x;
}

// ---------------------------------------------------------- FieldRepr ----

namespace detail {

class FieldRepr {
 public:
  virtual ~FieldRepr() = default;
  virtual const Torus& torus() const = 0;
  virtual int rank() const = 0;
  virtual const AnalyticField* as_analytic() const { return nullptr; }
  virtual const LatticeField* as_lattice() const { return nullptr; }
  virtual LieTuple eval(const Point& x) const = 0;
  virtual Matrix contract(const Point& x, const Vector& v) const = 0;
  virtual LieTuple partial_deriv(const Point& x, int axis) const = 0;
  virtual CurvatureValue curvature(const Point& x) const = 0;
  virtual CurvatureValue cov_deriv_curvature(const Point& x, int axis) const = 0;
  virtual LieTuple cov_div_curvature(const Point& x) const = 0;
};

namespace {

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// Values and derivatives of A up to second order at one point.
struct Jet {
  std::array<Matrix, kMaxDim> a;
  std::array<std::array<Matrix, kMaxDim>, kMaxDim> da;                        // [l][mu]
  std::array<std::array<std::array<Matrix, kMaxDim>, kMaxDim>, kMaxDim> dda;  // [k][l][mu]
};

class AnalyticRepr final : public FieldRepr {
 public:
  explicit AnalyticRepr(AnalyticField f) : f_(std::move(f)) {}

  const Torus& torus() const override { return f_.torus(); }
  int rank() const override { return f_.rank(); }
  const AnalyticField* as_analytic() const override { return &f_; }

  LieTuple eval(const Point& x) const override {
    const Jet j = jet(x, 0);
    LieTuple out{};
    for (int mu = 0; mu < dim(); ++mu) out[u(mu)] = LieElem::unchecked(j.a[u(mu)]);
    return out;
  }

  Matrix contract(const Point& x, const Vector& v) const override {
    Matrix acc = zero_matrix(rank());
    const double two_pi_l = 2.0 * std::numbers::pi / f_.torus().length();
    for (const auto& mode : f_.modes()) {
      const double vm = v[u(mode.mu)];
      if (vm == 0.0) continue;
      const double th = two_pi_l * dot(mode.k, x);
      const double c = mode.phase == Phase::Cos ? std::cos(th) : std::sin(th);
      acc += (c * vm) * mode.coeff.matrix();
    }
    return acc;
  }

  LieTuple partial_deriv(const Point& x, int axis) const override {
    const Jet j = jet(x, 1);
    LieTuple out{};
    for (int mu = 0; mu < dim(); ++mu) out[u(mu)] = LieElem::unchecked(j.da[u(axis)][u(mu)]);
    return out;
  }

  CurvatureValue curvature(const Point& x) const override { return curvature_from(jet(x, 1)); }

  CurvatureValue cov_deriv_curvature(const Point& x, int axis) const override {
    const Jet j = jet(x, 2);
    return cov_deriv_from(j, curvature_from(j), axis);
  }

  LieTuple cov_div_curvature(const Point& x) const override {
    const Jet j = jet(x, 2);
    const CurvatureValue f = curvature_from(j);
    const int d = dim();
    std::array<CurvatureValue, kMaxDim> cov;
    for (int l = 0; l < d; ++l) cov[u(l)] = cov_deriv_from(j, f, l);
    LieTuple out{};
    for (int nu = 0; nu < d; ++nu) {
      LieElem acc(rank());
      for (int mu = 0; mu < d; ++mu) {
        if (mu != nu) acc += cov[u(mu)](mu, nu);
      }
      out[u(nu)] = acc;
    }
    return out;
  }

 private:
  static std::size_t u(int i) { return static_cast<std::size_t>(i); }
  int dim() const { return f_.torus().dim(); }

  double dot(const WaveVector& k, const Point& x) const {
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) s += k[u(a)] * x[u(a)];
    return s;
  }

  Jet jet(const Point& x, int order) const {
    const int d = dim();
    const int n = rank();
    Jet j;
    for (int mu = 0; mu < d; ++mu) {
      j.a[u(mu)] = zero_matrix(n);
      if (order >= 1) {
        for (int l = 0; l < d; ++l) j.da[u(l)][u(mu)] = zero_matrix(n);
      }
      if (order >= 2) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) j.dda[u(k)][u(l)][u(mu)] = zero_matrix(n);
        }
      }
    }
    const double two_pi_l = 2.0 * std::numbers::pi / f_.torus().length();
    for (const auto& mode : f_.modes()) {
      const double th = two_pi_l * dot(mode.k, x);
      const double cs = std::cos(th);
      const double sn = std::sin(th);
      const bool is_cos = mode.phase == Phase::Cos;
      const Matrix& c = mode.coeff.matrix();
      const auto mu = u(mode.mu);
      j.a[mu] += (is_cos ? cs : sn) * c;
      if (order >= 1) {
        // d/dx_l cos = -q_l sin, d/dx_l sin = q_l cos
        const double first = is_cos ? -sn : cs;
        for (int l = 0; l < d; ++l) {
          const double ql = two_pi_l * mode.k[u(l)];
          if (ql != 0.0) j.da[u(l)][mu] += (ql * first) * c;
        }
      }
      if (order >= 2) {
        const double second = is_cos ? -cs : -sn;
        for (int k = 0; k < d; ++k) {
          const double qk = two_pi_l * mode.k[u(k)];
          if (qk == 0.0) continue;
          for (int l = 0; l < d; ++l) {
            const double ql = two_pi_l * mode.k[u(l)];
            if (ql != 0.0) j.dda[u(k)][u(l)][mu] += (qk * ql * second) * c;
          }
        }
      }
    }
    return j;
  }

  CurvatureValue curvature_from(const Jet& j) const {
    const int d = dim();
    CurvatureValue f(d, rank());
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu + 1; nu < d; ++nu) {
        f.pair(CurvatureValue::pair_index(mu, nu, d)) = LieElem::unchecked(
            j.da[u(mu)][u(nu)] - j.da[u(nu)][u(mu)] + comm(j.a[u(mu)], j.a[u(nu)]));
      }
    }
    return f;
  }

  // nabla_l F_mn = d_l d_m A_n - d_l d_n A_m + [d_l A_m, A_n] + [A_m, d_l A_n] + [A_l, F_mn]
  CurvatureValue cov_deriv_from(const Jet& j, const CurvatureValue& f, int l) const {
    const int d = dim();
    CurvatureValue out(d, rank());
    const auto ul = u(l);
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu + 1; nu < d; ++nu) {
        const int p = CurvatureValue::pair_index(mu, nu, d);
        const Matrix& fp = f.pair(p).matrix();
        out.pair(p) = LieElem::unchecked(
            j.dda[ul][u(mu)][u(nu)] - j.dda[ul][u(nu)][u(mu)] +
            comm(j.da[ul][u(mu)], j.a[u(nu)]) + comm(j.a[u(mu)], j.da[ul][u(nu)]) +
            comm(j.a[ul], fp));
      }
    }
    return out;
  }

  AnalyticField f_;
};

class LatticeRepr final : public FieldRepr {
 public:
  explicit LatticeRepr(LatticeField f) : f_(std::move(f)) {}

  const Torus& torus() const override { return f_.torus(); }
  int rank() const override { return f_.rank(); }
  const LatticeField* as_lattice() const override { return &f_; }

  LieTuple eval(const Point& x) const override {
    std::array<Matrix, kMaxDim> v;
    value_spline().eval(x, v.data());
    LieTuple out{};
    for (int mu = 0; mu < dim(); ++mu) out[u(mu)] = LieElem::unchecked(v[u(mu)]);
    return out;
  }

  Matrix contract(const Point& x, const Vector& v) const override {
    return value_spline().eval_contracted(x, v.data());
  }

  LieTuple partial_deriv(const Point& x, int axis) const override {
    const auto& s = derived().da;
    std::array<Matrix, kMaxDim * kMaxDim> v;
    s->eval(x, v.data());
    LieTuple out{};
    for (int mu = 0; mu < dim(); ++mu) {
      out[u(mu)] = LieElem::unchecked(v[u(axis * dim() + mu)]);
    }
    return out;
  }

  CurvatureValue curvature(const Point& x) const override {
    const int d = dim();
    std::array<Matrix, 3> v;
    derived().f->eval(x, v.data());
    CurvatureValue out(d, rank());
    for (int p = 0; p < CurvatureValue::num_pairs(d); ++p) {
      out.pair(p) = LieElem::unchecked(v[u(p)]);
    }
    return out;
  }

  CurvatureValue cov_deriv_curvature(const Point& x, int axis) const override {
    const int d = dim();
    const int pairs = CurvatureValue::num_pairs(d);
    std::array<Matrix, kMaxDim * 3> v;
    derived().cov_f->eval(x, v.data());
    CurvatureValue out(d, rank());
    for (int p = 0; p < pairs; ++p) out.pair(p) = LieElem::unchecked(v[u(axis * pairs + p)]);
    return out;
  }

  LieTuple cov_div_curvature(const Point& x) const override {
    std::array<Matrix, kMaxDim> v;
    derived().div->eval(x, v.data());
    LieTuple out{};
    for (int nu = 0; nu < dim(); ++nu) out[u(nu)] = LieElem::unchecked(v[u(nu)]);
    return out;
  }

 private:
  struct Derived {
    std::unique_ptr<PeriodicSpline> da;
    std::unique_ptr<PeriodicSpline> f;
    std::unique_ptr<PeriodicSpline> cov_f;
    std::unique_ptr<PeriodicSpline> div;
  };

  static std::size_t u(int i) { return static_cast<std::size_t>(i); }
  int dim() const { return f_.torus().dim(); }

  const PeriodicSpline& value_spline() const {
    std::call_once(value_once_, [this] {
      std::vector<Matrix> raw;
      raw.reserve(f_.values().size());
      for (const auto& v : f_.values()) raw.push_back(v.matrix());
      value_ = std::make_unique<PeriodicSpline>(f_.torus(), f_.resolution(), dim(), raw);
    });
    return *value_;
  }

  const Derived& derived() const {
    std::call_once(derived_once_, [this] {
      const LatticeDerivatives ld = lattice_derivatives(f_);
      const int d = dim();
      const int pairs = ld.pairs;
      derived_.da = std::make_unique<PeriodicSpline>(f_.torus(), f_.resolution(), d * d, ld.da);
      derived_.f = std::make_unique<PeriodicSpline>(f_.torus(), f_.resolution(), pairs, ld.f);
      derived_.cov_f =
          std::make_unique<PeriodicSpline>(f_.torus(), f_.resolution(), d * pairs, ld.cov_f);
      derived_.div = std::make_unique<PeriodicSpline>(f_.torus(), f_.resolution(), d, ld.div);
    });
    return derived_;
  }

  LatticeField f_;
  mutable std::once_flag value_once_;
  mutable std::unique_ptr<PeriodicSpline> value_;
  mutable std::once_flag derived_once_;
  mutable Derived derived_;
};

}  // namespace
}  // namespace detail

// ----------------------------------------------------------- GaugeField ----

GaugeField::GaugeField(AnalyticField field)
    : repr_(std::make_shared<detail::AnalyticRepr>(std::move(field))) {}

GaugeField::GaugeField(LatticeField field)
    : repr_(std::make_shared<detail::LatticeRepr>(std::move(field))) {}

bool GaugeField::is_analytic() const { return repr_->as_analytic() != nullptr; }

const AnalyticField& GaugeField::analytic() const {
  const auto* a = repr_->as_analytic();
  if (a == nullptr) throw DomainError("GaugeField: not an analytic field");
  return *a;
}

const LatticeField& GaugeField::lattice() const {
  const auto* l = repr_->as_lattice();
  if (l == nullptr) throw DomainError("GaugeField: not a lattice field");
  return *l;
}

const Torus& GaugeField::torus() const { return repr_->torus(); }
int GaugeField::rank() const { return repr_->rank(); }

namespace {
void check_axis(const GaugeField& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw DomainError("GaugeField: axis out of range");
}
}  // namespace

LieTuple GaugeField::eval(const Point& x) const { return repr_->eval(x); }

Matrix GaugeField::contract(const Point& x, const Vector& v) const {
  return repr_->contract(x, v);
}

LieTuple GaugeField::partial_deriv(const Point& x, int axis) const {
  check_axis(*this, axis);
  return repr_->partial_deriv(x, axis);
}

CurvatureValue GaugeField::curvature(const Point& x) const { return repr_->curvature(x); }

CurvatureValue GaugeField::cov_deriv_curvature(const Point& x, int axis) const {
  check_axis(*this, axis);
  return repr_->cov_deriv_curvature(x, axis);
}

LieTuple GaugeField::cov_div_curvature(const Point& x) const {
  return repr_->cov_div_curvature(x);
}

// ------------------------------------------------------ free operations ----

LatticeField sample_lattice(const GaugeField& field, int resolution) {
  LatticeField shape = LatticeField::zero(field.torus(), field.rank(), resolution);
  const int d = field.dim();
  std::vector<LieElem> values(shape.values().size());
  for (int site = 0; site < shape.num_sites(); ++site) {
    const LieTuple a = field.eval(shape.site_position(site));
    for (int mu = 0; mu < d; ++mu) {
      values[static_cast<std::size_t>(site * d + mu)] = a[static_cast<std::size_t>(mu)];
    }
  }
  return {field.torus(), field.rank(), resolution, std::move(values)};
}

double bianchi_residual(const GaugeField& field, const Point& x) {
  const int d = field.dim();
  std::array<CurvatureValue, kMaxDim> cov;
  for (int l = 0; l < d; ++l) cov[static_cast<std::size_t>(l)] = field.cov_deriv_curvature(x, l);
  double worst = 0.0;
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      for (int l = 0; l < d; ++l) {
        const Matrix s = cov[static_cast<std::size_t>(m)](n, l).matrix() +
                         cov[static_cast<std::size_t>(n)](l, m).matrix() +
                         cov[static_cast<std::size_t>(l)](m, n).matrix();
        worst = std::max(worst, max_abs(s));
      }
    }
  }
  return worst;
}

GaugeFunction phase_gauge(const Torus& torus, const LieElem& generator,
                          std::vector<PhaseMode> modes) {
  const double two_pi_l = 2.0 * std::numbers::pi / torus.length();
  const int d = torus.dim();
  auto theta = [=](const Point& x) {
    double th = 0.0;
    for (const auto& m : modes) {
      double ph = m.offset;
      for (int a = 0; a < d; ++a) ph += two_pi_l * m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      th += m.amplitude * std::sin(ph);
    }
    return th;
  };
  auto dtheta = [=](const Point& x, int axis) {
    double g = 0.0;
    for (const auto& m : modes) {
      double ph = m.offset;
      for (int a = 0; a < d; ++a) ph += two_pi_l * m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
      g += m.amplitude * two_pi_l * m.k[static_cast<std::size_t>(axis)] * std::cos(ph);
    }
    return g;
  };
  const Matrix t = generator.matrix();
  GaugeFunction psi;
  psi.value = [=](const Point& x) { return exp_matrix(theta(x) * t); };
  psi.derivative = [=](const Point& x, int axis) {
    return Matrix(dtheta(x, axis) * t * exp_matrix(theta(x) * t));
  };
  return psi;
}

GaugeField gauge_transform(const GaugeField& field, const GaugeFunction& psi, int resolution) {
  const LatticeField shape = LatticeField::zero(field.torus(), field.rank(), resolution);
  const int d = field.dim();
  const double h = 1e-3 * field.torus().length();
  std::vector<LieElem> values(shape.values().size());
  for (int site = 0; site < shape.num_sites(); ++site) {
    const Point x = shape.site_position(site);
    const Matrix g = psi.value(x);
    const Matrix g_inv = g.adjoint();
    const LieTuple a = field.eval(x);
    for (int mu = 0; mu < d; ++mu) {
      Matrix dg;
      if (psi.derivative) {
        dg = psi.derivative(x, mu);
      } else {
        auto shifted = [&](double t) {
          Point y = x;
          y[static_cast<std::size_t>(mu)] += t;
          return psi.value(y);
        };
        dg = (8.0 * (shifted(h) - shifted(-h)) - (shifted(2 * h) - shifted(-2 * h))) / (12.0 * h);
      }
      values[static_cast<std::size_t>(site * d + mu)] =
          project_lie(g_inv * a[static_cast<std::size_t>(mu)].matrix() * g + g_inv * dg);
    }
  }
  return LatticeField(field.torus(), field.rank(), resolution, std::move(values));
}

double ym_action(const GaugeField& field, int quadrature_points) {
  const int d = field.dim();
  if (field.is_lattice() && quadrature_points <= 0) {
    const LatticeField& lat = field.lattice();
    const detail::LatticeDerivatives ld = detail::lattice_derivatives(lat, false);
    double s = 0.0;
    for (const auto& fp : ld.f) s += fiber_metric(fp, fp);
    return s * std::pow(lat.spacing(), d);
  }
  int m = quadrature_points;
  if (m <= 0) m = 4 * field.analytic().max_wavenumber() + 8;
  const LatticeField grid = LatticeField::zero(field.torus(), field.rank(), std::max(m, 5));
  double s = 0.0;
  for (int site = 0; site < grid.num_sites(); ++site) {
    const CurvatureValue f = field.curvature(grid.site_position(site));
    for (int p = 0; p < CurvatureValue::num_pairs(d); ++p) {
      s += fiber_metric(f.pair(p).matrix(), f.pair(p).matrix());
    }
  }
  return s * std::pow(grid.spacing(), d);
}

namespace {

WaveVector random_wave_vector(Rng& rng, int dim, int max_k) {
  WaveVector k{};
  const auto span = static_cast<std::uint64_t>(2 * max_k + 1);
  do {
    for (int a = 0; a < dim; ++a) {
      k[static_cast<std::size_t>(a)] = static_cast<int>(rng() % span) - max_k;
    }
  } while (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; }));
  return k;
}

}  // namespace

AnalyticField random_su2_field(const Torus& torus, int modes, double amplitude, int max_k,
                               std::uint64_t seed) {
  if (modes < 0 || max_k < 1) throw DomainError("random_su2_field: bad mode parameters");
  Rng rng = make_rng(seed);
  std::vector<FourierMode> out;
  const double scale = amplitude / std::sqrt(3.0);
  for (int j = 0; j < modes; ++j) {
    FourierMode mode;
    mode.k = random_wave_vector(rng, torus.dim(), max_k);
    mode.mu = static_cast<int>(rng() % static_cast<std::uint64_t>(torus.dim()));
    mode.phase = (rng() & 1U) != 0 ? Phase::Sin : Phase::Cos;
    const double c1 = uniform(rng, -scale, scale);
    const double c2 = uniform(rng, -scale, scale);
    const double c3 = uniform(rng, -scale, scale);
    mode.coeff = su2(c1, c2, c3);
    out.push_back(std::move(mode));
  }
  return {torus, 2, std::move(out)};
}

// ---------------------------------------------------------- ScalarField ----

ScalarField::ScalarField(Torus torus, std::vector<ScalarMode> modes)
    : torus_(torus), modes_(std::move(modes)) {}

double ScalarField::value(const Point& x) const {
  const double two_pi_l = 2.0 * std::numbers::pi / torus_.length();
  double f = 0.0;
  for (const auto& m : modes_) {
    double th = 0.0;
    for (int a = 0; a < torus_.dim(); ++a) th += m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    th *= two_pi_l;
    f += m.coeff * (m.phase == Phase::Cos ? std::cos(th) : std::sin(th));
  }
  return f;
}

Vector ScalarField::gradient(const Point& x) const {
  const double two_pi_l = 2.0 * std::numbers::pi / torus_.length();
  Vector g{};
  for (const auto& m : modes_) {
    double th = 0.0;
    for (int a = 0; a < torus_.dim(); ++a) th += m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    th *= two_pi_l;
    const double first = m.phase == Phase::Cos ? -std::sin(th) : std::cos(th);
    for (int a = 0; a < torus_.dim(); ++a) {
      g[static_cast<std::size_t>(a)] += m.coeff * two_pi_l * m.k[static_cast<std::size_t>(a)] * first;
    }
  }
  return g;
}

double ScalarField::laplacian(const Point& x) const {
  double f = 0.0;
  const double two_pi_l = 2.0 * std::numbers::pi / torus_.length();
  for (const auto& m : modes_) {
    double th = 0.0;
    for (int a = 0; a < torus_.dim(); ++a) th += m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    th *= two_pi_l;
    const double q = torus_.wavenumber(m.k);
    f -= q * q * m.coeff * (m.phase == Phase::Cos ? std::cos(th) : std::sin(th));
  }
  return f;
}

ScalarField ScalarField::heat_evolved(double s) const {
  std::vector<ScalarMode> out = modes_;
  for (auto& m : out) {
    const double q = torus_.wavenumber(m.k);
    m.coeff *= std::exp(-q * q * s);
  }
  return {torus_, std::move(out)};
}

ScalarField random_scalar_field(const Torus& torus, int modes, double amplitude, int max_k,
                                std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<ScalarMode> out;
  for (int j = 0; j < modes; ++j) {
    ScalarMode m;
    m.k = random_wave_vector(rng, torus.dim(), max_k);
    m.phase = (rng() & 1U) != 0 ? Phase::Sin : Phase::Cos;
    m.coeff = uniform(rng, -amplitude, amplitude);
    out.push_back(m);
  }
  return {torus, std::move(out)};
}

}  // namespace levyflow
