#include "levyflow/experiments.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "levyflow/errors.hpp"
#include "levyflow/random.hpp"

namespace levyflow {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t u(int i) { return static_cast<std::size_t>(i); }

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, x);
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

Vector add(const Vector& a, double ca, const Vector& b, double cb) {
  Vector out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

// a X + b Y
CurveField combine(const CurveField& x, double a, const CurveField& y, double b) {
  CurveField::Fn deriv;
  if (x.has_derivative() && y.has_derivative()) {
    deriv = [x, y, a, b](double t) { return add(x.derivative(t), a, y.derivative(t), b); };
  }
  return {x.dim(), [x, y, a, b](double t) { return add(x.value(t), a, y.value(t), b); }, deriv,
          x.vanishes_at_ends() && y.vanishes_at_ends()};
}

Matrix transport_matrix(const GaugeField& field, const Curve& curve, double step) {
  return transport(field, curve, step).matrix();
}

// (U(gamma + eps X) - U(gamma - eps X)) / 2 eps
Matrix fd_first(const GaugeField& field, const Curve& gamma, const CurveField& x, double eps,
                double step) {
  return (transport_matrix(field, perturb(gamma, x, eps), step) -
          transport_matrix(field, perturb(gamma, x, -eps), step)) /
         (2.0 * eps);
}

Matrix random_matrix(Rng& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  }
  return m;
}

LieElem random_su2(Rng& rng, double amplitude) {
  const double a = uniform(rng, -amplitude, amplitude);
  const double b = uniform(rng, -amplitude, amplitude);
  const double c = uniform(rng, -amplitude, amplitude);
  return su2(a, b, c);
}

// Least-squares slope of log(err) against log(n), negated.
double decay_rate(const std::vector<int>& ns, const std::vector<double>& errs) {
  const std::size_t m = ns.size();
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dm = static_cast<double>(m);
  return -(dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

// sup over the grid of |a - b|, all components.
double lattice_distance(const LatticeField& a, const LatticeField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, max_abs(a.values()[i].matrix() - b.values()[i].matrix()));
  }
  return m;
}

double lattice_sup(const LatticeField& a) {
  double m = 0.0;
  for (const auto& v : a.values()) m = std::max(m, max_abs(v.matrix()));
  return m;
}

Matrix contract_div(const GaugeField& field, const Point& x, const Vector& v) {
  const LieTuple div = field.cov_div_curvature(x);
  Matrix out = zero_matrix(field.rank());
  for (int nu = 0; nu < field.dim(); ++nu) out += v[u(nu)] * div[u(nu)].matrix();
  return out;
}

// Steps of the configured flow, matching flow().
int flow_steps(double total, double ds) {
  return std::max(1, static_cast<int>(std::ceil(total / ds - 1e-9)));
}

std::vector<int> checkpoint_steps(const ExperimentConfig& cfg) {
  const int steps = flow_steps(cfg.flow.total, cfg.flow.ds);
  const double ds = cfg.flow.total / steps;
  std::vector<int> out;
  for (const double c : cfg.flow.checkpoints) {
    const int k = static_cast<int>(std::lround(c / ds));
    if (k - 2 * cfg.flow.fd_spacing < 0 || k + 2 * cfg.flow.fd_spacing > steps) {
      throw ConfigError("config: checkpoint " + std::to_string(c) +
                        " leaves no room for FD neighbours in [0, flow.total]");
    }
    out.push_back(k);
  }
  return out;
}

const FlowState& state_at_step(const FlowTrajectory& traj, int k) {
  return traj.at(k * traj.ds());
}

// Abelian su(2) test field: transverse, mixed and gradient polarizations.
AnalyticField abelian_test_field(const Torus& torus, int rank) {
  const auto g = [rank](double c) { return diagonal_generator(rank, c); };
  std::vector<FourierMode> modes{
      {{1, 0, 0}, 1, Phase::Cos, g(0.3)},
      {{0, 1, 0}, 0, Phase::Sin, g(0.2)},
      {{1, 1, 0}, 0, Phase::Cos, g(0.15)},
      {{1, 1, 0}, 1, Phase::Cos, g(-0.15)},
      {{1, -1, 0}, 0, Phase::Sin, g(0.1)},
      {{1, 0, 0}, 0, Phase::Cos, g(0.25)},
  };
  if (torus.dim() == 3) {
    modes.push_back({{0, 0, 1}, 0, Phase::Cos, g(0.2)});
    modes.push_back({{0, 1, 1}, 0, Phase::Sin, g(0.1)});
  }
  return {torus, rank, std::move(modes)};
}

// x -> psi1(x) psi2(x)
GaugeFunction compose(GaugeFunction a, GaugeFunction b) {
  GaugeFunction out;
  out.value = [a, b](const Point& x) -> Matrix { return a.value(x) * b.value(x); };
  out.derivative = [a, b](const Point& x, int axis) -> Matrix {
    return a.derivative(x, axis) * b.value(x) + a.value(x) * b.derivative(x, axis);
  };
  return out;
}

}  // namespace

Matrix cesaro_bias_coefficient(const TransportCache& cache, const KernelTriple& kernels,
                               const Matrix& laplacian) {
  const int n = cache.size();
  const int d = cache.field().dim();
  const auto& w = cache.grid().weights();
  Matrix ends = zero_matrix(cache.rank());
  Matrix diagonal = zero_matrix(cache.rank());
  for (int mu = 0; mu < d; ++mu) {
    ends += kernels.levy(0, mu, mu) + kernels.levy(n - 1, mu, mu);
    for (int i = 0; i < n; ++i) diagonal += w[u(i)] * kernels.volterra(i, i, mu, mu);
  }
  return -0.25 * ends + 0.5 * laplacian + diagonal;
}

// ------------------------------------------------------------- report ----

Check& VerificationReport::add(std::string name, double residual, double tolerance,
                               json details, double seconds) {
  Check c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tolerance;
  c.passed = residual <= tolerance;
  c.details = std::move(details);
  c.seconds = seconds;
  checks_.push_back(std::move(c));
  return checks_.back();
}

Check& VerificationReport::require_at_least(std::string name, double value, double minimum,
                                            json details, double seconds) {
  Check& c = add(std::move(name), value, minimum, std::move(details), seconds);
  c.lower_bound = true;
  c.passed = value >= minimum;
  return c;
}

void VerificationReport::merge(const VerificationReport& other, std::string_view prefix) {
  for (Check c : other.checks_) {
    if (!prefix.empty()) c.name = std::string(prefix) + "/" + c.name;
    checks_.push_back(std::move(c));
  }
  for (const auto& n : other.notes_) notes_.push_back(n);
}

bool VerificationReport::passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

const Check& VerificationReport::find(std::string_view name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return c;
  }
  throw DomainError("VerificationReport: no check named " + std::string(name));
}

json VerificationReport::to_json() const {
  json checks = json::array();
  for (const auto& c : checks_) {
    json j = {{"name", c.name},
              {"residual", c.residual},
              {"tolerance", c.tolerance},
              {"comparison", c.lower_bound ? ">=" : "<="},
              {"passed", c.passed}};
    if (!c.details.is_null()) j["details"] = c.details;
    checks.push_back(std::move(j));
  }
  return {{"title", title_}, {"passed", passed()}, {"notes", notes_}, {"checks", checks}};
}

json VerificationReport::timing_json() const {
  json out = json::object();
  double total = 0.0;
  for (const auto& c : checks_) {
    out[c.name] = c.seconds;
    total += c.seconds;
  }
  return {{"title", title_}, {"seconds", out}, {"total", total}};
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << title_ << ": " << (passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : checks_) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << "  residual "
       << std::setprecision(3) << std::scientific << c.residual << (c.lower_bound ? " >= " : " <= ")
       << c.tolerance << "  (" << std::fixed << std::setprecision(2) << c.seconds << " s)\n";
  }
  for (const auto& n : notes_) os << "  note: " << n << "\n";
  return os.str();
}

double relative_error(const Matrix& a, const Matrix& b) {
  const double diff = (a - b).norm();
  const double scale = b.norm();
  return scale > 0.0 ? diff / scale : diff;
}

// ------------------------------------------------------------ transport ----

VerificationReport check_transport_laws(const GaugeField& field, const std::vector<Curve>& curves,
                                        const ExperimentConfig& cfg, int triples) {
  VerificationReport rep("transport");
  const double h = cfg.transport.step;
  const int nc = static_cast<int>(curves.size());
  if (nc == 0) throw DomainError("check_transport_laws: no curves");

  auto t0 = Clock::now();
  std::vector<double> unit(u(nc)), reparam(u(nc));
  std::vector<Matrix> totals(u(nc));
  parallel_for(nc, cfg.threads, [&](int c) {
    totals[u(c)] = transport_matrix(field, curves[u(c)], h);
    unit[u(c)] = unitarity_residual(totals[u(c)]);
    const Curve re = reparametrize(curves[u(c)], sine_reparametrization(0.5));
    reparam[u(c)] = max_abs(transport_matrix(field, re, h) - totals[u(c)]);
  });
  const double t_curves = since(t0);
  json per_curve = json::array();
  for (int c = 0; c < nc; ++c) {
    per_curve.push_back({{"curve", c},
                         {"unitarity", unit[u(c)]},
                         {"reparametrization", reparam[u(c)]},
                         {"transport", matrix_json(totals[u(c)])}});
  }
  rep.add("unitarity", max_of(unit), cfg.tolerances.unitarity, per_curve, t_curves / 2);

  t0 = Clock::now();
  Rng rng = make_rng(derive_seed(cfg.seed, "group_law"));
  std::vector<std::array<double, 3>> rst(u(triples));
  for (auto& x : rst) {
    for (double& v : x) v = uniform(rng, 0.0, 1.0);
    std::sort(x.begin(), x.end());
  }
  std::vector<double> group(u(triples));
  parallel_for(triples, cfg.threads, [&](int i) {
    const Curve& g = curves[u(i % nc)];
    const auto [r, s, t] = rst[u(i)];
    const auto piece = [&](double a, double b) {
      return transport(TransportRequest{field, g, a, b, h}).matrix();
    };
    group[u(i)] = max_abs(piece(s, t) * piece(r, s) - piece(r, t));
  });
  rep.add("group_law", max_of(group), cfg.tolerances.group_law,
          {{"triples", triples}, {"curves", nc}}, since(t0));
  rep.add("reparametrization", max_of(reparam), cfg.tolerances.reparametrization,
          {{"map", "t + 0.5 sin(2 pi t) / (2 pi)"}}, t_curves / 2);
  return rep;
}

VerificationReport check_duhamel(const ExperimentConfig& cfg) {
  VerificationReport rep("verify-duhamel");
  const auto t0 = Clock::now();
  constexpr double kEps = 1e-5;
  constexpr int kTerms = 3;
  const int pairs = cfg.checks;

  struct Series {
    std::array<LieElem, kTerms> a, b;
    Matrix operator()(double t) const {
      Matrix m = a[0].matrix();
      for (int j = 1; j < kTerms; ++j) {
        m += std::cos(M_PI * j * t) * a[u(j)].matrix() + std::sin(M_PI * j * t) * b[u(j)].matrix();
      }
      return m;
    }
  };
  std::vector<std::pair<Series, Series>> inputs(u(pairs));
  Rng rng = make_rng(derive_seed(cfg.seed, "duhamel"));
  for (auto& [z, dz] : inputs) {
    for (Series* s : {&z, &dz}) {
      for (int j = 0; j < kTerms; ++j) {
        s->a[u(j)] = random_su2(rng, 1.0);
        s->b[u(j)] = random_su2(rng, 1.0);
      }
    }
  }

  std::vector<double> err(u(pairs));
  parallel_for(pairs, cfg.threads, [&](int i) {
    const auto& [z, dz] = inputs[u(i)];
    const Matrix formula = duhamel_derivative(z, dz, 0.0, 1.0, cfg.transport);
    const auto shifted = [&](double e) {
      return propagate([&](double t) -> Matrix { return z(t) + e * dz(t); }, 0.0, 1.0,
                       cfg.transport.step, 2);
    };
    const Matrix fd = (shifted(kEps) - shifted(-kEps)) / (2.0 * kEps);
    err[u(i)] = relative_error(formula, fd);
  });
  rep.add("duhamel", max_of(err), cfg.tolerances.duhamel,
          {{"pairs", pairs}, {"eps", kEps}, {"errors", err}}, since(t0));
  return rep;
}

VerificationReport check_first_derivative(const GaugeField& field,
                                          const std::vector<Curve>& curves,
                                          const ExperimentConfig& cfg) {
  VerificationReport rep("first-derivative");
  const auto t0 = Clock::now();
  constexpr double kEps = 1e-4;
  const int nc = static_cast<int>(curves.size());
  const int cases = std::max(2 * nc, 10);
  std::vector<double> err(u(cases));
  std::vector<int> free_ends(u(cases));
  parallel_for(cases, cfg.threads, [&](int i) {
    const Curve& g = curves[u(i % nc)];
    const bool vanishing = i % 2 == 0;
    free_ends[u(i)] = vanishing ? 0 : 1;
    const CurveField x = random_curve_field(g.dim(), 3, 0.3, vanishing,
                                            derive_seed(cfg.seed, "first_derivative", u(i)));
    const Matrix formula = transport_derivative(field, g, x, cfg.transport);
    const Matrix fd = fd_first(field, g, x, kEps, cfg.transport.step);
    err[u(i)] = relative_error(formula, fd);
  });
  const int with_ends = std::accumulate(free_ends.begin(), free_ends.end(), 0);
  rep.add("first_derivative", max_of(err), cfg.tolerances.first_derivative,
          {{"cases", cases}, {"nonzero_endpoint_cases", with_ends}, {"eps", kEps},
           {"errors", err}},
          since(t0));
  return rep;
}

VerificationReport check_gradient(const GaugeField& field, const std::vector<Curve>& curves,
                                  const ExperimentConfig& cfg) {
  VerificationReport rep("gradient");
  const auto t0 = Clock::now();
  constexpr double kEps = 1e-4;
  const int nc = static_cast<int>(curves.size());
  const int pairs = cfg.checks;
  std::vector<double> err(u(nc));
  parallel_for(nc, cfg.threads, [&](int c) {
    const Curve& g = curves[u(c)];
    const TransportCache cache(field, g, cfg.transport);
    const GradientField grad = h0_gradient_transport(cache);
    Rng rng = make_rng(derive_seed(cfg.seed, "riesz", u(c)));
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
      const CurveField x =
          random_curve_field(g.dim(), 3, 0.3, true, derive_seed(cfg.seed, "riesz_x", u(c * pairs + p)));
      const Matrix phi = random_matrix(rng, field.rank());
      const Matrix dxu = fd_first(field, g, x, kEps, cfg.transport.step);
      const double lhs = grad.pair(x, phi);
      const double rhs = fiber_metric(dxu, phi);
      // Relative to the Cauchy-Schwarz scale |d_X U| |Phi|.
      worst = std::max(worst, std::abs(lhs - rhs) / (dxu.norm() * phi.norm()));
    }
    err[u(c)] = worst;
  });
  rep.add("riesz_pairing", max_of(err), cfg.tolerances.gradient,
          {{"pairs_per_curve", pairs}, {"eps", kEps}, {"per_curve", err}}, since(t0));
  return rep;
}

// ----------------------------------------------------------------- levy ----

VerificationReport check_kernels(const GaugeField& field, const std::vector<Curve>& curves,
                                 const ExperimentConfig& cfg, int pairs) {
  VerificationReport rep("kernels");
  const auto t0 = Clock::now();
  const double eps = cfg.levy.fd_eps;
  const double h = cfg.transport.step;
  const int nc = static_cast<int>(curves.size());
  const int used = std::min(nc, pairs);

  std::vector<KernelTriple> kernels;
  kernels.reserve(u(used));
  for (int c = 0; c < used; ++c) kernels.push_back(second_kernels(field, curves[u(c)], cfg.transport));

  std::vector<double> err(u(pairs));
  parallel_for(pairs, cfg.threads, [&](int i) {
    const int c = i % used;
    const Curve& g = curves[u(c)];
    const CurveField x = random_curve_field(g.dim(), 3, 0.3, true,
                                            derive_seed(cfg.seed, "kernel_x", u(i)));
    const CurveField y = random_curve_field(g.dim(), 3, 0.3, true,
                                            derive_seed(cfg.seed, "kernel_y", u(i)));
    const auto at = [&](double a, double b) {
      return transport_matrix(field, perturb(g, combine(x, a, y, b), eps), h);
    };
    const Matrix fd = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * eps * eps);
    err[u(i)] = relative_error(kernels[u(c)].bilinear(x, y), fd);
  });
  const double t_form = since(t0);

  json norms = json::array();
  std::vector<double> levy_asym, singular_sym;
  for (int c = 0; c < used; ++c) {
    const KernelTriple& k = kernels[u(c)];
    levy_asym.push_back(k.levy_asymmetry());
    singular_sym.push_back(k.singular_symmetry());
    norms.push_back({{"curve", c},
                     {"volterra", k.volterra_norm()},
                     {"levy", k.levy_norm()},
                     {"singular", k.singular_norm()}});
  }
  rep.add("bilinear_form", max_of(err), cfg.tolerances.kernel_form,
          {{"pairs", pairs}, {"eps", eps}, {"errors", err}, {"norms", norms}}, t_form);
  rep.add("levy_kernel_symmetry", max_of(levy_asym), cfg.tolerances.kernel_symmetry);
  rep.add("singular_kernel_antisymmetry", max_of(singular_sym), cfg.tolerances.kernel_symmetry);
  return rep;
}

LaplacianIdentity verify_laplacian_identity(const GaugeField& field,
                                            const std::vector<Curve>& curves,
                                            const ExperimentConfig& cfg) {
  LaplacianIdentity out{VerificationReport("laplacian"), {}, {}};
  const int nc = static_cast<int>(curves.size());
  const std::vector<int>& ns = cfg.levy.cesaro_n;
  if (ns.empty()) throw ConfigError("config: levy.cesaro_n is empty");

  struct PerCurve {
    Matrix closed, kernel, bias, last;
    std::vector<double> abs_err, rel_err;
    double seconds_routes = 0.0, seconds_cesaro = 0.0;
  };
  std::vector<PerCurve> res(u(nc));
  parallel_for(nc, cfg.threads, [&](int c) {
    PerCurve& r = res[u(c)];
    auto t0 = Clock::now();
    const TransportCache cache(field, curves[u(c)], cfg.transport);
    r.closed = levy_laplacian_closed_form(cache);
    const KernelTriple kernels = second_kernels(cache);
    r.kernel = levy_divergence(kernels);
    r.bias = cesaro_bias_coefficient(cache, kernels, r.closed);
    r.seconds_routes = since(t0);
    t0 = Clock::now();
    const auto sweep = cesaro_levy_sweep(field, curves[u(c)], ns,
                                         {cfg.levy.fd_eps, cfg.transport.step});
    for (const auto& est : sweep) {
      r.abs_err.push_back((est - r.closed).norm());
      r.rel_err.push_back(relative_error(est, r.closed));
    }
    r.last = sweep.back();
    r.seconds_cesaro = since(t0);
  });

  std::vector<double> routes, cesaro, slope_dev, coefficient;
  json details = json::array();
  double t_routes = 0.0, t_cesaro = 0.0;
  for (int c = 0; c < nc; ++c) {
    const PerCurve& r = res[u(c)];
    routes.push_back(relative_error(r.kernel, r.closed));
    cesaro.push_back(r.rel_err.back());
    const double rate = decay_rate(ns, r.abs_err);
    slope_dev.push_back(std::abs(rate - 1.0));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      out.sweep.push_back({c, ns[i], r.abs_err[i], r.rel_err[i]});
    }
    coefficient.push_back(relative_error(ns.back() * (r.last - r.closed), r.bias));
    out.laplacian.push_back(r.closed);
    details.push_back({{"curve", c},
                       {"closed_form", matrix_json(r.closed)},
                       {"kernel_route", matrix_json(r.kernel)},
                       {"cesaro_rel_err", r.rel_err},
                       {"decay_rate", rate},
                       {"predicted_bias_coefficient_norm", r.bias.norm()}});
    t_routes += r.seconds_routes;
    t_cesaro += r.seconds_cesaro;
  }
  VerificationReport& rep = out.report;
  rep.add("kernel_vs_closed_form", max_of(routes), cfg.tolerances.laplacian_routes, details,
          t_routes);
  rep.add("cesaro_at_n" + std::to_string(ns.back()), max_of(cesaro), cfg.tolerances.cesaro,
          {{"per_curve", cesaro}, {"eps", cfg.levy.fd_eps}}, t_cesaro);
  rep.add("cesaro_rate", max_of(slope_dev), cfg.tolerances.cesaro_slope,
          {{"deviation_from_1", slope_dev}, {"ns", ns}});
  rep.add("cesaro_leading_coefficient", max_of(coefficient), cfg.tolerances.cesaro_coefficient,
          {{"per_curve", coefficient}, {"n", ns.back()}});
  return out;
}

VerificationReport verify_functional_heat(const ScalarField& f0, const std::vector<Curve>& curves,
                                          const std::vector<double>& times, double tolerance) {
  VerificationReport rep("functional-heat");
  const auto t0 = Clock::now();
  constexpr double kDelta = 2e-4;
  std::vector<double> err;
  json details = json::array();
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (const double s : times) {
      const auto value = [&](double sigma) {
        return functional_value(f0.heat_evolved(sigma), curves[c]);
      };
      const double ds_l = (-value(s + 2 * kDelta) + 8 * value(s + kDelta) -
                           8 * value(s - kDelta) + value(s - 2 * kDelta)) /
                          (12 * kDelta);
      const double lap = levy_laplacian_functional(f0.heat_evolved(s), curves[c]);
      err.push_back(std::abs(ds_l - lap));
      details.push_back({{"curve", c}, {"s", s}, {"ds_L", ds_l}, {"levy_L", lap}});
    }
  }
  rep.add("functional_heat", max_of(err), tolerance, details, since(t0));
  return rep;
}

VerificationReport check_functionals(const std::vector<Curve>& curves,
                                     const ExperimentConfig& cfg) {
  VerificationReport rep("functionals");
  const Torus torus = make_torus(cfg);
  const ScalarField f = random_scalar_field(torus, 4, 1.0, 2, derive_seed(cfg.seed, "scalar"));
  const int nc = static_cast<int>(curves.size());
  constexpr double kEps = 1e-4;

  auto t0 = Clock::now();
  std::vector<double> grad_err(u(nc));
  parallel_for(nc, cfg.threads, [&](int c) {
    const Curve& g = curves[u(c)];
    const GradientField grad = h0_gradient_functional(f, g);
    const CurveField x = random_curve_field(g.dim(), 3, 0.3, false,
                                            derive_seed(cfg.seed, "functional_x", u(c)));
    const double formula = grad.apply(x)(0, 0).real();
    const double fd = (functional_value(f, perturb(g, x, kEps)) -
                       functional_value(f, perturb(g, x, -kEps))) /
                      (2 * kEps);
    // Relative to the Cauchy-Schwarz scale |grad f|_H0 |X|_H0.
    const CurveField gf(g.dim(), [&f, g](double t) { return f.gradient(g.position(t)); });
    const double scale = std::sqrt(h0_inner(gf, gf, g) * h0_inner(x, x, g));
    grad_err[u(c)] = std::abs(formula - fd) / scale;
  });
  rep.add("gradient_vs_fd", max_of(grad_err), cfg.tolerances.functional,
          {{"eps", kEps}, {"per_curve", grad_err}}, since(t0));

  // Closed form of Delta f along the curve by adaptive Gauss-Kronrod,
  // independent of the panel grid. Errors are relative to int |Delta f(gamma)|.
  t0 = Clock::now();
  std::vector<double> lap_err(u(nc)), cesaro_err(u(nc));
  std::vector<double> t_lap(u(nc)), t_ces(u(nc));
  parallel_for(nc, cfg.threads, [&](int c) {
    const Curve& g = curves[u(c)];
    auto tc = Clock::now();
    const auto lap_at = [&](double t) {
      double acc = 0.0;
      for (const auto& m : f.modes()) {
        const double kappa = torus.wavenumber(m.k);
        double arg = 0.0;
        const Point x = g.position(t);
        for (int a = 0; a < torus.dim(); ++a) {
          arg += 2 * M_PI * m.k[u(a)] * x[u(a)] / torus.length();
        }
        acc += -kappa * kappa * m.coeff * (m.phase == Phase::Cos ? std::cos(arg) : std::sin(arg));
      }
      return acc;
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double exact = GK::integrate(lap_at, 0.0, 1.0, 15, 1e-13);
    const double scale = GK::integrate([&](double t) { return std::abs(lap_at(t)); }, 0.0, 1.0,
                                       15, 1e-10);
    const double lap = levy_laplacian_functional(f, g);
    lap_err[u(c)] = std::abs(lap - exact) / scale;
    t_lap[u(c)] = since(tc);
    tc = Clock::now();
    const double est = cesaro_functional_estimate(f, g, cfg.levy.cesaro_n.back(), cfg.levy.fd_eps);
    cesaro_err[u(c)] = std::abs(est - lap) / scale;
    t_ces[u(c)] = since(tc);
  });
  rep.add("laplacian_closed_form", max_of(lap_err), cfg.tolerances.functional,
          {{"per_curve", lap_err}}, std::accumulate(t_lap.begin(), t_lap.end(), 0.0));
  rep.add("laplacian_cesaro", max_of(cesaro_err), cfg.tolerances.functional_cesaro,
          {{"n", cfg.levy.cesaro_n.back()}, {"per_curve", cesaro_err}},
          std::accumulate(t_ces.begin(), t_ces.end(), 0.0));

  std::vector<double> times{0.0};
  for (const double s : cfg.flow.checkpoints) times.push_back(s);
  rep.merge(verify_functional_heat(f, curves, times, cfg.tolerances.functional_heat));
  return rep;
}

// ------------------------------------------------------------ heat flow ----

FlowRun run_configured_flow(const ExperimentConfig& cfg,
                            std::function<void(const FlowState&)> on_save) {
  const auto t0 = Clock::now();
  const std::vector<int> ks = checkpoint_steps(cfg);
  const int w = cfg.flow.fd_spacing;
  FlowOptions opts;
  opts.total = cfg.flow.total;
  opts.ds = cfg.flow.ds;
  opts.save_every = cfg.flow.save_every;
  opts.on_save = std::move(on_save);
  opts.keep = [ks, w](int k, double) {
    return std::any_of(ks.begin(), ks.end(), [&](int c) {
      return k == c || k == c - w || k == c + w || k == c - 2 * w || k == c + 2 * w;
    });
  };
  auto traj = std::make_shared<const FlowTrajectory>(flow(make_flow_initial(cfg), opts));
  return {std::move(traj), since(t0)};
}

VerificationReport check_heat_flow(const ExperimentConfig& cfg, const FlowRun& run) {
  VerificationReport rep("heatflow");
  const Torus torus = make_torus(cfg);
  const Tolerances& tol = cfg.tolerances;

  // Action monotonicity along the configured su(2) flow.
  {
    const auto& log = run.trajectory->log();
    double worst = 0.0;
    for (std::size_t i = 1; i < log.size(); ++i) {
      worst = std::max(worst, (log[i].action - log[i - 1].action) / (1.0 + log[i - 1].action));
    }
    rep.add("action_monotone", worst, tol.flow_action,
            {{"steps", log.size() - 1},
             {"ds", run.trajectory->ds()},
             {"initial_action", log.front().action},
             {"final_action", log.back().action},
             {"initial_rhs_norm", log.front().rhs_norm},
             {"final_rhs_norm", log.back().rhs_norm}},
            run.seconds);
  }

  // Abelian multi-mode field against the closed form at every kept state.
  {
    const auto t0 = Clock::now();
    const AnalyticField a0 = abelian_test_field(torus, cfg.rank);
    const LatticeField lat0 = sample_lattice(a0, cfg.flow.abelian_grid);
    FlowOptions opts;
    opts.total = cfg.flow.abelian_total;
    opts.ds = std::min(cfg.flow.ds, 0.95 * cfl_limit(lat0));
    opts.save_every = 40;
    const FlowTrajectory traj = flow(lat0, opts);
    const double scale = lattice_sup(lat0);
    double worst = 0.0;
    json per_state = json::array();
    for (const auto& st : traj.states()) {
      const LatticeField exact = sample_lattice(abelian_oracle(a0, st.s), cfg.flow.abelian_grid);
      const double e = lattice_distance(st.field.lattice(), exact) / scale;
      worst = std::max(worst, e);
      per_state.push_back({{"s", st.s}, {"error", e}});
    }
    rep.add("abelian_oracle", worst, tol.flow_oracle,
            {{"grid", cfg.flow.abelian_grid}, {"ds", traj.ds()}, {"states", per_state}},
            since(t0));
  }

  // Critical points: zero, a constant commuting field and a pure gauge.
  {
    const auto t0 = Clock::now();
    const int m = std::min(cfg.flow.grid, 32);
    const auto drift = [&](const GaugeField& f, double total = 0.0) {
      FlowOptions opts;
      opts.ds = std::min(cfg.flow.ds, 0.95 * cfl_limit(f.lattice()));
      opts.total = total > 0.0 ? total : 20 * opts.ds;
      const FlowTrajectory traj = flow(f, opts);
      const double scale = std::max(1.0, lattice_sup(f.lattice()));
      return lattice_distance(traj.states().back().field.lattice(), f.lattice()) / scale;
    };
    const LieElem g = diagonal_generator(cfg.rank, 0.4);
    std::vector<FourierMode> constant;
    for (int mu = 0; mu < torus.dim(); ++mu) {
      constant.push_back({{0, 0, 0}, mu, Phase::Cos, (mu + 1.0) * g});
    }
    const GaugeField flat = sample_lattice(AnalyticField(torus, cfg.rank, constant), m);
    const GaugeFunction psi = compose(
        phase_gauge(torus, su2(0.0, 1.0, 0.0), {{{1, 0, 0}, 0.5, 0.1}, {{1, 1, 0}, 0.3, 0.7}}),
        phase_gauge(torus, su2(1.0, 0.0, 0.0), {{{0, 1, 0}, 0.4, 0.2}, {{1, -1, 0}, 0.2, 0.3}}));
    const double e_zero = drift(LatticeField::zero(torus, cfg.rank, m));
    const double e_flat = drift(flat);
    rep.add("critical_stationary", std::max(e_zero, e_flat), tol.critical,
            {{"zero", e_zero}, {"constant_commuting", e_flat}, {"steps", 20}}, since(t0));

    // A lattice pure gauge is critical up to the stencil error: its drift
    // over a fixed flow time falls by 2^4 per grid doubling.
    const auto t1 = Clock::now();
    const AnalyticField vacuum = AnalyticField::zero(torus, cfg.rank);
    const double e_coarse = drift(gauge_transform(vacuum, psi, 32), 0.01);
    const double e_fine = drift(gauge_transform(vacuum, psi, 64), 0.01);
    rep.add("pure_gauge_drift_order", std::abs(e_coarse / e_fine / 16 - 1), tol.order_factor,
            {{"drift", {e_coarse, e_fine}}, {"grids", {32, 64}}, {"s", 0.01}}, since(t1));
  }

  // RK4 order: single transverse mode against the semi-discrete solution.
  {
    const auto t0 = Clock::now();
    constexpr int kGrid = 16;
    constexpr int kWave = 3;
    const std::vector<FourierMode> mode{
        {{kWave, 0, 0}, 1, Phase::Cos, diagonal_generator(cfg.rank, 0.3)}};
    const AnalyticField a0(torus, cfg.rank, mode);
    const LatticeField lat0 = sample_lattice(a0, kGrid);
    const double a = lat0.spacing();
    const double theta = 2 * M_PI * kWave / kGrid;
    const double dhat = (8 * std::sin(theta) - std::sin(2 * theta)) / (6 * a);
    const double total = 0.2;
    const double ds0 = 0.8 * cfl_limit(lat0);
    std::vector<double> errs;
    for (const double ds : {ds0, ds0 / 2, ds0 / 4}) {
      FlowOptions opts;
      opts.total = total;
      opts.ds = ds;
      const FlowTrajectory traj = flow(lat0, opts);
      const double decay = std::exp(-dhat * dhat * total);
      const std::vector<FourierMode> scaled{
          {{kWave, 0, 0}, 1, Phase::Cos, diagonal_generator(cfg.rank, 0.3 * decay)}};
      const LatticeField exact = sample_lattice(AnalyticField(torus, cfg.rank, scaled), kGrid);
      errs.push_back(lattice_distance(traj.states().back().field.lattice(), exact));
    }
    const double f1 = errs[0] / errs[1];
    const double f2 = errs[1] / errs[2];
    const double dev = std::max(std::abs(f1 / 16 - 1), std::abs(f2 / 16 - 1));
    rep.add("rk4_order", dev, tol.order_factor,
            {{"errors", errs}, {"factors", {f1, f2}}, {"grid", kGrid}, {"k", kWave}}, since(t0));
  }

  // Stencil order: one transverse mode on m = 16, 32, 64 against the continuum.
  {
    const auto t0 = Clock::now();
    const std::vector<FourierMode> mode{
        {{1, 0, 0}, 1, Phase::Cos, diagonal_generator(cfg.rank, 0.3)}};
    const AnalyticField a0(torus, cfg.rank, mode);
    const double total = 0.1;
    std::vector<double> errs;
    const std::vector<int> grids{16, 32, 64};
    const double ds = 0.5 * cfl_limit(sample_lattice(a0, grids.back()));
    for (const int m : grids) {
      FlowOptions opts;
      opts.total = total;
      opts.ds = ds;
      const FlowTrajectory traj = flow(sample_lattice(a0, m), opts);
      const LatticeField exact = sample_lattice(abelian_oracle(a0, total), m);
      errs.push_back(lattice_distance(traj.states().back().field.lattice(), exact));
    }
    const double f1 = errs[0] / errs[1];
    const double f2 = errs[1] / errs[2];
    const double dev = std::max(std::abs(f1 / 16 - 1), std::abs(f2 / 16 - 1));
    rep.add("stencil_order", dev, tol.order_factor,
            {{"errors", errs}, {"factors", {f1, f2}}, {"grids", grids}}, since(t0));
  }
  return rep;
}

// -------------------------------------------------------------- theorem ----

VerificationReport verify_main_theorem(const ExperimentConfig& cfg, const FlowRun& run,
                                       const std::vector<Curve>& curves) {
  VerificationReport rep("verify-theorem");
  rep.note("A finite curve set can falsify the transport heat equation but does not prove it.");
  const Torus torus = make_torus(cfg);
  const Tolerances& tol = cfg.tolerances;
  const TransportOptions& topt = cfg.transport;
  const FlowTrajectory& traj = *run.trajectory;
  const std::vector<int> ks = checkpoint_steps(cfg);
  const int w = cfg.flow.fd_spacing;
  const int nc = static_cast<int>(curves.size());
  const int nk = static_cast<int>(ks.size());

  // su(2) lattice flow.
  {
    const auto t0 = Clock::now();
    const TrajectoryFlow tflow(run.trajectory);
    const double delta = w * traj.ds();
    std::vector<double> e_formula(u(nc * nk)), e_fd(u(nc * nk)), e_fd_wide(u(nc * nk));
    parallel_for(nc * nk, cfg.threads, [&](int task) {
      const int ck = task / nc;
      const Curve& g = curves[u(task % nc)];
      const int k = ks[u(ck)];
      const FlowState& st = state_at_step(traj, k);
      const auto u_at = [&](int step) {
        return transport_matrix(state_at_step(traj, step).field, g, topt.step);
      };
      const Matrix lap = levy_laplacian_transport(st.field, g, topt);
      const Matrix formula = transport_s_derivative(tflow, g, st.s, topt);
      const Matrix fd = (u_at(k + w) - u_at(k - w)) / (2 * delta);
      const Matrix fd_wide = (u_at(k + 2 * w) - u_at(k - 2 * w)) / (4 * delta);
      e_formula[u(task)] = relative_error(formula, lap);
      e_fd[u(task)] = relative_error(fd, lap);
      e_fd_wide[u(task)] = relative_error(fd_wide, lap);
    });
    json per = json::array();
    for (int task = 0; task < nc * nk; ++task) {
      per.push_back({{"s", ks[u(task / nc)] * traj.ds()},
                     {"curve", task % nc},
                     {"formula_vs_laplacian", e_formula[u(task)]},
                     {"fd_vs_laplacian", e_fd[u(task)]},
                     {"fd_double_spacing_vs_laplacian", e_fd_wide[u(task)]}});
    }
    const double secs = since(t0);
    rep.add("su2_formula_vs_laplacian", max_of(e_formula), tol.theorem_formula, per, secs / 2);
    rep.add("su2_fd_vs_laplacian", max_of(e_fd), tol.theorem_fd, {{"fd_spacing", delta}},
            secs / 2);
    // The snapshot difference converges as its spacing shrinks; the
    // single-snapshot formula has no spacing at all.
    rep.require_at_least("su2_fd_error_shrinks_with_spacing", max_of(e_fd_wide) / max_of(e_fd),
                         1.0,
                         {{"max_error_spacing", max_of(e_fd)},
                          {"max_error_double_spacing", max_of(e_fd_wide)}});
  }

  // Closed-form abelian flow.
  {
    const auto t0 = Clock::now();
    Rng rng = make_rng(derive_seed(cfg.seed, "theorem_abelian"));
    std::vector<FourierMode> modes;
    for (int j = 0; j < 4; ++j) {
      FourierMode m;
      do {
        for (int a = 0; a < torus.dim(); ++a) {
          m.k[u(a)] = static_cast<int>(std::floor(uniform(rng, -2.0, 3.0)));
        }
      } while (std::all_of(m.k.begin(), m.k.end(), [](int c) { return c == 0; }));
      m.mu = static_cast<int>(std::floor(uniform(rng, 0.0, torus.dim())));
      m.phase = uniform(rng, 0.0, 1.0) < 0.5 ? Phase::Cos : Phase::Sin;
      m.coeff = diagonal_generator(cfg.rank, uniform(rng, -0.3, 0.3));
      modes.push_back(m);
    }
    const AbelianHeatFlow aflow(AnalyticField(torus, cfg.rank, modes));
    constexpr double kDelta = 1e-4;
    std::vector<double> e_fd(u(nc * nk)), e_formula(u(nc * nk));
    parallel_for(nc * nk, cfg.threads, [&](int task) {
      const double s = cfg.flow.checkpoints[u(task / nc)];
      const Curve& g = curves[u(task % nc)];
      const Matrix lap = levy_laplacian_transport(aflow.field(s), g, topt);
      const Matrix fd = (transport_matrix(aflow.field(s + kDelta), g, topt.step) -
                         transport_matrix(aflow.field(s - kDelta), g, topt.step)) /
                        (2 * kDelta);
      e_fd[u(task)] = relative_error(fd, lap);
      e_formula[u(task)] = relative_error(transport_s_derivative(aflow, g, s, topt), lap);
    });
    rep.add("abelian_fd_vs_laplacian", max_of(e_fd), tol.theorem_abelian,
            {{"delta", kDelta}, {"formula_vs_laplacian", max_of(e_formula)}}, since(t0));
  }

  // s-independent critical fields: both sides vanish.
  {
    const auto t0 = Clock::now();
    std::vector<FourierMode> constant;
    for (int mu = 0; mu < torus.dim(); ++mu) {
      constant.push_back({{0, 0, 0}, mu, Phase::Cos, diagonal_generator(cfg.rank, 0.5 + mu)});
    }
    const GaugeField flat = AnalyticField(torus, cfg.rank, constant);
    const PrescribedFlow still([flat](double) { return flat; },
                               [&cfg](double, const Point&, const Vector&) {
                                 return zero_matrix(cfg.rank);
                               });
    std::vector<double> sizes(u(nc));
    parallel_for(nc, cfg.threads, [&](int c) {
      const Matrix lap = levy_laplacian_transport(flat, curves[u(c)], topt);
      const Matrix ds_u = transport_s_derivative(still, curves[u(c)], 0.0, topt);
      sizes[u(c)] = std::max(lap.norm(), ds_u.norm());
    });
    rep.add("critical_field_both_sides_zero", max_of(sizes), tol.critical, {{"per_curve", sizes}},
            since(t0));
  }
  return rep;
}

std::vector<double> r_grid(double step) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) / n);
  return out;
}

std::vector<RSample> r_diagnostic(const ConnectionFlow& flow, const Curve& gamma, double s,
                                  const std::vector<double>& r_values, SDerivative ds_u,
                                  TransportOptions options, int threads) {
  if (!ds_u) {
    ds_u = [&](const Curve& c) { return transport_s_derivative(flow, c, s, options); };
  }
  const GaugeField field = flow.field(s);
  const TransportCache cache(field, gamma, options);
  const int n = cache.size();
  std::vector<FiberMap> integrand(u(n));
  for (int i = 0; i < n; ++i) {
    const Point& x = cache.position(i);
    const Vector& v = cache.velocity(i);
    integrand[u(i)] = -cache.sandwich(i, flow.velocity(s, x, v) - contract_div(field, x, v));
  }
  const Matrix zero = zero_matrix(cache.rank());

  std::vector<RSample> out(r_values.size());
  parallel_for(static_cast<int>(r_values.size()), threads, [&](int j) {
    const double r = r_values[u(j)];
    RSample& row = out[u(j)];
    row.r = r;
    row.integral = cache.grid().integral_to(integrand, r, zero);
    const Curve gr = plateau(gamma, r);
    const Matrix u_r0 = transport(TransportRequest{field, gamma, 0.0, r, options.step}).matrix();
    const Matrix u_1r = cache.total() * u_r0.adjoint();
    row.definition = u_1r * (ds_u(gr) - levy_laplacian_transport(field, gr, options));
  });
  return out;
}

RDiagnostic run_r_diagnostic(const ExperimentConfig& cfg, const FlowRun& run,
                             const Curve& gamma) {
  RDiagnostic out{VerificationReport("r-diagnostic"), {}};
  VerificationReport& rep = out.report;
  const Torus torus = make_torus(cfg);
  const TransportOptions& topt = cfg.transport;
  const FlowTrajectory& traj = *run.trajectory;
  const std::vector<int> ks = checkpoint_steps(cfg);
  const int k = ks[ks.size() / 2];
  const int w = cfg.flow.fd_spacing;
  const double s = k * traj.ds();
  const double delta = w * traj.ds();
  const std::vector<double> grid = r_grid();
  const double dr = grid[1] - grid[0];
  auto base = std::make_shared<const TrajectoryFlow>(run.trajectory);

  // The flow itself, with d_s U(gamma^r) by central differences in s.
  {
    const auto t0 = Clock::now();
    const GaugeField& up = state_at_step(traj, k + w).field;
    const GaugeField& down = state_at_step(traj, k - w).field;
    const SDerivative fd = [&](const Curve& c) -> FiberMap {
      return (transport_matrix(up, c, topt.step) - transport_matrix(down, c, topt.step)) /
             (2 * delta);
    };
    auto rows = r_diagnostic(*base, gamma, s, grid, fd, topt, cfg.threads);
    double worst_int = 0.0, worst_def = 0.0;
    for (const auto& row : rows) {
      worst_int = std::max(worst_int, row.integral.norm());
      worst_def = std::max(worst_def, row.definition.norm());
    }
    const double secs = since(t0);
    rep.add("exact_flow_integral", worst_int, cfg.tolerances.r_exact, {{"s", s}}, secs / 2);
    rep.add("exact_flow_definition", worst_def, cfg.tolerances.r_exact,
            {{"s", s}, {"fd_spacing", delta}}, secs / 2);
    out.tables.emplace_back("exact", std::move(rows));
  }

  // The same flow with a bump violation centred at gamma(1/2).
  {
    const auto t0 = Clock::now();
    constexpr double kLo = 0.4, kHi = 0.6;
    const Point centre = torus.wrap(gamma.position(0.5));
    // Largest radius whose bump meets gamma only for t in (0.4, 0.6).
    double radius = 0.5;
    constexpr int kSamples = 4000;
    for (int i = 0; i <= kSamples; ++i) {
      const double t = static_cast<double>(i) / kSamples;
      if (t > kLo && t < kHi) continue;
      const Point x = gamma.position(t);
      double d2 = 0.0;
      for (int a = 0; a < torus.dim(); ++a) {
        double dx = std::remainder(x[u(a)] - centre[u(a)], torus.length());
        d2 += dx * dx;
      }
      radius = std::min(radius, 0.9 * std::sqrt(d2));
    }
    Vector dir = gamma.velocity(0.5);
    double speed = 0.0;
    for (int a = 0; a < torus.dim(); ++a) speed += dir[u(a)] * dir[u(a)];
    speed = std::sqrt(speed);
    for (double& c : dir) c /= speed;
    const PerturbedFlow bumped(base, torus, centre, radius, dir, su2(0.0, 0.0, 0.5));

    auto rows = r_diagnostic(bumped, gamma, s, grid, {}, topt, cfg.threads);
    double outside = 0.0, inside = 0.0, mismatch = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double lo = rows[i].r;
      const double hi = rows[i + 1].r;
      const double slope_def = (rows[i + 1].definition - rows[i].definition).norm() / dr;
      const double slope_int = (rows[i + 1].integral - rows[i].integral).norm() / dr;
      if (hi <= kLo || lo >= kHi) {
        outside = std::max({outside, slope_def, slope_int});
      } else {
        inside = std::max(inside, slope_def);
      }
    }
    for (const auto& row : rows) {
      mismatch = std::max(mismatch, (row.integral - row.definition).norm());
    }
    const double secs = since(t0);
    const json where = {{"window", {kLo, kHi}}, {"radius", radius}, {"s", s}};
    rep.add("perturbed_routes_agree", mismatch, cfg.tolerances.r_exact, where, secs / 3);
    rep.add("perturbed_flat_outside_window", outside, cfg.tolerances.r_localization, where,
            secs / 3);
    rep.require_at_least("perturbed_moves_inside_window", inside,
                         100 * cfg.tolerances.r_localization, where, secs / 3);
    out.tables.emplace_back("perturbed", std::move(rows));
  }
  return out;
}

}  // namespace levyflow
