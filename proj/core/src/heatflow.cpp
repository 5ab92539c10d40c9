#include "levyflow/heatflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "lattice_ops.hpp"
#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

std::size_t u(int i) { return static_cast<std::size_t>(i); }

std::vector<Matrix> rhs_matrices(const Torus& torus, int rank, int m,
                                 const std::vector<Matrix>& values) {
  std::vector<LieElem> lie;
  lie.reserve(values.size());
  for (const auto& v : values) lie.push_back(LieElem::unchecked(v));
  const LatticeField f(torus, rank, m, std::move(lie));
  detail::LatticeDerivatives ld = detail::lattice_derivatives(f);
  return std::move(ld.div);
}

}  // namespace

FlowState make_state(const GaugeField& field, double s) {
  if (!field.is_lattice()) throw DomainError("flow state: lattice field required");
  return {s, field, ym_action(field)};
}

std::vector<LieElem> ym_rhs(const LatticeField& field) {
  const detail::LatticeDerivatives ld = detail::lattice_derivatives(field);
  std::vector<LieElem> out;
  out.reserve(ld.div.size());
  for (const auto& m : ld.div) out.push_back(project_lie(m));
  return out;
}

double rhs_norm(const LatticeField& field, const std::vector<LieElem>& rhs) {
  double acc = 0.0;
  for (const auto& r : rhs) acc += fiber_metric(r.matrix(), r.matrix());
  return std::sqrt(acc * std::pow(field.spacing(), field.torus().dim()));
}

double cfl_limit(const LatticeField& field) {
  const double a = field.spacing();
  return a * a / (2.0 * field.torus().dim() * 4.0);
}

FlowState step(const FlowState& state, double ds) {
  const LatticeField& lat = state.field.lattice();
  if (!(ds > 0.0)) throw DomainError("step: ds must be positive");
  if (ds > cfl_limit(lat) * (1.0 + 1e-12)) {
    throw NumericalAbort("step: ds = " + std::to_string(ds) + " exceeds the CFL bound " +
                         std::to_string(cfl_limit(lat)));
  }
  const Torus& torus = lat.torus();
  const int rank = lat.rank();
  const int m = lat.resolution();
  const std::size_t n = lat.values().size();

  std::vector<Matrix> y0(n);
  for (std::size_t i = 0; i < n; ++i) y0[i] = lat.values()[i].matrix();
  auto shifted = [&](const std::vector<Matrix>& k, double c) {
    std::vector<Matrix> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = y0[i] + c * k[i];
    return y;
  };
  const std::vector<Matrix> k1 = rhs_matrices(torus, rank, m, y0);
  const std::vector<Matrix> k2 = rhs_matrices(torus, rank, m, shifted(k1, 0.5 * ds));
  const std::vector<Matrix> k3 = rhs_matrices(torus, rank, m, shifted(k2, 0.5 * ds));
  const std::vector<Matrix> k4 = rhs_matrices(torus, rank, m, shifted(k3, ds));

  std::vector<LieElem> next;
  next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    next.push_back(
        project_lie(y0[i] + (ds / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])));
  }
  return make_state(GaugeField(LatticeField(torus, rank, m, std::move(next))), state.s + ds);
}

FlowTrajectory::FlowTrajectory(double ds, std::vector<FlowState> states,
                               std::vector<FlowLogEntry> log)
    : ds_(ds), states_(std::move(states)), log_(std::move(log)) {
  for (std::size_t i = 1; i < states_.size(); ++i) {
    if (!(states_[i].s > states_[i - 1].s)) {
      throw DomainError("FlowTrajectory: states must have increasing s");
    }
  }
}

const FlowState* FlowTrajectory::find(double s) const {
  const double tol = 1e-9 * ds_;
  auto it = std::lower_bound(states_.begin(), states_.end(), s - tol,
                             [](const FlowState& st, double v) { return st.s < v; });
  if (it == states_.end() || std::abs(it->s - s) > tol) return nullptr;
  return &*it;
}

bool FlowTrajectory::has(double s) const { return find(s) != nullptr; }

const FlowState& FlowTrajectory::at(double s) const {
  const FlowState* st = find(s);
  if (st == nullptr) {
    throw DomainError("FlowTrajectory: no state kept at s = " + std::to_string(s));
  }
  return *st;
}

FlowTrajectory flow(const GaugeField& initial, const FlowOptions& options) {
  if (!(options.total >= 0.0) || !(options.ds > 0.0)) {
    throw DomainError("flow: need total >= 0 and ds > 0");
  }
  if (options.save_every < 1) throw DomainError("flow: save_every must be >= 1");
  const int steps =
      options.total == 0.0 ? 0
                           : std::max(1, static_cast<int>(std::ceil(options.total / options.ds -
                                                                   1e-9)));
  const double ds = steps == 0 ? options.ds : options.total / steps;

  std::vector<FlowState> kept;
  std::vector<FlowLogEntry> log;
  FlowState state = make_state(initial, 0.0);
  auto offer = [&](int k) {
    const bool cadence = k % options.save_every == 0 || k == steps;
    if (cadence && options.on_save) options.on_save(state);
    if (options.keep ? options.keep(k, state.s) : cadence) kept.push_back(state);
  };
  auto record = [&]() {
    const LatticeField& lat = state.field.lattice();
    log.push_back({state.s, state.action, rhs_norm(lat, ym_rhs(lat))});
  };
  record();
  offer(0);
  for (int k = 1; k <= steps; ++k) {
    FlowState next = step(state, ds);
    next.s = k * ds;
    if (next.action > state.action * (1.0 + options.blowup_tolerance) + 1e-14) {
      throw NumericalAbort("flow: action grew from " + std::to_string(state.action) + " to " +
                           std::to_string(next.action) + " at s = " + std::to_string(next.s));
    }
    state = std::move(next);
    record();
    offer(k);
  }
  return {ds, std::move(kept), std::move(log)};
}

// --------------------------------------------------------- abelian flow ----

namespace {

struct ModeKey {
  WaveVector k;
  Phase phase;
  bool operator<(const ModeKey& o) const {
    return std::tie(k, phase) < std::tie(o.k, o.phase);
  }
};

// k and -k describe the same mode; pick the sign whose first nonzero entry is
// positive. sin flips sign with k.
WaveVector canonical(const WaveVector& k, Phase phase, double& sign) {
  sign = 1.0;
  for (const int c : k) {
    if (c == 0) continue;
    if (c < 0) {
      if (phase == Phase::Sin) sign = -1.0;
      return {-k[0], -k[1], -k[2]};
    }
    break;
  }
  return k;
}

void require_commuting(const AnalyticField& f) {
  const auto& modes = f.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      const Matrix& a = modes[i].coeff.matrix();
      const Matrix& b = modes[j].coeff.matrix();
      if (max_abs(a * b - b * a) > 1e-12) {
        throw DomainError("abelian_oracle: mode coefficients do not commute");
      }
    }
  }
}

// Splits mode groups into (transverse, gradient) polarizations and returns
// the modes of c_T * coeff_T + c_L * coeff_L, with c_T from decay(lambda).
AnalyticField abelian_combine(const AnalyticField& f,
                              const std::function<double(double)>& transverse_factor,
                              double gradient_factor) {
  require_commuting(f);
  const Torus& torus = f.torus();
  const int d = torus.dim();
  const int rank = f.rank();
  std::map<ModeKey, std::array<Matrix, kMaxDim>> groups;
  for (const auto& mode : f.modes()) {
    double sign = 1.0;
    const WaveVector k = canonical(mode.k, mode.phase, sign);
    auto [it, fresh] = groups.try_emplace(ModeKey{k, mode.phase});
    if (fresh) {
      for (int mu = 0; mu < d; ++mu) it->second[u(mu)] = zero_matrix(rank);
    }
    it->second[u(mode.mu)] += sign * mode.coeff.matrix();
  }
  std::vector<FourierMode> out;
  for (const auto& [key, pol] : groups) {
    const double knorm2 = [&] {
      double s = 0.0;
      for (int mu = 0; mu < d; ++mu) s += double(key.k[u(mu)]) * key.k[u(mu)];
      return s;
    }();
    std::array<Matrix, kMaxDim> coeff;
    if (knorm2 == 0.0) {
      // Constant modes carry no curvature in the abelian case.
      for (int mu = 0; mu < d; ++mu) coeff[u(mu)] = gradient_factor * pol[u(mu)];
    } else {
      Matrix kdot = zero_matrix(rank);
      for (int mu = 0; mu < d; ++mu) kdot += double(key.k[u(mu)]) * pol[u(mu)];
      const double tf = transverse_factor(torus.wavenumber(key.k));
      for (int mu = 0; mu < d; ++mu) {
        const Matrix longitudinal = (key.k[u(mu)] / knorm2) * kdot;
        coeff[u(mu)] = tf * (pol[u(mu)] - longitudinal) + gradient_factor * longitudinal;
      }
    }
    for (int mu = 0; mu < d; ++mu) {
      if (max_abs(coeff[u(mu)]) == 0.0) continue;
      out.push_back({key.k, mu, key.phase, project_lie(coeff[u(mu)])});
    }
  }
  return {torus, rank, std::move(out)};
}

}  // namespace

AnalyticField abelian_oracle(const AnalyticField& initial, double s) {
  if (s < 0.0) throw DomainError("abelian_oracle: s must be >= 0");
  return abelian_combine(
      initial, [s](double kappa) { return std::exp(-kappa * kappa * s); }, 1.0);
}

AnalyticField abelian_oracle_velocity(const AnalyticField& initial, double s) {
  if (s < 0.0) throw DomainError("abelian_oracle: s must be >= 0");
  return abelian_combine(
      initial,
      [s](double kappa) { return -kappa * kappa * std::exp(-kappa * kappa * s); }, 0.0);
}

// ------------------------------------------------------------------ flows ----

TrajectoryFlow::TrajectoryFlow(std::shared_ptr<const FlowTrajectory> trajectory)
    : trajectory_(std::move(trajectory)) {
  if (!trajectory_) throw DomainError("TrajectoryFlow: null trajectory");
}

GaugeField TrajectoryFlow::field(double s) const { return trajectory_->at(s).field; }

const GaugeField& TrajectoryFlow::rhs_field(double s) const {
  const FlowState& st = trajectory_->at(s);
  const std::lock_guard<std::mutex> lock(mutex_);
  auto it = rhs_.find(st.s);
  if (it == rhs_.end()) {
    const LatticeField& lat = st.field.lattice();
    auto f = std::make_shared<const GaugeField>(
        LatticeField(lat.torus(), lat.rank(), lat.resolution(), ym_rhs(lat)));
    it = rhs_.emplace(st.s, std::move(f)).first;
  }
  return *it->second;
}

Matrix TrajectoryFlow::velocity(double s, const Point& x, const Vector& v) const {
  return rhs_field(s).contract(x, v);
}

AbelianHeatFlow::AbelianHeatFlow(AnalyticField initial) : initial_(std::move(initial)) {
  abelian_oracle(initial_, 0.0);
}

GaugeField AbelianHeatFlow::field(double s) const { return abelian_oracle(initial_, s); }

Matrix AbelianHeatFlow::velocity(double s, const Point& x, const Vector& v) const {
  return GaugeField(abelian_oracle_velocity(initial_, s)).contract(x, v);
}

PrescribedFlow::PrescribedFlow(FieldFn field, VelocityFn velocity)
    : field_(std::move(field)), velocity_(std::move(velocity)) {
  if (!field_) throw DomainError("PrescribedFlow: field function required");
}

Matrix PrescribedFlow::velocity(double s, const Point& x, const Vector& v) const {
  if (!velocity_) throw DomainError("PrescribedFlow: d_s A not available");
  return velocity_(s, x, v);
}

double bump(const Torus& torus, const Point& centre, double radius, const Point& x) {
  const double len = torus.length();
  double r2 = 0.0;
  for (int mu = 0; mu < torus.dim(); ++mu) {
    double dx = std::remainder(x[u(mu)] - centre[u(mu)], len);
    r2 += dx * dx;
  }
  const double rho2 = r2 / (radius * radius);
  if (rho2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - rho2));
}

PerturbedFlow::PerturbedFlow(std::shared_ptr<const ConnectionFlow> base, Torus torus,
                             Point centre, double radius, Vector direction, LieElem generator)
    : base_(std::move(base)),
      torus_(torus),
      centre_(centre),
      radius_(radius),
      direction_(direction),
      generator_(std::move(generator)) {
  if (!base_) throw DomainError("PerturbedFlow: null base flow");
  if (!(radius > 0.0)) throw DomainError("PerturbedFlow: radius must be positive");
}

Matrix PerturbedFlow::velocity(double s, const Point& x, const Vector& v) const {
  Matrix out = base_->velocity(s, x, v);
  const double b = bump(torus_, centre_, radius_, x);
  if (b == 0.0) return out;
  double wv = 0.0;
  for (int mu = 0; mu < torus_.dim(); ++mu) wv += direction_[u(mu)] * v[u(mu)];
  out += (b * wv) * generator_.matrix();
  return out;
}

}  // namespace levyflow
