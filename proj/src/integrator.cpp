#include "pflow/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "pflow/error.hpp"

namespace pflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<std::array<double, 6>, 7> kA = {{
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
constexpr std::array<double, 7> kB = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192,
                                      -2187.0 / 6784, 11.0 / 84, 0};
// b5 - b4
constexpr std::array<double, 7> kE = {71.0 / 57600,  0,           -71.0 / 16695, 71.0 / 1920,
                                      -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

using Vec = std::vector<double>;

// y = [x_1..x_{n-1}, v_1..v_{n-1}]
Vec pack(const ParticleState& s) {
  Vec y(s.x().begin(), s.x().end());
  y.insert(y.end(), s.v().begin(), s.v().end());
  return y;
}

ParticleState unpack(const Vec& y, double L, double t) {
  const std::size_t half = y.size() / 2;
  return ParticleState(L, t, Vec(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(half)),
                       Vec(y.begin() + static_cast<std::ptrdiff_t>(half), y.end()));
}

Vec eval(const FluidModel& model, const Vec& y, double L, double t) {
  const auto d = rhs(model, unpack(y, L, t));
  Vec out(d.dx);
  out.insert(out.end(), d.dv.begin(), d.dv.end());
  return out;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw InvalidArgument("integrator tolerances must be positive");
  }
  if (!(snapshot_dt > 0.0)) throw InvalidArgument("snapshot_dt must be positive");
  if (!(dt_max > 0.0)) throw InvalidArgument("dt_max must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("T must be positive and finite");
  if (dt_init && !(*dt_init > 0.0)) throw InvalidArgument("dt_init must be positive");
  if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
}

StepOutcome step(const FluidModel& model, const ParticleState& state, double dt,
                 const IntegratorConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  if (dt < 1e-14 * cfg.T) {
    std::ostringstream msg;
    msg << "step size " << dt << " underflowed at t = " << state.t()
        << "; the viscous coupling is too stiff for this particle count (reduce n or use an "
           "implicit integrator)";
    throw StiffnessError(msg.str());
  }
  state.require_in_domain();

  const double L = state.L();
  const double t = state.t();
  const Vec y0 = pack(state);
  const std::size_t dim = y0.size();
  std::array<Vec, 7> k;

  auto reject_domain = [&]() {
    return StepOutcome{state, 0.5 * dt, false, std::numeric_limits<double>::infinity()};
  };

  Vec y_new(dim);
  try {
    k[0] = eval(model, y0, L, t);
    Vec stage(dim);
    for (std::size_t s = 1; s < 7; ++s) {
      for (std::size_t j = 0; j < dim; ++j) {
        double acc = y0[j];
        for (std::size_t r = 0; r < s; ++r) acc += dt * kA[s][r] * k[r][j];
        stage[j] = acc;
      }
      if (s == 6) y_new = stage;
      double ts = t;
      for (std::size_t r = 0; r < s; ++r) ts += dt * kA[s][r];
      k[s] = eval(model, stage, L, ts);
    }
  } catch (const DomainError&) {
    return reject_domain();
  }

  // The 7th stage is evaluated at the 5th-order solution (FSAL row), so y_new
  // already equals y0 + dt * sum b_r k_r.
  double norm = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double err = 0.0;
    for (std::size_t r = 0; r < 7; ++r) err += kE[r] * k[r][j];
    err *= dt;
    const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[j]), std::abs(y_new[j]));
    norm = std::max(norm, std::abs(err) / scale);
  }
  if (!std::isfinite(norm)) return reject_domain();

  auto candidate = unpack(y_new, L, t + dt);
  const bool inside = candidate.in_domain();
  if (!inside) return reject_domain();

  double factor = norm == 0.0 ? kMaxFactor : kSafety * std::pow(norm, -0.2);
  factor = std::clamp(factor, kMinFactor, kMaxFactor);
  const bool accepted = norm <= 1.0;
  if (!accepted) factor = std::min(factor, 1.0);
  const double dt_next = std::min(dt * factor, cfg.dt_max);
  if (accepted) return StepOutcome{std::move(candidate), dt_next, true, norm};
  return StepOutcome{state, dt_next, false, norm};
}

double default_initial_dt(const FluidModel& model, const ParticleState& state) {
  const std::size_t n = state.n();
  const double nd = static_cast<double>(n);
  double a_est = std::numeric_limits<double>::infinity();
  double b_est = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    a_est = std::min(a_est, nd * state.spacing(i));
    b_est = std::max(b_est, nd * state.spacing(i));
  }
  double k_max = 0.0;
  constexpr int kSamples = 64;
  for (int j = 0; j <= kSamples; ++j) {
    const double s = a_est + (b_est - a_est) * j / kSamples;
    k_max = std::max(k_max, cap_k_prime(model, s));
  }
  const double spacing = a_est / nd;
  return std::min(1e-3, 0.1 * spacing * spacing / (nd * nd * k_max));
}

SnapshotSeries simulate(const FluidModel& model, const ParticleState& state0, double T,
                        IntegratorConfig cfg) {
  cfg.T = T;
  cfg.validate();
  state0.require_in_domain();
  if (!check_assumption_a(model).holds) {
    throw InvalidArgument(
        "pressure law must make the particle potential blow up under compression and stay "
        "bounded below under expansion");
  }

  SnapshotSeries series;
  series.T = T;
  const auto f0 = functionals(model, state0);
  const double slack_E = 1e-8 * std::max(1.0, f0.E_n);
  const double slack_W = 1e-8 * std::max(1.0, f0.W_n);
  series.snapshots.push_back({state0.at_time(0.0), f0});

  double dt = std::min(cfg.dt_init.value_or(default_initial_dt(model, state0)), cfg.dt_max);
  ParticleState current = state0.at_time(0.0);
  double prev_E = f0.E_n;
  double prev_W = f0.W_n;
  bool warned_E = false;
  bool warned_W = false;
  series.stats.min_dt = std::numeric_limits<double>::infinity();

  std::size_t k = 1;
  std::size_t steps = 0;
  while (true) {
    double target = static_cast<double>(k) * cfg.snapshot_dt;
    if (target > T * (1.0 - 1e-12)) target = T;

    while (current.t() < target) {
      if (++steps > cfg.max_steps) {
        throw StiffnessError("step budget exhausted before reaching T");
      }
      const double remaining = target - current.t();
      const bool truncated = dt >= remaining;
      const double h = truncated ? remaining : dt;
      auto outcome = step(model, current, h, cfg);
      if (!outcome.accepted) {
        ++series.stats.rejected;
        if (!std::isfinite(outcome.error_norm)) ++series.stats.domain_rejections;
        dt = outcome.dt_next;
        continue;
      }
      ++series.stats.accepted;
      series.stats.min_dt = std::min(series.stats.min_dt, h);
      series.stats.max_dt = std::max(series.stats.max_dt, h);
      current = truncated ? outcome.state.at_time(target) : std::move(outcome.state);
      dt = truncated ? std::max(dt, outcome.dt_next) : outcome.dt_next;

      const auto f = functionals(model, current);
      series.max_step_increase_E = std::max(series.max_step_increase_E, f.E_n - prev_E);
      series.max_step_increase_W = std::max(series.max_step_increase_W, f.W_n - prev_W);
      prev_E = f.E_n;
      prev_W = f.W_n;
    }

    auto f = functionals(model, current);
    const auto& last = series.snapshots.back().functionals;
    if (!warned_E && f.E_n > last.E_n + slack_E) {
      series.warnings.push_back({"E_n", current.t(), f.E_n - last.E_n});
      warned_E = true;
    }
    if (!warned_W && f.W_n > last.W_n + slack_W) {
      series.warnings.push_back({"W_n", current.t(), f.W_n - last.W_n});
      warned_W = true;
    }
    series.snapshots.push_back({current, std::move(f)});
    if (target >= T) break;
    ++k;
  }
  if (series.stats.accepted == 0) series.stats.min_dt = 0.0;
  return series;
}

}  // namespace pflow
