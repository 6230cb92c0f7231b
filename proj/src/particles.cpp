#include "pflow/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pflow/error.hpp"

namespace pflow {

ParticleState::ParticleState(double L, double t, std::vector<double> x, std::vector<double> v)
    : L_(L), t_(t), x_(std::move(x)), v_(std::move(v)) {
  if (!(L_ > 0.0) || !std::isfinite(L_)) throw InvalidArgument("ParticleState: L must be positive");
  if (x_.empty()) throw InvalidArgument("ParticleState: need n >= 2 particles");
  if (x_.size() != v_.size()) {
    throw InvalidArgument("ParticleState: positions and velocities differ in length");
  }
}

bool ParticleState::in_domain() const {
  if (!std::isfinite(t_)) return false;
  for (std::size_t i = 1; i <= n(); ++i) {
    if (!(spacing(i) > 0.0)) return false;
  }
  for (double value : x_) {
    if (!std::isfinite(value)) return false;
  }
  for (double value : v_) {
    if (!std::isfinite(value)) return false;
  }
  return true;
}

void ParticleState::require_in_domain() const {
  if (in_domain()) return;
  std::ostringstream msg;
  msg << "particle state at t = " << t_ << " is outside the ordered domain";
  for (std::size_t i = 1; i <= n(); ++i) {
    if (!(spacing(i) > 0.0)) {
      msg << " (cell " << i << " has width " << spacing(i) << ")";
      break;
    }
  }
  throw DomainError(msg.str());
}

namespace {

struct CellTerms {
  std::vector<double> phi_p;  // Phi'(n dx_i), i = 1..n (index 0 unused)
  std::vector<double> k_p;    // K'(n dx_i)
};

CellTerms cell_terms(const FluidModel& model, const ParticleState& s) {
  const std::size_t n = s.n();
  const double nd = static_cast<double>(n);
  CellTerms terms{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    const double scaled = nd * s.spacing(i);
    terms.phi_p[i] = phi_prime(model, scaled);
    terms.k_p[i] = cap_k_prime(model, scaled);
  }
  return terms;
}

std::vector<double> cell_k(const FluidModel& model, const ParticleState& s) {
  const std::size_t n = s.n();
  std::vector<double> k(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) k[i] = cap_k(model, static_cast<double>(n) * s.spacing(i));
  return k;
}

double clamp_energy(double value, bool& flag) {
  if (value < -1e-14) {
    flag = true;
    return value;
  }
  return std::max(value, 0.0);
}

}  // namespace

StateDerivative rhs(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  const double nd = static_cast<double>(n);
  const auto terms = cell_terms(model, state);

  StateDerivative d{std::vector<double>(n - 1), std::vector<double>(n - 1)};
  for (std::size_t i = 1; i < n; ++i) {
    const double vi = state.velocity(i);
    double acc = nd * terms.phi_p[i] - nd * terms.phi_p[i + 1];
    acc += nd * nd * terms.k_p[i] * (state.velocity(i - 1) - vi);
    acc += nd * nd * terms.k_p[i + 1] * (state.velocity(i + 1) - vi);
    d.dx[i - 1] = vi;
    d.dv[i - 1] = acc;
  }
  return d;
}

DiscreteFunctionals functionals(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  const double nd = static_cast<double>(n);
  const double m = model.m();
  const auto k = cell_k(model, state);

  // (m/n) sum Phi(n dx_i) equals sum dx_i Q(rho_i) because the widths add up
  // to L; the latter is termwise nonnegative.
  double potential = 0.0;
  double kinetic = 0.0;
  double z = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double dx = state.spacing(i);
    potential += dx * q_potential(model, m / (nd * dx));
    const double vi = state.velocity(i);
    kinetic += vi * vi;
    const double dv = state.velocity(i - 1) - vi;
    z += dv * dv / dx;
  }

  DiscreteFunctionals out;
  out.w.resize(n - 1);
  double w_sq = 0.0;
  double h = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double jump = k[i] - k[i + 1];
    const double wi = state.velocity(i) - nd * jump;
    out.w[i - 1] = wi;
    w_sq += wi * wi;
    h = std::max(h, nd * std::abs(jump));
  }
  out.E_n = clamp_energy(m / (2.0 * nd) * kinetic + potential, out.rounding_flag);
  out.W_n = clamp_energy(m / (2.0 * nd) * w_sq + potential, out.rounding_flag);
  out.Z_n = 0.5 * z;
  out.H_n = h;
  return out;
}

double energy_dissipation(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  const double nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double dv = state.velocity(i - 1) - state.velocity(i);
    sum += cap_k_prime(model, nd * state.spacing(i)) * dv * dv;
  }
  return -model.m() * nd * sum;
}

double modified_energy_dissipation(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  const double nd = static_cast<double>(n);
  const auto k = cell_k(model, state);
  double sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double dphi = phi_prime(model, nd * state.spacing(i)) -
                        phi_prime(model, nd * state.spacing(i + 1));
    sum += dphi * (k[i] - k[i + 1]);
  }
  return -model.m() * nd * sum;
}

double viscous_jump_energy(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  const auto k = cell_k(model, state);
  double sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double jump = k[i] - k[i + 1];
    sum += jump * jump;
  }
  return static_cast<double>(n) * sum;
}

std::vector<double> cell_densities(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  std::vector<double> rho(n);
  for (std::size_t i = 1; i <= n; ++i) {
    rho[i - 1] = model.m() / (static_cast<double>(n) * state.spacing(i));
  }
  return rho;
}

SpacingBounds spacing_bounds(const FluidModel& model, double E_bar, double W_bar) {
  return spacing_bounds(model, f_envelope_limits(model), E_bar, W_bar);
}

SpacingBounds spacing_bounds(const FluidModel& model, const EnvelopeLimits& limits, double E_bar,
                             double W_bar) {
  if (!(E_bar >= 0.0) || !(W_bar >= 0.0) || !std::isfinite(E_bar) || !std::isfinite(W_bar)) {
    throw InvalidArgument("spacing_bounds: energies must be finite and nonnegative");
  }
  const double budget = std::sqrt(W_bar) + std::sqrt(E_bar);
  if (budget == 0.0) return {model.L(), model.L(), 0.0};

  auto fail = [&](const char* side, double limit) {
    std::ostringstream msg;
    msg << "energy budget sqrt(W)+sqrt(E) = " << budget << " reaches the " << side
        << " limit of F (" << limit << ")";
    throw AdmissibilityError(msg.str());
  };
  if (!(budget < limits.high.value)) fail("high-density", limits.high.value);
  if (!(budget < limits.low_neg.value)) fail("low-density", limits.low_neg.value);

  const double rho_max = f_envelope_inverse(model, budget);
  const double rho_min = f_envelope_inverse(model, -budget);
  return {model.m() / rho_max, model.m() / rho_min, budget};
}

}  // namespace pflow
