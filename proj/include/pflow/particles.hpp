#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pflow/fluid_model.hpp"

namespace pflow {

/// n particles of mass m/n between a wall particle pinned at x = 0 and a
/// massless ghost pinned at x = L. Only the n-1 interior particles are
/// stored; index i in [1, n-1] maps to x[i-1], v[i-1]. Boundary positions
/// and velocities are implicit constants.
class ParticleState {
 public:
  ParticleState(double L, double t, std::vector<double> x, std::vector<double> v);

  std::size_t n() const { return x_.size() + 1; }
  double t() const { return t_; }
  double L() const { return L_; }

  /// Position of particle i in [0, n]; x_0 = L, x_n = 0.
  double position(std::size_t i) const { return i == 0 ? L_ : (i == n() ? 0.0 : x_[i - 1]); }
  /// Velocity of particle i in [0, n]; v_0 = v_n = 0.
  double velocity(std::size_t i) const { return (i == 0 || i == n()) ? 0.0 : v_[i - 1]; }
  /// Cell width x_{i-1} - x_i for i in [1, n].
  double spacing(std::size_t i) const { return position(i - 1) - position(i); }

  std::span<const double> x() const { return x_; }
  /// Same configuration stamped with a different time.
  ParticleState at_time(double t) const { return ParticleState(L_, t, x_, v_); }
  std::span<const double> v() const { return v_; }

  /// True when every entry is finite and 0 < x_{n-1} < ... < x_1 < L.
  bool in_domain() const;
  /// Throws DomainError unless in_domain().
  void require_in_domain() const;

  friend bool operator==(const ParticleState&, const ParticleState&) = default;

 private:
  double L_;
  double t_;
  std::vector<double> x_;
  std::vector<double> v_;
};

struct StateDerivative {
  std::vector<double> dx;
  std::vector<double> dv;
};

struct DiscreteFunctionals {
  double E_n = 0.0;
  double W_n = 0.0;
  double Z_n = 0.0;
  double H_n = 0.0;
  std::vector<double> w;          ///< transformed velocities w_1..w_{n-1}
  bool rounding_flag = false;     ///< an energy fell below -1e-14 before clamping
};

/// Right-hand side of the particle system. Summation order is fixed, so the
/// result is bit-reproducible.
StateDerivative rhs(const FluidModel& model, const ParticleState& state);

DiscreteFunctionals functionals(const FluidModel& model, const ParticleState& state);

/// dE_n/dt along the flow: -m n sum_{i=1..n} K'(n dx_i) (v_{i-1} - v_i)^2.
double energy_dissipation(const FluidModel& model, const ParticleState& state);

/// dW_n/dt along the flow:
/// -m n sum_{i=1..n-1} (Phi'(n dx_i) - Phi'(n dx_{i+1})) (K(n dx_i) - K(n dx_{i+1})).
double modified_energy_dissipation(const FluidModel& model, const ParticleState& state);

/// n sum_{i=1..n-1} (K(n dx_i) - K(n dx_{i+1}))^2, bounded by (2/m)(sqrt W_n + sqrt E_n)^2.
double viscous_jump_energy(const FluidModel& model, const ParticleState& state);

/// Particle densities rho_i = m / (n dx_i) for i = 1..n.
std::vector<double> cell_densities(const FluidModel& model, const ParticleState& state);

struct SpacingBounds {
  double a;  ///< lower bound on n (x_{i-1} - x_i)
  double b;  ///< upper bound on n (x_{i-1} - x_i)
  double budget;  ///< sqrt(W) + sqrt(E)
};

/// Guaranteed bounds on the scaled spacings for any trajectory whose
/// energies stay below E_bar and W_bar. Throws AdmissibilityError when
/// sqrt(W_bar) + sqrt(E_bar) reaches either limit of F.
SpacingBounds spacing_bounds(const FluidModel& model, double E_bar, double W_bar);

/// Same, reusing precomputed envelope limits.
SpacingBounds spacing_bounds(const FluidModel& model, const EnvelopeLimits& limits, double E_bar,
                             double W_bar);

}  // namespace pflow
