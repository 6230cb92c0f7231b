#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pflow/fluid_model.hpp"
#include "pflow/particles.hpp"

namespace pflow {

/// Initial density and velocity profiles on [0, L].
///
/// Built through the named constructors below; each one fills the norms it
/// knows in closed form and leaves the rest to dense sampling.
class InitialData {
 public:
  /// rho0 = value (must equal m/L).
  static InitialData constant_density(const FluidModel& model, double value);
  /// rho0 = rho*(1 + amplitude cos(mode pi x / L)), |amplitude| < 1, mode >= 1.
  static InitialData cosine_density(const FluidModel& model, double amplitude, int mode);
  /// Piecewise-linear density through (x_j, rho_j); x must run from 0 to L.
  static InitialData table_density(const FluidModel& model, std::vector<double> x,
                                   std::vector<double> rho);
  /// Arbitrary density; derivative optional (finite differences otherwise).
  static InitialData function_density(const FluidModel& model, std::function<double(double)> rho,
                                      std::function<double(double)> rho_prime = {});

  /// v0 = amplitude sin(mode pi x / L).
  InitialData& sine_velocity(double amplitude, int mode);
  /// Piecewise-linear velocity; must vanish exactly at both ends.
  InitialData& table_velocity(std::vector<double> x, std::vector<double> v);
  InitialData& function_velocity(std::function<double(double)> v,
                                 std::function<double(double)> v_prime = {});
  InitialData& zero_velocity();

  double L() const { return L_; }
  double m() const { return m_; }
  double rho0(double x) const { return rho_(x); }
  double v0(double x) const { return v_(x); }
  /// Cumulative mass from 0 to x.
  double cumulative_mass(double x) const;

  double rho0_sup() const { return rho_sup_; }
  double rho0_deriv_sup() const { return rho_deriv_sup_; }
  double rho_min() const { return rho_min_; }
  double v0_deriv_l2() const { return v_deriv_l2_; }

  /// Points used for sampled norms.
  static constexpr std::size_t kSamplePoints = 100'000;

 private:
  InitialData() = default;
  void finish_density(const FluidModel& model);
  void sample_velocity_norm(const std::function<double(double)>& v_prime);

  double L_ = 1.0;
  double m_ = 1.0;
  std::function<double(double)> rho_;
  std::function<double(double)> v_;
  std::function<double(double)> mass_;  // cumulative mass, when known exactly
  double rho_sup_ = 0.0;
  double rho_deriv_sup_ = 0.0;
  double rho_min_ = 0.0;
  double v_deriv_l2_ = 0.0;
};

/// Equal-mass partition: x_i solves M(x_i) = m (n - i) / n, v_i = v0(x_i).
ParticleState build_particles(const FluidModel& model, const InitialData& init, std::size_t n);

/// Constants bounding E_n, W_n, Z_n, H_n at t = 0 uniformly in n.
struct InitialBounds {
  double E_bar = 0.0;
  double W_bar = 0.0;
  double Z_bar = 0.0;
  double A_bar = 0.0;
  double M_bar = 0.0;  ///< max K' over [m/||rho0||inf, m/rho_min]
  double rho_min = 0.0;
};

InitialBounds initial_bounds(const FluidModel& model, const InitialData& init);

struct AdmissibilityReport {
  InitialBounds bounds;
  EnvelopeLimits limits;
  double lhs = 0.0;  ///< sqrt(W_bar) + sqrt(E_bar)
  bool admissible = false;
  std::optional<SpacingBounds> spacing;  ///< present iff admissible
};

AdmissibilityReport admissibility(const FluidModel& model, const InitialData& init);

}  // namespace pflow
