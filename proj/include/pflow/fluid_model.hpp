#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pflow/quadrature.hpp"

namespace pflow {

enum class ModelKind { isentropic_gas, ideal_gas_entropy, saint_venant, custom };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Parameters of the preset laws. Only the fields relevant to the chosen
/// kind are read.
///
///   isentropic_gas     P = c rho^gamma,  mu = visc_amplitude * rho^visc_exponent
///   ideal_gas_entropy  P = c rho^gamma,  mu = visc_amplitude * rho^((gamma-1)/2), gamma in (1,2)
///   saint_venant       P = g rho^2 / 2,  mu = nu * rho
struct PresetParams {
  double c = 1.0;
  double gamma = 1.4;
  double visc_amplitude = 1.0;
  double visc_exponent = 0.0;
  double g = 9.81;
  double nu = 1.0;
};

/// P(rho) = coef * rho^exponent together with mu(rho) = visc_coef * rho^visc_exponent.
struct PowerLaws {
  double coef;
  double exponent;
  double visc_coef;
  double visc_exponent;
};

/// User-supplied constitutive laws. Missing derivatives are replaced by
/// central finite differences.
struct CustomLaws {
  std::function<double(double)> P;
  std::function<double(double)> mu;
  std::function<double(double)> P_prime;
  std::function<double(double)> P_double_prime;
  std::function<double(double)> mu_prime;
  std::function<double(double)> mu_double_prime;
};

/// Evaluation settings for the integral-defined functions (k, Q, Phi, F1, F2)
/// and the density grid rho* 10^k used for limit probing and F inversion.
struct DerivedFunctionTable {
  double quad_rel_tol = 1e-10;
  double quad_abs_tol = 1e-14;
  int probe_min_exponent = -6;
  int probe_max_exponent = 6;
};

/// Barotropic fluid: pressure and viscosity laws, total mass m on [0, L].
///
/// All members are immutable after construction, so a model can be shared
/// freely across threads.
class FluidModel {
 public:
  ModelKind kind() const { return kind_; }
  double m() const { return m_; }
  double L() const { return L_; }
  double rho_star() const { return rho_star_; }

  double P(double rho) const;
  double P_prime(double rho) const;
  double P_double_prime(double rho) const;
  double mu(double rho) const;
  double mu_prime(double rho) const;
  double mu_double_prime(double rho) const;

  /// Power-law coefficients when the laws are of that form (every preset,
  /// and custom power-law models built from config).
  const std::optional<PowerLaws>& power_laws() const { return power_laws_; }

  /// True when k, Q, Phi, K and F2 are evaluated from closed forms.
  bool uses_closed_forms() const { return closed_forms_; }

  const DerivedFunctionTable& table() const { return table_; }
  QuadratureTolerance quadrature_tolerance() const {
    return {table_.quad_rel_tol, table_.quad_abs_tol};
  }
  std::vector<double> probe_grid() const;

  /// Same laws, but every derived function goes through adaptive quadrature.
  FluidModel with_quadrature() const;
  FluidModel with_table(DerivedFunctionTable table) const;

  friend FluidModel make_preset(ModelKind, const PresetParams&, double, double);
  friend FluidModel make_custom(CustomLaws, double, double);
  friend FluidModel make_power_law(PowerLaws, double, double);

 private:
  FluidModel() = default;

  ModelKind kind_ = ModelKind::custom;
  double m_ = 1.0;
  double L_ = 1.0;
  double rho_star_ = 1.0;
  std::optional<PowerLaws> power_laws_;
  bool closed_forms_ = false;
  CustomLaws laws_;
  DerivedFunctionTable table_;
};

FluidModel make_preset(ModelKind kind, const PresetParams& params, double m, double L);

/// Arbitrary laws evaluated through quadrature.
FluidModel make_custom(CustomLaws laws, double m, double L);

/// Custom model with power-law P and mu; derived functions still use
/// quadrature (kind() == custom).
FluidModel make_power_law(PowerLaws laws, double m, double L);

// Derived functions. Every one rejects nonpositive arguments with
// InvalidArgument and reports quadrature failures with QuadratureError.

/// k(rho) = integral from rho* to rho of mu(t)/t.
double small_k(const FluidModel& model, double rho);

/// Potential-energy density Q(rho) >= 0, zero only at rho*.
double q_potential(const FluidModel& model, double rho);

/// Integral from rho* to rho of P(s)/s^2.
double pressure_integral(const FluidModel& model, double rho);

/// Particle potential Phi(x), normalised so that Phi(L) = 0.
double phi(const FluidModel& model, double x);
double phi_prime(const FluidModel& model, double x);
double phi_double_prime(const FluidModel& model, double x);

/// Viscous potential K(x) = -k(m/x)/m and its derivative mu(m/x)/(m x).
double cap_k(const FluidModel& model, double x);
double cap_k_prime(const FluidModel& model, double x);

struct FComponents {
  double F1;
  double F2;
  double k;
};

FComponents f_components(const FluidModel& model, double rho);

/// Increasing envelope F built from F1, F2 and k; F(rho*) = 0.
double f_envelope(const FluidModel& model, double rho);

/// Solves F(rho) = value by bisection in log(rho). Throws AdmissibilityError
/// when the value lies outside the range F attains on the search bracket.
double f_envelope_inverse(const FluidModel& model, double value);

/// Estimated limit of a probed sequence.
struct TailEstimate {
  bool infinite = false;
  double value = 0.0;  ///< extrapolated signed limit when finite
};

/// Classifies a sequence of probe values ordered towards the limit point.
/// Divergent when the last value exceeds 1.5x the previous one in magnitude,
/// or when the last increment does not shrink below 0.8x the previous
/// increment (logarithmic or slower-than-geometric growth). Finite limits
/// are Aitken-extrapolated from the last three probes.
TailEstimate classify_tail(const std::vector<double>& toward_limit);

struct EnvelopeLimits {
  TailEstimate high;      ///< lim F(rho), rho -> infinity
  TailEstimate low_neg;   ///< -lim F(rho), rho -> 0+
  std::vector<double> rho;
  std::vector<double> F;

  /// min of the two limits, +infinity when both diverge.
  double threshold() const;
};

EnvelopeLimits f_envelope_limits(const FluidModel& model);

struct AssumptionReport {
  bool holds = false;
  bool grows_at_high_density = false;
  bool bounded_at_low_density = false;
  std::vector<double> rho;
  std::vector<double> integral;  ///< pressure_integral at each probe density
};

AssumptionReport check_assumption_a(const FluidModel& model);

}  // namespace pflow
