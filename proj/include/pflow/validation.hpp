#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pflow/initializer.hpp"
#include "pflow/integrator.hpp"
#include "pflow/reconstruction.hpp"

namespace pflow {

enum class TestFunctionKind { continuity, momentum };

/// Smooth space-time test function on [0, T] x [0, L] with the derivatives
/// the residuals need. Continuity kind: phi(T, .) = 0. Momentum kind
/// additionally phi(t, 0) = phi(t, L) = phi_x(t, L) = 0.
struct TestFunction {
  using Field = std::function<double(double, double)>;  // (t, x)

  std::string id;
  TestFunctionKind kind = TestFunctionKind::continuity;
  double T = 1.0;
  Field phi;
  Field phi_t;
  Field phi_x;
  Field phi_xx;
};

std::vector<TestFunction> continuity_test_functions(double L, double T);
std::vector<TestFunction> momentum_test_functions(double L, double T);
TestFunction zero_test_function(TestFunctionKind kind, double T);

/// alpha * f + beta * g (same kind and horizon).
TestFunction combine(double alpha, const TestFunction& f, double beta, const TestFunction& g);

/// Largest violation of the kind's boundary/terminal constraints over
/// `probes` random (t, x) points.
double max_constraint_violation(const TestFunction& tf, double L, std::size_t probes,
                                std::mt19937_64& rng);

struct ResidualReport {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t n = 0;
  std::string test_function;
  bool inconclusive = false;  ///< error estimate not below |value| / 10
};

/// int phi(0,x) rho0 dx + int_0^T int_0^L rho^(n) (phi_t + v^(n) phi_x) dx dt.
ResidualReport continuity_residual(const FluidModel& model, const SnapshotSeries& series,
                                   const InitialData& init, const TestFunction& tf);

/// int phi(0,x) rho0 v0 dx + int int (phi_t rho v + phi_x (rho v^2 + P - mu v_x)) dx dt.
ResidualReport momentum_residual(const FluidModel& model, const SnapshotSeries& series,
                                 const InitialData& init, const TestFunction& tf);

/// Composite Simpson on a possibly nonuniform grid; a trailing odd interval
/// is integrated with the quadratic through the last three points.
double simpson(const std::vector<double>& t, const std::vector<double>& y);

struct DecayReport {
  std::vector<double> t;
  std::vector<double> E_n;
  std::vector<double> W_n;
  std::vector<double> E_cont;
  std::vector<double> W_cont;
  std::vector<bool> E_n_ok;     ///< no rise beyond slack since previous snapshot
  std::vector<bool> W_n_ok;
  std::vector<bool> E_cont_ok;
  double slack_E = 0.0;
  double slack_W = 0.0;
  double max_W_average = 0.0;   ///< sup over windows of the time-averaged continuous W
  double W_average_bound = 0.0;
  bool W_average_ok = true;
  std::size_t violations = 0;   ///< discrete E_n/W_n rises plus W-average excess
  std::optional<std::string> first_violation;
};

/// Decay checks on a series: E_n, W_n monotone within 1e-8 max(1, value(0)),
/// continuous E monotonicity flags, and every window average of the
/// continuous W against W_bar (+1e-6).
DecayReport decay_report(const FluidModel& model, const SnapshotSeries& series,
                         const InitialBounds& bounds);

/// Trapezoid L2 norm of a - b on a shared uniform grid over [0, L].
double grid_l2_distance(const std::vector<double>& a, const std::vector<double>& b, double L);

struct ConvergenceRow {
  std::size_t n = 0;
  bool ok = true;
  std::string error;
  double mass_error = 0.0;           ///< sup_t |total_mass - m|
  double continuity_residual = 0.0;  ///< max |residual| over the library
  double momentum_residual = 0.0;
  double E_gap = 0.0;                ///< sup_t |continuous_E - E_n|
  double W_gap = 0.0;
  double rho_distance = 0.0;         ///< sup_t ||rho^(2n) - rho^(n)||_2
  double v_distance = 0.0;
  double rho_holder = 0.0;           ///< max ||rho[t]-rho[s]||_2 / |t-s|^(1/2)
  double v_holder = 0.0;             ///< same with exponent 1/4
  IntegrationStats stats;
};

/// Runs every n in n_list (and 2n for the self-distances; 2n for the last
/// entry is simulated as well). Failures are recorded per row.
std::vector<ConvergenceRow> convergence_study(const FluidModel& model, const InitialData& init,
                                              const std::vector<std::size_t>& n_list, double T,
                                              const IntegratorConfig& cfg,
                                              std::size_t grid_points = 1024);

}  // namespace pflow
