#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pflow/particles.hpp"

namespace pflow {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::optional<double> dt_init;
  double dt_max = 0.1;
  std::size_t max_steps = 50'000'000;
  double snapshot_dt = 0.01;
  /// Horizon; step() reports stiffness failure when dt < 1e-14 * T.
  double T = 1.0;

  void validate() const;
};

struct StepOutcome {
  ParticleState state;
  double dt_next;
  bool accepted;
  double error_norm;  ///< max-norm of the scaled error estimate (inf if the Ωn guard tripped)
};

/// One Dormand-Prince 5(4) attempt of size dt. The step is accepted when the
/// scaled error is at most one componentwise and the candidate keeps every
/// cell width positive. Throws StiffnessError when dt drops below 1e-14 T.
StepOutcome step(const FluidModel& model, const ParticleState& state, double dt,
                 const IntegratorConfig& cfg);

struct Snapshot {
  ParticleState state;
  DiscreteFunctionals functionals;
};

struct MonotonicityWarning {
  std::string functional;  ///< "E_n" or "W_n"
  double t;
  double increase;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t domain_rejections = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

struct SnapshotSeries {
  double T = 0.0;
  std::vector<Snapshot> snapshots;
  IntegrationStats stats;
  /// First snapshot where E_n (resp. W_n) rose by more than the slack.
  std::vector<MonotonicityWarning> warnings;
  /// Largest increase of E_n / W_n between consecutive accepted steps.
  double max_step_increase_E = 0.0;
  double max_step_increase_W = 0.0;
};

/// Default initial step from the viscous stiffness scale of the state.
double default_initial_dt(const FluidModel& model, const ParticleState& state);

/// Integrates from state0 to T, recording snapshots at multiples of
/// cfg.snapshot_dt and at T itself (hit exactly by step truncation).
SnapshotSeries simulate(const FluidModel& model, const ParticleState& state0, double T,
                        IntegratorConfig cfg);

}  // namespace pflow
