#pragma once

#include <cstddef>
#include <vector>

#include "pflow/fluid_model.hpp"
#include "pflow/particles.hpp"

namespace pflow {

/// Piecewise-linear density and velocity fields built from a particle state.
/// Cell i (1..n) is [x_i, x_{i-1}]; node i carries rho_i = m/(n dx_i) with
/// the ghost node reusing rho_1, and v_0 = v_n = 0.
class ReconstructedField {
 public:
  ReconstructedField(std::vector<double> edges, std::vector<double> rho, std::vector<double> v);

  std::size_t n() const { return edges_.size() - 1; }
  double L() const { return edges_.front(); }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& node_rho() const { return rho_; }
  const std::vector<double>& node_v() const { return v_; }

  /// Cell index i in [1, n] with x in [x_i, x_{i-1}]. Interior edges belong
  /// to the cell on their left (smaller x). Throws for x outside [0, L].
  std::size_t cell_of(double x) const;

  double rho(double x) const;
  double v(double x) const;
  double rho_x(double x) const;
  double v_x(double x) const;

  /// Slopes on cell i.
  double rho_slope(std::size_t i) const;
  double v_slope(std::size_t i) const;

 private:
  std::vector<double> edges_;  // x_0 = L > x_1 > ... > x_n = 0
  std::vector<double> rho_;    // rho_0..rho_n
  std::vector<double> v_;      // v_0..v_n
};

ReconstructedField reconstruct(const FluidModel& model, const ParticleState& state);

struct WeakTimeDerivatives {
  double rho_dot;
  double v_dot;
};

/// Weak time derivatives of the reconstructed fields at x, from the particle
/// equations and rho_i' = -rho_i (v_{i-1} - v_i) / dx_i.
WeakTimeDerivatives weak_time_derivatives(const FluidModel& model, const ParticleState& state,
                                          double x);

/// Exact integral of the piecewise-linear density.
double total_mass(const ReconstructedField& field);

/// Mechanical energy 1/2 int rho v^2 + int Q(rho), 5-point Gauss per cell.
double continuous_E(const FluidModel& model, const ReconstructedField& field);

/// Modified energy 1/2 int rho (v + mu(rho) rho^-2 rho_x)^2 + int Q(rho).
double continuous_W(const FluidModel& model, const ReconstructedField& field);

/// Uniform sampling of both fields at `points` nodes including 0 and L.
struct FieldSamples {
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> v;
};

FieldSamples sample_field(const ReconstructedField& field, std::size_t points = 512);

}  // namespace pflow
