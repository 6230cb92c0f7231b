#include "pflow/reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pflow/error.hpp"

namespace pflow {

namespace {

// Gauss-Legendre, 5 points on [-1, 1].
constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                          0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

template <typename Integrand>
double gauss5_over_cells(const ReconstructedField& field, Integrand&& f) {
  const auto& e = field.edges();
  double total = 0.0;
  for (std::size_t i = 1; i <= field.n(); ++i) {
    const double lo = e[i];
    const double hi = e[i - 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double cell = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) cell += kWeights[q] * f(i, mid + half * kNodes[q]);
    total += half * cell;
  }
  return total;
}

}  // namespace

ReconstructedField::ReconstructedField(std::vector<double> edges, std::vector<double> rho,
                                       std::vector<double> v)
    : edges_(std::move(edges)), rho_(std::move(rho)), v_(std::move(v)) {
  if (edges_.size() < 3 || rho_.size() != edges_.size() || v_.size() != edges_.size()) {
    throw InvalidArgument("ReconstructedField: inconsistent node arrays");
  }
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] < edges_[i - 1])) throw DomainError("ReconstructedField: edges not descending");
  }
}

std::size_t ReconstructedField::cell_of(double x) const {
  if (!(x >= 0.0 && x <= L())) {
    std::ostringstream msg;
    msg << "query point " << x << " lies outside [0, " << L() << "]";
    throw InvalidArgument(msg.str());
  }
  // Number of interior edges x_1..x_{n-1} at or to the right of x.
  const auto first = edges_.begin() + 1;
  const auto last = edges_.end() - 1;
  const auto it = std::partition_point(first, last, [x](double e) { return e >= x; });
  return static_cast<std::size_t>(it - first) + 1;
}

double ReconstructedField::rho_slope(std::size_t i) const {
  return (rho_[i - 1] - rho_[i]) / (edges_[i - 1] - edges_[i]);
}

double ReconstructedField::v_slope(std::size_t i) const {
  return (v_[i - 1] - v_[i]) / (edges_[i - 1] - edges_[i]);
}

double ReconstructedField::rho(double x) const {
  const std::size_t i = cell_of(x);
  return rho_[i] + rho_slope(i) * (x - edges_[i]);
}

double ReconstructedField::v(double x) const {
  const std::size_t i = cell_of(x);
  return v_[i] + v_slope(i) * (x - edges_[i]);
}

double ReconstructedField::rho_x(double x) const { return rho_slope(cell_of(x)); }
double ReconstructedField::v_x(double x) const { return v_slope(cell_of(x)); }

ReconstructedField reconstruct(const FluidModel& model, const ParticleState& state) {
  state.require_in_domain();
  const std::size_t n = state.n();
  std::vector<double> edges(n + 1);
  std::vector<double> rho(n + 1);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    edges[i] = state.position(i);
    v[i] = state.velocity(i);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    rho[i] = model.m() / (static_cast<double>(n) * state.spacing(i));
  }
  rho[0] = rho[1];
  return ReconstructedField(std::move(edges), std::move(rho), std::move(v));
}

WeakTimeDerivatives weak_time_derivatives(const FluidModel& model, const ParticleState& state,
                                          double x) {
  const auto field = reconstruct(model, state);
  const std::size_t i = field.cell_of(x);
  const auto d = rhs(model, state);
  const std::size_t n = state.n();

  auto rho_dot_node = [&](std::size_t j) {
    const std::size_t cell = j == 0 ? 1 : j;
    const double dv = state.velocity(cell - 1) - state.velocity(cell);
    return -field.node_rho()[cell] * dv / state.spacing(cell);
  };
  auto v_dot_node = [&](std::size_t j) { return (j == 0 || j == n) ? 0.0 : d.dv[j - 1]; };

  const double width = state.spacing(i);
  const double offset = x - state.position(i);
  const double rho_dot = rho_dot_node(i) + (rho_dot_node(i - 1) - rho_dot_node(i)) / width * offset -
                         field.rho_slope(i) * field.v(x);
  const double dv = state.velocity(i - 1) - state.velocity(i);
  const double v_dot = v_dot_node(i) + (v_dot_node(i - 1) - v_dot_node(i)) / width * offset -
                       dv * dv / (width * width) * offset - dv / width * state.velocity(i);
  return {rho_dot, v_dot};
}

double total_mass(const ReconstructedField& field) {
  const auto& e = field.edges();
  const auto& r = field.node_rho();
  double mass = 0.0;
  for (std::size_t i = 1; i <= field.n(); ++i) mass += (e[i - 1] - e[i]) * 0.5 * (r[i] + r[i - 1]);
  return mass;
}

double continuous_E(const FluidModel& model, const ReconstructedField& field) {
  const auto& e = field.edges();
  const auto& r = field.node_rho();
  const auto& v = field.node_v();
  return gauss5_over_cells(field, [&](std::size_t i, double x) {
    const double off = x - e[i];
    const double rho = r[i] + field.rho_slope(i) * off;
    const double vel = v[i] + field.v_slope(i) * off;
    return 0.5 * rho * vel * vel + q_potential(model, rho);
  });
}

double continuous_W(const FluidModel& model, const ReconstructedField& field) {
  const auto& e = field.edges();
  const auto& r = field.node_rho();
  const auto& v = field.node_v();
  return gauss5_over_cells(field, [&](std::size_t i, double x) {
    const double off = x - e[i];
    const double slope = field.rho_slope(i);
    const double rho = r[i] + slope * off;
    const double vel = v[i] + field.v_slope(i) * off;
    const double shifted = vel + model.mu(rho) * slope / (rho * rho);
    return 0.5 * rho * shifted * shifted + q_potential(model, rho);
  });
}

FieldSamples sample_field(const ReconstructedField& field, std::size_t points) {
  if (points < 2) throw InvalidArgument("sample_field: need at least two points");
  FieldSamples s;
  s.x.resize(points);
  s.rho.resize(points);
  s.v.resize(points);
  const double L = field.L();
  for (std::size_t j = 0; j < points; ++j) {
    const double x = j + 1 == points ? L : L * static_cast<double>(j) / static_cast<double>(points - 1);
    s.x[j] = x;
    s.rho[j] = field.rho(x);
    s.v[j] = field.v(x);
  }
  return s;
}

}  // namespace pflow
