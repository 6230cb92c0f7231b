#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "pflow/error.hpp"
#include "pflow/integrator.hpp"

using namespace pflow;

namespace {

FluidModel saint_venant() { return make_preset(ModelKind::saint_venant, PresetParams{}, 1.0, 1.0); }

ParticleState perturbed(std::size_t n, double amplitude) {
  std::vector<double> x(n - 1);
  std::vector<double> v(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    x[i - 1] = 1.0 - static_cast<double>(i) / static_cast<double>(n);
    v[i - 1] = amplitude * std::sin(std::numbers::pi * x[i - 1]);
  }
  return ParticleState(1.0, 0.0, x, v);
}

double max_distance(const ParticleState& a, const ParticleState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.x().size(); ++i) {
    d = std::max({d, std::abs(a.x()[i] - b.x()[i]), std::abs(a.v()[i] - b.v()[i])});
  }
  return d;
}

// Reference solution by many small fixed steps.
ParticleState fine_solution(const FluidModel& model, ParticleState s, double T, int steps) {
  IntegratorConfig cfg;
  cfg.rel_tol = 1.0;
  cfg.abs_tol = 1.0;
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) s = step(model, s, h, cfg).state;
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.snapshot_dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.dt_init = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("single steps are fifth order") {
  const auto model = saint_venant();
  const auto s0 = perturbed(6, 0.3);
  IntegratorConfig loose;
  loose.rel_tol = 1.0;
  loose.abs_tol = 1.0;
  const double h = 4e-3;
  const auto ref1 = fine_solution(model, s0, h, 256);
  const auto ref2 = fine_solution(model, s0, h / 2, 256);
  const double e1 = max_distance(step(model, s0, h, loose).state, ref1);
  const double e2 = max_distance(step(model, s0, h / 2, loose).state, ref2);
  // local error O(h^6)
  CHECK(e1 / e2 > 40.0);
  CHECK(e1 / e2 < 90.0);
}

TEST_CASE("steps that leave the ordered domain are rejected") {
  const auto model = saint_venant();
  // two interior particles rushing towards each other
  const ParticleState s(1.0, 0.0, {0.51, 0.49}, {-50.0, 50.0});
  IntegratorConfig cfg;
  const auto out = step(model, s, 0.05, cfg);
  CHECK_FALSE(out.accepted);
  CHECK(out.state == s);
  CHECK(out.dt_next < 0.05);
}

TEST_CASE("tiny steps signal stiffness") {
  IntegratorConfig cfg;
  cfg.T = 1.0;
  CHECK_THROWS_AS(step(saint_venant(), perturbed(4, 0.1), 1e-15, cfg), StiffnessError);
  CHECK_THROWS_AS(step(saint_venant(), perturbed(4, 0.1), 0.0, cfg), InvalidArgument);
}

TEST_CASE("equilibrium is a fixed point") {
  const auto model = saint_venant();
  const auto s0 = perturbed(32, 0.0);
  const auto start = std::chrono::steady_clock::now();
  const auto series = simulate(model, s0, 1.0, IntegratorConfig{});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = 0.0;
  for (const auto& snap : series.snapshots) worst = std::max(worst, max_distance(snap.state, s0));
  CHECK(worst <= 1e-10);
  CHECK(seconds < 5.0);
  CHECK(series.snapshots.size() == 101);
  CHECK(series.warnings.empty());
}

TEST_CASE("snapshots land exactly on the requested times") {
  IntegratorConfig cfg;
  cfg.snapshot_dt = 0.03;
  const auto series = simulate(saint_venant(), perturbed(8, 0.1), 0.1, cfg);
  REQUIRE(series.snapshots.size() == 5);
  CHECK(series.snapshots[0].state.t() == 0.0);
  CHECK(series.snapshots[1].state.t() == 1 * 0.03);
  CHECK(series.snapshots[3].state.t() == 3 * 0.03);
  CHECK(series.snapshots[4].state.t() == 0.1);
  CHECK(series.T == 0.1);
}

TEST_CASE("energies decay along a perturbed trajectory") {
  const auto model = saint_venant();
  for (std::size_t n : {8u, 16u}) {
    const auto series = simulate(model, perturbed(n, 0.1), 0.5, IntegratorConfig{});
    const double slack_E = 1e-8 * std::max(1.0, series.snapshots.front().functionals.E_n);
    const double slack_W = 1e-8 * std::max(1.0, series.snapshots.front().functionals.W_n);
    for (std::size_t j = 1; j < series.snapshots.size(); ++j) {
      const auto& a = series.snapshots[j - 1].functionals;
      const auto& b = series.snapshots[j].functionals;
      CHECK(b.E_n <= a.E_n + slack_E);
      CHECK(b.W_n <= a.W_n + slack_W);
    }
    CHECK(series.warnings.empty());
    CHECK(series.max_step_increase_E <= slack_E);
    CHECK(series.stats.accepted > 0);
    CHECK(series.snapshots.back().functionals.E_n < series.snapshots.front().functionals.E_n);
  }
}

TEST_CASE("simulation is deterministic") {
  const auto a = simulate(saint_venant(), perturbed(10, 0.2), 0.2, IntegratorConfig{});
  const auto b = simulate(saint_venant(), perturbed(10, 0.2), 0.2, IntegratorConfig{});
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t j = 0; j < a.snapshots.size(); ++j) CHECK(a.snapshots[j].state == b.snapshots[j].state);
}

TEST_CASE("default initial step follows the viscous scale") {
  const auto model = saint_venant();
  const double dt16 = default_initial_dt(model, perturbed(16, 0.0));
  const double dt32 = default_initial_dt(model, perturbed(32, 0.0));
  CHECK(dt16 > 0.0);
  CHECK(dt16 / dt32 == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("failures surface as typed errors") {
  const auto linear = make_power_law({1.0, 1.0, 1.0, 0.0}, 1.0, 1.0);
  CHECK_THROWS_AS(simulate(linear, perturbed(4, 0.0), 1.0, IntegratorConfig{}), InvalidArgument);

  IntegratorConfig few;
  few.max_steps = 3;
  CHECK_THROWS_AS(simulate(saint_venant(), perturbed(16, 0.1), 1.0, few), StiffnessError);

  CHECK_THROWS_AS(simulate(saint_venant(), ParticleState(1.0, 0.0, {0.2, 0.4}, {0.0, 0.0}), 1.0,
                           IntegratorConfig{}),
                  DomainError);
}
