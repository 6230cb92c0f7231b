#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pflow/error.hpp"
#include "pflow/validation.hpp"

using namespace pflow;

namespace {

FluidModel saint_venant() { return make_preset(ModelKind::saint_venant, PresetParams{}, 1.0, 1.0); }

InitialData perturbed(const FluidModel& model, double amp) {
  auto init = InitialData::constant_density(model, 1.0);
  init.sine_velocity(amp, 1);
  return init;
}

SnapshotSeries run(const FluidModel& model, const InitialData& init, std::size_t n, double T) {
  return simulate(model, build_particles(model, init, n), T, IntegratorConfig{});
}

}  // namespace

TEST_CASE("simpson is exact for quadratics on uneven grids") {
  auto q = [](double t) { return 3.0 * t * t - 2.0 * t + 0.5; };
  auto Q = [](double t) { return t * t * t - t * t + 0.5 * t; };
  const std::vector<std::vector<double>> grids = {
      {0.0, 0.1, 0.3, 0.35, 0.9},            // even intervals, uneven widths
      {0.0, 0.2, 0.25, 0.7, 1.0, 1.1},       // odd interval count
      {0.5, 0.6, 1.3},
      {0.0, 1.0}};
  for (const auto& t : grids) {
    std::vector<double> y;
    for (double ti : t) y.push_back(q(ti));
    const double exact = Q(t.back()) - Q(t.front());
    if (t.size() == 2) {
      CHECK(simpson(t, y) == doctest::Approx(0.5 * (t[1] - t[0]) * (y[0] + y[1])));
    } else {
      CHECK(simpson(t, y) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(simpson({0.0, 1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("library test functions satisfy their constraints") {
  std::mt19937_64 rng(1);
  for (double L : {1.0, 2.5}) {
    for (const auto& tf : continuity_test_functions(L, 0.7)) {
      CHECK(tf.kind == TestFunctionKind::continuity);
      CHECK(max_constraint_violation(tf, L, 1000, rng) <= 1e-15);
    }
    for (const auto& tf : momentum_test_functions(L, 0.7)) {
      CHECK(tf.kind == TestFunctionKind::momentum);
      CHECK(max_constraint_violation(tf, L, 1000, rng) <= 1e-14);
    }
  }
}

TEST_CASE("library derivatives agree with finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const double L = 1.7;
  const double T = 0.8;
  auto all = continuity_test_functions(L, T);
  for (auto& tf : momentum_test_functions(L, T)) all.push_back(tf);
  for (const auto& tf : all) {
    for (int k = 0; k < 50; ++k) {
      const double t = T * unit(rng);
      const double x = L * unit(rng);
      const double dt = oracle::central_difference([&](double s) { return tf.phi(s, x); }, t);
      const double dx = oracle::central_difference([&](double y) { return tf.phi(t, y); }, x);
      const double dxx = oracle::central_difference([&](double y) { return tf.phi_x(t, y); }, x);
      CHECK_MESSAGE(oracle::close(dt, tf.phi_t(t, x), 1e-7, 1e-8), tf.id);
      CHECK_MESSAGE(oracle::close(dx, tf.phi_x(t, x), 1e-7, 1e-8), tf.id);
      CHECK_MESSAGE(oracle::close(dxx, tf.phi_xx(t, x), 1e-6, 1e-7), tf.id);
    }
  }
}

TEST_CASE("equilibrium residuals vanish") {
  const auto model = saint_venant();
  const auto init = InitialData::constant_density(model, 1.0);
  const auto series = run(model, init, 32, 1.0);
  for (const auto& tf : continuity_test_functions(1.0, 1.0)) {
    const auto r = continuity_residual(model, series, init, tf);
    CHECK_MESSAGE(std::abs(r.value) <= 1e-8, tf.id << " " << r.value);
    CHECK(r.n == 32);
    CHECK(r.test_function == tf.id);
  }
  for (const auto& tf : momentum_test_functions(1.0, 1.0)) {
    const auto r = momentum_residual(model, series, init, tf);
    CHECK_MESSAGE(std::abs(r.value) <= 1e-8, tf.id << " " << r.value);
  }
}

TEST_CASE("zero test function and linearity") {
  const auto model = saint_venant();
  const auto init = perturbed(model, 0.1);
  const auto series = run(model, init, 16, 0.5);

  const auto zc = continuity_residual(model, series, init, zero_test_function(TestFunctionKind::continuity, 0.5));
  CHECK(zc.value == 0.0);
  const auto zm = momentum_residual(model, series, init, zero_test_function(TestFunctionKind::momentum, 0.5));
  CHECK(zm.value == 0.0);
  CHECK(zm.inconclusive);

  const auto c = continuity_test_functions(1.0, 0.5);
  const double a = 0.7;
  const double b = -2.3;
  const double lhs = continuity_residual(model, series, init, combine(a, c[0], b, c[3])).value;
  const double rhs = a * continuity_residual(model, series, init, c[0]).value +
                     b * continuity_residual(model, series, init, c[3]).value;
  CHECK(oracle::close(lhs, rhs, 1e-10, 1e-15));

  const auto m = momentum_test_functions(1.0, 0.5);
  const double mlhs = momentum_residual(model, series, init, combine(a, m[0], b, m[1])).value;
  const double mrhs = a * momentum_residual(model, series, init, m[0]).value +
                      b * momentum_residual(model, series, init, m[1]).value;
  CHECK(oracle::close(mlhs, mrhs, 1e-10, 1e-15));

  CHECK_THROWS_AS(combine(1.0, c[0], 1.0, m[0]), InvalidArgument);
}

TEST_CASE("residual preconditions") {
  const auto model = saint_venant();
  const auto init = perturbed(model, 0.1);
  const auto series = run(model, init, 8, 0.5);
  CHECK_THROWS_AS(continuity_residual(model, series, init, momentum_test_functions(1.0, 0.5)[0]),
                  InvalidArgument);
  CHECK_THROWS_AS(momentum_residual(model, series, init, momentum_test_functions(1.0, 0.7)[0]),
                  InvalidArgument);
  CHECK_THROWS_AS(continuity_residual(model, SnapshotSeries{}, init, continuity_test_functions(1.0, 0.0)[0]),
                  InvalidArgument);
}

TEST_CASE("perturbed residuals are small and resolved in time") {
  const auto model = saint_venant();
  const auto init = perturbed(model, 0.1);
  const auto series = run(model, init, 16, 1.0);
  for (const auto& tf : continuity_test_functions(1.0, 1.0)) {
    const auto r = continuity_residual(model, series, init, tf);
    CHECK(std::abs(r.value) < 0.05);
    // either resolved or honestly flagged
    CHECK((r.inconclusive || r.error_estimate < std::abs(r.value) / 10.0));
    CHECK(r.error_estimate < 1e-7);
  }
  // the dominant mode is resolved well below its size
  const auto r1 = continuity_residual(model, series, init, continuity_test_functions(1.0, 1.0)[0]);
  CHECK_FALSE(r1.inconclusive);
  CHECK(r1.error_estimate < 1e-2 * std::abs(r1.value));
  for (const auto& tf : momentum_test_functions(1.0, 1.0)) {
    const auto r = momentum_residual(model, series, init, tf);
    CHECK(std::abs(r.value) < 0.5);
  }
}

TEST_CASE("decay report") {
  const auto model = saint_venant();
  {
    const auto init = InitialData::constant_density(model, 1.0);
    const auto rep = decay_report(model, run(model, init, 16, 0.5), initial_bounds(model, init));
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.first_violation);
    for (std::size_t j = 0; j < rep.t.size(); ++j) {
      CHECK(std::abs(rep.E_n[j]) <= 1e-18);
      CHECK(std::abs(rep.W_n[j]) <= 1e-18);
      CHECK(std::abs(rep.E_cont[j]) <= 1e-14);
    }
  }
  const auto init = perturbed(model, 0.1);
  const auto bounds = initial_bounds(model, init);
  const auto rep = decay_report(model, run(model, init, 16, 1.0), bounds);
  CHECK(rep.violations == 0);
  CHECK(rep.W_average_ok);
  CHECK(rep.max_W_average <= bounds.W_bar + 1e-6);
  CHECK(rep.max_W_average > 0.0);
  CHECK(rep.W_average_bound == bounds.W_bar);
  for (std::size_t j = 1; j < rep.t.size(); ++j) {
    CHECK(rep.E_n_ok[j]);
    CHECK(rep.W_n_ok[j]);
  }
  CHECK(rep.slack_E == 1e-8);

  // a series whose energy rises is flagged
  auto bad = run(model, init, 8, 0.2);
  std::swap(bad.snapshots.front().functionals, bad.snapshots.back().functionals);
  const auto flagged = decay_report(model, bad, bounds);
  CHECK(flagged.violations > 0);
  REQUIRE(flagged.first_violation);
  CHECK(flagged.first_violation->find("E_n increased") != std::string::npos);
}

TEST_CASE("grid distance") {
  const std::vector<double> a(101, 1.0);
  std::vector<double> b(101);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = 1.0 + static_cast<double>(j) / 100.0;
  // || x ||_2 on [0, 1] = 1/sqrt(3), trapezoid adds h^2/6
  CHECK(grid_l2_distance(a, b, 1.0) == doctest::Approx(std::sqrt(1.0 / 3.0 + 1e-4 / 6.0)).epsilon(1e-12));
  CHECK(grid_l2_distance(a, a, 2.0) == 0.0);
  CHECK_THROWS_AS(grid_l2_distance(a, std::vector<double>(5, 0.0), 1.0), InvalidArgument);
}

TEST_CASE("convergence study on equilibrium data") {
  const auto model = saint_venant();
  const auto init = InitialData::constant_density(model, 1.0);
  IntegratorConfig cfg;
  cfg.snapshot_dt = 0.1;
  const auto rows = convergence_study(model, init, {16, 32}, 0.5, cfg, 257);
  REQUIRE(rows.size() == 2);
  // positions come from a root solve, so zero means roundoff level
  for (const auto& row : rows) {
    CHECK(row.ok);
    CHECK(row.mass_error <= 1e-12);
    CHECK(row.continuity_residual <= 1e-8);
    CHECK(row.momentum_residual <= 1e-8);
    CHECK(row.rho_distance <= 1e-10);
    CHECK(row.v_distance <= 1e-10);
    CHECK(row.rho_holder <= 1e-10);
    CHECK(row.v_holder <= 1e-9);
  }
  CHECK_THROWS_AS(convergence_study(model, init, {8, 4}, 0.5, cfg), InvalidArgument);
}

TEST_CASE("convergence study records failing entries and continues") {
  const auto model = saint_venant();
  auto init = InitialData::constant_density(model, 1.0);
  init.sine_velocity(0.1, 1);
  IntegratorConfig cfg;
  cfg.max_steps = 300;
  const auto rows = convergence_study(model, init, {2, 64}, 0.5, cfg, 65);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK(rows[1].error.find("stiffness") != std::string::npos);
}
