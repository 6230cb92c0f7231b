#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pflow/error.hpp"
#include "pflow/particles.hpp"

using namespace pflow;

namespace {

FluidModel saint_venant() { return make_preset(ModelKind::saint_venant, PresetParams{}, 1.0, 1.0); }

FluidModel ideal_gas() {
  PresetParams p;
  p.gamma = 1.4;
  p.visc_amplitude = 0.7;
  return make_preset(ModelKind::ideal_gas_entropy, p, 2.0, 1.5);
}

ParticleState equilibrium(std::size_t n, double L) {
  std::vector<double> x(n - 1);
  for (std::size_t i = 1; i < n; ++i) x[i - 1] = L * (1.0 - static_cast<double>(i) / static_cast<double>(n));
  return ParticleState(L, 0.0, x, std::vector<double>(n - 1, 0.0));
}

ParticleState random_state(std::mt19937_64& rng, double L, std::size_t n, double vmax) {
  std::uniform_real_distribution<double> width(0.4, 1.6);
  std::uniform_real_distribution<double> vel(-vmax, vmax);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& wi : w) total += (wi = width(rng));
  std::vector<double> x(n - 1);
  std::vector<double> v(n - 1);
  double pos = L;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pos -= L * w[i] / total;
    x[i] = pos;
    v[i] = vel(rng);
  }
  return ParticleState(L, 0.0, x, v);
}

// Move the state along its own right-hand side by s.
ParticleState shifted(const ParticleState& st, const StateDerivative& d, double s) {
  std::vector<double> x(st.x().begin(), st.x().end());
  std::vector<double> v(st.v().begin(), st.v().end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += s * d.dx[i];
    v[i] += s * d.dv[i];
  }
  return ParticleState(st.L(), st.t(), x, v);
}

}  // namespace

TEST_CASE("state layout and domain checks") {
  const ParticleState s(2.0, 0.5, {1.5, 0.25}, {0.1, -0.2});
  CHECK(s.n() == 3);
  CHECK(s.position(0) == 2.0);
  CHECK(s.position(3) == 0.0);
  CHECK(s.velocity(0) == 0.0);
  CHECK(s.velocity(3) == 0.0);
  CHECK(s.velocity(2) == -0.2);
  CHECK(s.spacing(1) == 0.5);
  CHECK(s.spacing(3) == 0.25);
  CHECK(s.in_domain());

  CHECK_FALSE(ParticleState(1.0, 0.0, {0.3, 0.6}, {0.0, 0.0}).in_domain());
  CHECK_FALSE(ParticleState(1.0, 0.0, {1.0}, {0.0}).in_domain());
  CHECK_FALSE(ParticleState(1.0, 0.0, {0.5}, {NAN}).in_domain());
  CHECK_THROWS_AS(ParticleState(1.0, 0.0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(ParticleState(1.0, 0.0, {0.5}, {}), InvalidArgument);

  const auto model = saint_venant();
  CHECK_THROWS_AS(rhs(model, ParticleState(1.0, 0.0, {0.3, 0.6}, {0.0, 0.0})), DomainError);
  CHECK_THROWS_AS(functionals(model, ParticleState(1.0, 0.0, {0.5}, {INFINITY})), DomainError);
}

TEST_CASE("right-hand side examples") {
  const auto model = saint_venant();
  const auto eq = rhs(model, equilibrium(4, 1.0));
  for (double dv : eq.dv) CHECK(dv == 0.0);
  for (double dx : eq.dx) CHECK(dx == 0.0);

  const auto pressure = rhs(model, ParticleState(1.0, 0.0, {0.4}, {0.0}));
  CHECK(pressure.dv[0] == doctest::Approx(9.81 * (1.0 / 0.64 - 1.0 / 1.44)).epsilon(1e-13));
  CHECK(pressure.dv[0] == doctest::Approx(8.5156).epsilon(1e-4));

  const auto viscous = rhs(model, ParticleState(1.0, 0.0, {0.5}, {1.0}));
  CHECK(viscous.dv[0] == doctest::Approx(-8.0).epsilon(1e-14));
  CHECK(viscous.dx[0] == 1.0);

  for (std::size_t n : {2u, 7u, 33u}) {
    const auto d = rhs(ideal_gas(), equilibrium(n, 1.5));
    for (double dv : d.dv) CHECK(std::abs(dv) <= 1e-9);
  }
}

TEST_CASE("right-hand side is bit-reproducible") {
  std::mt19937_64 rng(7);
  const auto model = ideal_gas();
  const auto s = random_state(rng, 1.5, 40, 1.0);
  const auto a = rhs(model, s);
  const auto b = rhs(model, s);
  CHECK(a.dv == b.dv);
  CHECK(a.dx == b.dx);
}

TEST_CASE("functional examples") {
  const auto model = saint_venant();
  const auto eq = functionals(model, equilibrium(16, 1.0));
  CHECK(eq.E_n == 0.0);
  CHECK(eq.W_n == 0.0);
  CHECK(eq.Z_n == 0.0);
  CHECK(eq.H_n == 0.0);
  CHECK_FALSE(eq.rounding_flag);

  const auto f = functionals(model, ParticleState(1.0, 0.0, {0.5}, {1.0}));
  CHECK(f.E_n == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f.Z_n == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.W_n == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f.H_n == 0.0);
  REQUIRE(f.w.size() == 1);
  CHECK(f.w[0] == 1.0);
}

TEST_CASE("potential sum equals the particle-potential form") {
  std::mt19937_64 rng(11);
  for (const auto& model : {saint_venant(), ideal_gas()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + trial * 3;
      const auto s = random_state(rng, model.L(), n, 0.0);
      double phi_sum = 0.0;
      for (std::size_t i = 1; i <= n; ++i) phi_sum += phi(model, static_cast<double>(n) * s.spacing(i));
      phi_sum *= model.m() / static_cast<double>(n);
      const auto f = functionals(model, s);
      CHECK(oracle::close(f.E_n, phi_sum, 1e-9, 1e-13));
      CHECK(f.W_n >= f.E_n);  // zero velocities: W adds only the viscous jumps
    }
  }
}

TEST_CASE("energy identities along the flow") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> count(2, 40);
  int checked = 0;
  for (const auto& model : {saint_venant(), ideal_gas()}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = random_state(rng, model.L(), count(rng), 1.0);
      const auto d = rhs(model, s);
      // unit-speed directional derivative; step scaled to the field size
      double scale = 0.0;
      for (std::size_t i = 0; i < d.dv.size(); ++i) scale = std::max({scale, std::abs(d.dv[i]), std::abs(d.dx[i])});
      const double h = 1e-3 / std::max(1.0, scale) * s.spacing(1);
      // five-point stencil along the flow direction
      auto along = [&](double t) { return functionals(model, shifted(s, d, t)); };
      const auto p2 = along(2.0 * h);
      const auto p1 = along(h);
      const auto m1 = along(-h);
      const auto m2 = along(-2.0 * h);
      const double dE = (-p2.E_n + 8.0 * p1.E_n - 8.0 * m1.E_n + m2.E_n) / (12.0 * h);
      const double dW = (-p2.W_n + 8.0 * p1.W_n - 8.0 * m1.W_n + m2.W_n) / (12.0 * h);
      const double exact_E = energy_dissipation(model, s);
      const double exact_W = modified_energy_dissipation(model, s);
      CHECK(exact_E <= 0.0);
      CHECK(exact_W <= 0.0);
      CHECK(oracle::close(dE, exact_E, 1e-6, 1e-9));
      CHECK_MESSAGE(oracle::close(dW, exact_W, 1e-6, 1e-9), dW << " vs " << exact_W);
      ++checked;
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("viscous jump bound holds on random states") {
  std::mt19937_64 rng(99);
  for (const auto& model : {saint_venant(), ideal_gas()}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto s = random_state(rng, model.L(), 2 + trial % 50, 3.0);
      const auto f = functionals(model, s);
      const double bound = 2.0 / model.m() * std::pow(std::sqrt(f.W_n) + std::sqrt(f.E_n), 2);
      CHECK(viscous_jump_energy(model, s) <= bound * (1.0 + 1e-12));
      CHECK(f.Z_n >= 0.0);
      CHECK(f.H_n >= 0.0);
    }
  }
}

TEST_CASE("cell densities") {
  const auto model = saint_venant();
  const auto rho = cell_densities(model, ParticleState(1.0, 0.0, {0.75, 0.25}, {0.0, 0.0}));
  REQUIRE(rho.size() == 3);
  CHECK(rho[0] == doctest::Approx(4.0 / 3.0));
  CHECK(rho[1] == doctest::Approx(2.0 / 3.0));
  CHECK(rho[2] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("spacing bounds") {
  const auto sv = saint_venant();
  const auto zero = spacing_bounds(sv, 0.0, 0.0);
  CHECK(zero.a == 1.0);
  CHECK(zero.b == 1.0);

  const auto b = spacing_bounds(sv, 0.01, 0.01);
  CHECK(b.budget == doctest::Approx(0.2));
  CHECK(f_envelope(sv, sv.m() / b.a) == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(f_envelope(sv, sv.m() / b.b) == doctest::Approx(-0.2).epsilon(1e-8));
  CHECK(b.a > 0.0);
  CHECK(b.a <= sv.L());
  CHECK(b.b >= sv.L());

  const auto ig = spacing_bounds(ideal_gas(), 50.0, 80.0);
  CHECK(std::isfinite(ig.a));
  CHECK(std::isfinite(ig.b));
  CHECK(ig.a > 0.0);

  try {
    spacing_bounds(sv, 100.0, 100.0);
    FAIL("expected an admissibility error");
  } catch (const AdmissibilityError& e) {
    CHECK(std::string(e.what()).find("low-density") != std::string::npos);
  }
  CHECK_THROWS_AS(spacing_bounds(sv, -1.0, 0.0), InvalidArgument);
}
