#include "pflow/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "pflow/error.hpp"
#include "pflow/quadrature.hpp"

namespace pflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre, 3 points on [-1, 1].
constexpr std::array<double, 3> kNodes = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// f(x, rho, v, v_x) integrated over [0, L] cell by cell.
template <typename Integrand>
double gauss3_over_cells(const ReconstructedField& field, Integrand&& f) {
  const auto& e = field.edges();
  const auto& r = field.node_rho();
  const auto& v = field.node_v();
  double total = 0.0;
  for (std::size_t i = 1; i <= field.n(); ++i) {
    const double lo = e[i];
    const double hi = e[i - 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double rs = field.rho_slope(i);
    const double vs = field.v_slope(i);
    double cell = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const double x = mid + half * kNodes[q];
      const double off = x - lo;
      cell += kWeights[q] * f(x, r[i] + rs * off, v[i] + vs * off, vs);
    }
    total += half * cell;
  }
  return total;
}

void require_compatible(const SnapshotSeries& series, const TestFunction& tf,
                        TestFunctionKind kind) {
  if (series.snapshots.empty()) throw InvalidArgument("residual: empty snapshot series");
  if (tf.kind != kind) throw InvalidArgument("residual: test function '" + tf.id + "' has the wrong kind");
  if (std::abs(tf.T - series.T) > 1e-12 * std::max(1.0, series.T)) {
    throw InvalidArgument("residual: test-function horizon differs from the series horizon");
  }
}

// Simpson on the full cadence plus a Richardson estimate from every other
// snapshot.
std::pair<double, double> time_integral(const std::vector<double>& t, const std::vector<double>& g) {
  const double full = simpson(t, g);
  if (t.size() < 5) return {full, std::abs(full)};
  std::vector<double> th;
  std::vector<double> gh;
  for (std::size_t j = 0; j < t.size(); j += 2) {
    th.push_back(t[j]);
    gh.push_back(g[j]);
  }
  if (th.back() != t.back()) {
    th.push_back(t.back());
    gh.push_back(g.back());
  }
  const double coarse = simpson(th, gh);
  return {full, std::abs(full - coarse) / 15.0};
}

template <typename SpaceIntegrand>
ResidualReport residual(const FluidModel& model, const SnapshotSeries& series,
                        const TestFunction& tf, double initial, double initial_error,
                        SpaceIntegrand&& integrand) {
  std::vector<double> t;
  std::vector<double> g;
  t.reserve(series.snapshots.size());
  g.reserve(series.snapshots.size());
  for (const auto& snap : series.snapshots) {
    const double time = snap.state.t();
    const auto field = reconstruct(model, snap.state);
    t.push_back(time);
    g.push_back(gauss3_over_cells(field, [&](double x, double rho, double v, double v_x) {
      return integrand(time, x, rho, v, v_x);
    }));
  }
  const auto [integral, err] = time_integral(t, g);

  ResidualReport report;
  report.value = initial + integral;
  report.error_estimate = err + initial_error;
  report.n = series.snapshots.front().state.n();
  report.test_function = tf.id;
  report.inconclusive = !(report.error_estimate < std::abs(report.value) / 10.0);
  return report;
}

TestFunction make_tf(std::string id, TestFunctionKind kind, double T,
                     std::function<double(double)> g, std::function<double(double)> gp,
                     std::function<double(double)> gpp) {
  // phi(t, x) = (1 - t/T) g(x)
  TestFunction tf;
  tf.id = std::move(id);
  tf.kind = kind;
  tf.T = T;
  tf.phi = [=](double t, double x) { return (1.0 - t / T) * g(x); };
  tf.phi_t = [=](double, double x) { return -g(x) / T; };
  tf.phi_x = [=](double t, double x) { return (1.0 - t / T) * gp(x); };
  tf.phi_xx = [=](double t, double x) { return (1.0 - t / T) * gpp(x); };
  return tf;
}

}  // namespace

std::vector<TestFunction> continuity_test_functions(double L, double T) {
  std::vector<TestFunction> out;
  for (int k = 1; k <= 3; ++k) {
    const double w = k * kPi / L;
    out.push_back(make_tf(
        "cont_sin" + std::to_string(k), TestFunctionKind::continuity, T,
        [w](double x) { return std::sin(w * x); }, [w](double x) { return w * std::cos(w * x); },
        [w](double x) { return -w * w * std::sin(w * x); }));
  }
  out.push_back(make_tf(
      "cont_x2", TestFunctionKind::continuity, T, [](double x) { return x * x; },
      [](double x) { return 2.0 * x; }, [](double) { return 2.0; }));
  return out;
}

std::vector<TestFunction> momentum_test_functions(double L, double T) {
  std::vector<TestFunction> out;
  out.push_back(make_tf(
      "mom_poly", TestFunctionKind::momentum, T,
      [L](double x) {
        const double s = x / L;
        return s * (1.0 - s) * (1.0 - s);
      },
      [L](double x) {
        const double s = x / L;
        return (1.0 - s) * (1.0 - 3.0 * s) / L;
      },
      [L](double x) {
        const double s = x / L;
        return (6.0 * s - 4.0) / (L * L);
      }));
  out.push_back(make_tf(
      "mom_sin2", TestFunctionKind::momentum, T,
      [L](double x) {
        const double s = x / L;
        const double sn = std::sin(kPi * s);
        return sn * sn * (1.0 - s);
      },
      [L](double x) {
        const double s = x / L;
        const double sn = std::sin(kPi * s);
        return (kPi * std::sin(2.0 * kPi * s) * (1.0 - s) - sn * sn) / L;
      },
      [L](double x) {
        const double s = x / L;
        return (2.0 * kPi * kPi * std::cos(2.0 * kPi * s) * (1.0 - s) -
                2.0 * kPi * std::sin(2.0 * kPi * s)) /
               (L * L);
      }));
  return out;
}

TestFunction zero_test_function(TestFunctionKind kind, double T) {
  TestFunction tf;
  tf.id = "zero";
  tf.kind = kind;
  tf.T = T;
  tf.phi = tf.phi_t = tf.phi_x = tf.phi_xx = [](double, double) { return 0.0; };
  return tf;
}

TestFunction combine(double alpha, const TestFunction& f, double beta, const TestFunction& g) {
  if (f.kind != g.kind || f.T != g.T) {
    throw InvalidArgument("combine: test functions differ in kind or horizon");
  }
  auto mix = [alpha, beta](const TestFunction::Field& a, const TestFunction::Field& b) {
    return [=](double t, double x) { return alpha * a(t, x) + beta * b(t, x); };
  };
  TestFunction out;
  std::ostringstream id;
  id << alpha << "*" << f.id << "+" << beta << "*" << g.id;
  out.id = id.str();
  out.kind = f.kind;
  out.T = f.T;
  out.phi = mix(f.phi, g.phi);
  out.phi_t = mix(f.phi_t, g.phi_t);
  out.phi_x = mix(f.phi_x, g.phi_x);
  out.phi_xx = mix(f.phi_xx, g.phi_xx);
  return out;
}

double max_constraint_violation(const TestFunction& tf, double L, std::size_t probes,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ut(0.0, tf.T);
  std::uniform_real_distribution<double> ux(0.0, L);
  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    const double t = ut(rng);
    const double x = ux(rng);
    worst = std::max(worst, std::abs(tf.phi(tf.T, x)));
    if (tf.kind == TestFunctionKind::momentum) {
      worst = std::max({worst, std::abs(tf.phi(t, 0.0)), std::abs(tf.phi(t, L)),
                        std::abs(tf.phi_x(t, L))});
    }
  }
  return worst;
}

double simpson(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidArgument("simpson: size mismatch");
  const std::size_t N = t.size();
  if (N < 2) return 0.0;
  if (N == 2) return 0.5 * (t[1] - t[0]) * (y[0] + y[1]);

  const std::size_t intervals = N - 1;
  const std::size_t paired = intervals - intervals % 2;
  double total = 0.0;
  for (std::size_t j = 0; j < paired; j += 2) {
    const double h0 = t[j + 1] - t[j];
    const double h1 = t[j + 2] - t[j + 1];
    const double s = h0 + h1;
    total += s / 6.0 *
             ((2.0 - h1 / h0) * y[j] + s * s / (h0 * h1) * y[j + 1] + (2.0 - h0 / h1) * y[j + 2]);
  }
  if (paired < intervals) {
    // Last interval [t_{N-2}, t_{N-1}] from the parabola through the last three points.
    const double h0 = t[N - 2] - t[N - 3];
    const double h1 = t[N - 1] - t[N - 2];
    total += y[N - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1)) +
             y[N - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0) -
             y[N - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  }
  return total;
}

ResidualReport continuity_residual(const FluidModel& model, const SnapshotSeries& series,
                                   const InitialData& init, const TestFunction& tf) {
  require_compatible(series, tf, TestFunctionKind::continuity);
  const auto init_q = integrate([&](double x) { return tf.phi(0.0, x) * init.rho0(x); }, 0.0,
                                model.L(), {1e-13, 1e-16});
  return residual(model, series, tf, init_q.value, init_q.error,
                  [&](double t, double x, double rho, double v, double) {
                    return rho * (tf.phi_t(t, x) + v * tf.phi_x(t, x));
                  });
}

ResidualReport momentum_residual(const FluidModel& model, const SnapshotSeries& series,
                                 const InitialData& init, const TestFunction& tf) {
  require_compatible(series, tf, TestFunctionKind::momentum);
  const auto init_q = integrate(
      [&](double x) { return tf.phi(0.0, x) * init.rho0(x) * init.v0(x); }, 0.0, model.L(),
      {1e-13, 1e-16});
  return residual(model, series, tf, init_q.value, init_q.error,
                  [&](double t, double x, double rho, double v, double v_x) {
                    const double q = rho * v * v + model.P(rho) - model.mu(rho) * v_x;
                    return tf.phi_t(t, x) * rho * v + tf.phi_x(t, x) * q;
                  });
}

DecayReport decay_report(const FluidModel& model, const SnapshotSeries& series,
                         const InitialBounds& bounds) {
  if (series.snapshots.empty()) throw InvalidArgument("decay_report: empty series");
  DecayReport r;
  for (const auto& snap : series.snapshots) {
    const auto field = reconstruct(model, snap.state);
    r.t.push_back(snap.state.t());
    r.E_n.push_back(snap.functionals.E_n);
    r.W_n.push_back(snap.functionals.W_n);
    r.E_cont.push_back(continuous_E(model, field));
    r.W_cont.push_back(continuous_W(model, field));
  }
  r.slack_E = 1e-8 * std::max(1.0, r.E_n.front());
  r.slack_W = 1e-8 * std::max(1.0, r.W_n.front());
  const double slack_cont = 1e-8 * std::max(1.0, r.E_cont.front());

  const std::size_t S = r.t.size();
  r.E_n_ok.assign(S, true);
  r.W_n_ok.assign(S, true);
  r.E_cont_ok.assign(S, true);
  auto note = [&](const std::string& what, std::size_t j) {
    ++r.violations;
    if (!r.first_violation) {
      std::ostringstream msg;
      msg << what << " at t = " << r.t[j];
      r.first_violation = msg.str();
    }
  };
  for (std::size_t j = 1; j < S; ++j) {
    if (r.E_n[j] > r.E_n[j - 1] + r.slack_E) {
      r.E_n_ok[j] = false;
      note("E_n increased", j);
    }
    if (r.W_n[j] > r.W_n[j - 1] + r.slack_W) {
      r.W_n_ok[j] = false;
      note("W_n increased", j);
    }
    r.E_cont_ok[j] = r.E_cont[j] <= r.E_cont[j - 1] + slack_cont;
  }

  // Window averages (1/h) int_t^{t+h} W ds over snapshot pairs, trapezoid in time.
  std::vector<double> cum(S, 0.0);
  for (std::size_t j = 1; j < S; ++j) {
    cum[j] = cum[j - 1] + 0.5 * (r.t[j] - r.t[j - 1]) * (r.W_cont[j] + r.W_cont[j - 1]);
  }
  r.max_W_average = *std::max_element(r.W_cont.begin(), r.W_cont.end());
  for (std::size_t j = 0; j < S; ++j) {
    for (std::size_t k = j + 1; k < S; ++k) {
      r.max_W_average = std::max(r.max_W_average, (cum[k] - cum[j]) / (r.t[k] - r.t[j]));
    }
  }
  r.W_average_bound = bounds.W_bar;
  r.W_average_ok = r.max_W_average <= bounds.W_bar + 1e-6;
  if (!r.W_average_ok) {
    ++r.violations;
    if (!r.first_violation) r.first_violation = "time-averaged W exceeds its bound";
  }
  return r;
}

double grid_l2_distance(const std::vector<double>& a, const std::vector<double>& b, double L) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("grid_l2_distance: bad grids");
  const double h = L / static_cast<double>(a.size() - 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += (j == 0 || j + 1 == a.size() ? 0.5 : 1.0) * d * d;
  }
  return std::sqrt(sum * h);
}

std::vector<ConvergenceRow> convergence_study(const FluidModel& model, const InitialData& init,
                                              const std::vector<std::size_t>& n_list, double T,
                                              const IntegratorConfig& cfg,
                                              std::size_t grid_points) {
  if (n_list.empty()) throw InvalidArgument("convergence_study: empty n list");
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw InvalidArgument("convergence_study: n list must be ascending");
  }

  struct Run {
    std::optional<SnapshotSeries> series;
    std::vector<FieldSamples> samples;
    std::string error;
  };
  std::map<std::size_t, Run> runs;
  auto run_for = [&](std::size_t n) -> Run& {
    auto it = runs.find(n);
    if (it != runs.end()) return it->second;
    Run run;
    try {
      const auto state0 = build_particles(model, init, n);
      run.series = simulate(model, state0, T, cfg);
      for (const auto& snap : run.series->snapshots) {
        run.samples.push_back(sample_field(reconstruct(model, snap.state), grid_points));
      }
    } catch (const Error& e) {
      run.error = std::string(e.kind()) + ": " + e.what();
    }
    return runs.emplace(n, std::move(run)).first->second;
  };

  const auto cont_tfs = continuity_test_functions(model.L(), T);
  const auto mom_tfs = momentum_test_functions(model.L(), T);

  std::vector<ConvergenceRow> rows;
  for (std::size_t n : n_list) {
    ConvergenceRow row;
    row.n = n;
    Run& run = run_for(n);
    if (!run.series) {
      row.ok = false;
      row.error = run.error;
      rows.push_back(row);
      continue;
    }
    const auto& series = *run.series;
    row.stats = series.stats;
    try {
      for (const auto& snap : series.snapshots) {
        const auto field = reconstruct(model, snap.state);
        row.mass_error = std::max(row.mass_error, std::abs(total_mass(field) - model.m()));
        row.E_gap = std::max(row.E_gap, std::abs(continuous_E(model, field) - snap.functionals.E_n));
        row.W_gap = std::max(row.W_gap, std::abs(continuous_W(model, field) - snap.functionals.W_n));
      }
      for (const auto& tf : cont_tfs) {
        row.continuity_residual =
            std::max(row.continuity_residual, std::abs(continuity_residual(model, series, init, tf).value));
      }
      for (const auto& tf : mom_tfs) {
        row.momentum_residual =
            std::max(row.momentum_residual, std::abs(momentum_residual(model, series, init, tf).value));
      }
      const std::size_t S = run.samples.size();
      for (std::size_t j = 0; j < S; ++j) {
        for (std::size_t k = j + 1; k < S; ++k) {
          const double dt = series.snapshots[k].state.t() - series.snapshots[j].state.t();
          row.rho_holder = std::max(
              row.rho_holder,
              grid_l2_distance(run.samples[k].rho, run.samples[j].rho, model.L()) / std::sqrt(dt));
          row.v_holder = std::max(
              row.v_holder,
              grid_l2_distance(run.samples[k].v, run.samples[j].v, model.L()) / std::pow(dt, 0.25));
        }
      }

      Run& fine = run_for(2 * n);
      if (!fine.series) {
        row.rho_distance = row.v_distance = std::numeric_limits<double>::quiet_NaN();
      } else {
        if (fine.samples.size() != S) throw InvalidArgument("snapshot grids of n and 2n differ");
        for (std::size_t j = 0; j < S; ++j) {
          row.rho_distance = std::max(
              row.rho_distance, grid_l2_distance(fine.samples[j].rho, run.samples[j].rho, model.L()));
          row.v_distance = std::max(
              row.v_distance, grid_l2_distance(fine.samples[j].v, run.samples[j].v, model.L()));
        }
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = std::string(e.kind()) + ": " + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pflow
