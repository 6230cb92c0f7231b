#include "pflow/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pflow/error.hpp"
#include "pflow/quadrature.hpp"

namespace pflow {

namespace {

constexpr double kPi = std::numbers::pi;

void require_table(const std::vector<double>& x, const std::vector<double>& y, double L,
                   const char* what) {
  if (x.size() < 2 || x.size() != y.size()) {
    throw InvalidArgument(std::string(what) + " table needs matching x/value arrays of length >= 2");
  }
  if (std::abs(x.front()) > 1e-12 * L || std::abs(x.back() - L) > 1e-12 * L) {
    throw InvalidArgument(std::string(what) + " table must span exactly [0, L]");
  }
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (!(x[j] > x[j - 1])) {
      throw InvalidArgument(std::string(what) + " table abscissae must be strictly increasing");
    }
  }
  for (double value : y) {
    if (!std::isfinite(value)) throw InvalidArgument(std::string(what) + " table has non-finite values");
  }
}

std::function<double(double)> linear_interpolant(std::vector<double> x, std::vector<double> y) {
  return [x = std::move(x), y = std::move(y)](double q) {
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (q - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + w * (y[j] - y[j - 1]);
  };
}

}  // namespace

InitialData InitialData::constant_density(const FluidModel& model, double value) {
  InitialData d;
  d.L_ = model.L();
  d.m_ = model.m();
  d.rho_ = [value](double) { return value; };
  d.mass_ = [value](double x) { return value * x; };
  d.rho_sup_ = value;
  d.rho_min_ = value;
  d.rho_deriv_sup_ = 0.0;
  d.finish_density(model);
  d.zero_velocity();
  return d;
}

InitialData InitialData::cosine_density(const FluidModel& model, double amplitude, int mode) {
  if (!(std::abs(amplitude) < 1.0) || mode < 1) {
    throw InvalidArgument("cosine density needs |amplitude| < 1 and mode >= 1");
  }
  InitialData d;
  d.L_ = model.L();
  d.m_ = model.m();
  const double rs = model.rho_star();
  const double L = model.L();
  const double wave = mode * kPi / L;
  d.rho_ = [=](double x) { return rs * (1.0 + amplitude * std::cos(wave * x)); };
  d.mass_ = [=](double x) { return rs * (x + amplitude * std::sin(wave * x) / wave); };
  d.rho_sup_ = rs * (1.0 + std::abs(amplitude));
  d.rho_min_ = rs * (1.0 - std::abs(amplitude));
  d.rho_deriv_sup_ = rs * std::abs(amplitude) * wave;
  d.finish_density(model);
  d.zero_velocity();
  return d;
}

InitialData InitialData::table_density(const FluidModel& model, std::vector<double> x,
                                       std::vector<double> rho) {
  require_table(x, rho, model.L(), "rho0");
  InitialData d;
  d.L_ = model.L();
  d.m_ = model.m();
  x.front() = 0.0;
  x.back() = model.L();

  // Exact cumulative mass of the piecewise-linear profile at the nodes.
  std::vector<double> cum(x.size(), 0.0);
  double slope_sup = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double h = x[j] - x[j - 1];
    cum[j] = cum[j - 1] + 0.5 * h * (rho[j] + rho[j - 1]);
    slope_sup = std::max(slope_sup, std::abs(rho[j] - rho[j - 1]) / h);
  }
  d.rho_sup_ = *std::max_element(rho.begin(), rho.end());
  d.rho_min_ = *std::min_element(rho.begin(), rho.end());
  d.rho_deriv_sup_ = slope_sup;
  d.rho_ = linear_interpolant(x, rho);
  d.mass_ = [x, rho, cum](double q) {
    if (q <= 0.0) return 0.0;
    if (q >= x.back()) return cum.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double h = q - x[j - 1];
    const double slope = (rho[j] - rho[j - 1]) / (x[j] - x[j - 1]);
    return cum[j - 1] + h * rho[j - 1] + 0.5 * slope * h * h;
  };
  d.finish_density(model);
  d.zero_velocity();
  return d;
}

InitialData InitialData::function_density(const FluidModel& model,
                                          std::function<double(double)> rho,
                                          std::function<double(double)> rho_prime) {
  if (!rho) throw InvalidArgument("function_density needs a density function");
  InitialData d;
  d.L_ = model.L();
  d.m_ = model.m();
  d.rho_ = std::move(rho);

  const std::size_t N = kSamplePoints;
  const double h = d.L_ / static_cast<double>(N);
  double sup = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  double deriv = 0.0;
  double prev = d.rho_(0.0);
  for (std::size_t j = 0; j <= N; ++j) {
    const double x = std::min(d.L_, static_cast<double>(j) * h);
    const double r = d.rho_(x);
    sup = std::max(sup, r);
    min = std::min(min, r);
    if (rho_prime) {
      deriv = std::max(deriv, std::abs(rho_prime(x)));
    } else if (j > 0) {
      deriv = std::max(deriv, std::abs(r - prev) / h);
    }
    prev = r;
  }
  d.rho_sup_ = sup;
  d.rho_min_ = min;
  d.rho_deriv_sup_ = deriv;
  d.finish_density(model);
  d.zero_velocity();
  return d;
}

void InitialData::finish_density(const FluidModel& model) {
  if (!(rho_min_ >= 0.0)) {
    throw InvalidArgument("initial density must be nonnegative everywhere");
  }
  const double total = cumulative_mass(L_);
  if (std::abs(total - model.m()) > 1e-8 * model.m()) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "initial density integrates to " << total << " but the model mass is " << model.m();
    throw NormalizationError(msg.str());
  }
}

double InitialData::cumulative_mass(double x) const {
  if (x <= 0.0) return 0.0;
  x = std::min(x, L_);
  if (mass_) return mass_(x);
  return integrate(rho_, 0.0, x, {1e-13, 1e-15}).value;
}

InitialData& InitialData::zero_velocity() {
  v_ = [](double) { return 0.0; };
  v_deriv_l2_ = 0.0;
  return *this;
}

InitialData& InitialData::sine_velocity(double amplitude, int mode) {
  if (!std::isfinite(amplitude) || mode < 1) {
    throw InvalidArgument("sine velocity needs a finite amplitude and mode >= 1");
  }
  const double L = L_;
  const double wave = mode * kPi / L;
  v_ = [=](double x) { return (x <= 0.0 || x >= L) ? 0.0 : amplitude * std::sin(wave * x); };
  v_deriv_l2_ = std::abs(amplitude) * wave * std::sqrt(0.5 * L);
  return *this;
}

InitialData& InitialData::table_velocity(std::vector<double> x, std::vector<double> v) {
  require_table(x, v, L_, "v0");
  if (v.front() != 0.0 || v.back() != 0.0) {
    throw InvalidArgument("v0 must vanish at x = 0 and x = L");
  }
  x.front() = 0.0;
  x.back() = L_;
  double sq = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double h = x[j] - x[j - 1];
    const double slope = (v[j] - v[j - 1]) / h;
    sq += slope * slope * h;
  }
  v_deriv_l2_ = std::sqrt(sq);
  v_ = linear_interpolant(std::move(x), std::move(v));
  return *this;
}

InitialData& InitialData::function_velocity(std::function<double(double)> v,
                                            std::function<double(double)> v_prime) {
  if (!v) throw InvalidArgument("function_velocity needs a velocity function");
  if (v(0.0) != 0.0 || v(L_) != 0.0) {
    throw InvalidArgument("v0 must vanish at x = 0 and x = L");
  }
  v_ = std::move(v);
  sample_velocity_norm(v_prime);
  return *this;
}

void InitialData::sample_velocity_norm(const std::function<double(double)>& v_prime) {
  // Trapezoid over kSamplePoints cells; slopes of the samples when no
  // derivative is supplied (midpoint values, so the sum is cellwise).
  const std::size_t N = kSamplePoints;
  const double h = L_ / static_cast<double>(N);
  double sq = 0.0;
  if (v_prime) {
    for (std::size_t j = 0; j <= N; ++j) {
      const double d = v_prime(std::min(L_, static_cast<double>(j) * h));
      sq += (j == 0 || j == N ? 0.5 : 1.0) * d * d * h;
    }
  } else {
    double prev = v_(0.0);
    for (std::size_t j = 1; j <= N; ++j) {
      const double cur = v_(std::min(L_, static_cast<double>(j) * h));
      const double d = (cur - prev) / h;
      sq += d * d * h;
      prev = cur;
    }
  }
  v_deriv_l2_ = std::sqrt(sq);
}

ParticleState build_particles(const FluidModel& model, const InitialData& init, std::size_t n) {
  if (n < 2) throw InvalidArgument("build_particles: n must be at least 2");
  const double L = model.L();
  const double m = model.m();
  const double nd = static_cast<double>(n);
  std::vector<double> x(n - 1);
  std::vector<double> v(n - 1);

  double upper = L;
  for (std::size_t i = 1; i < n; ++i) {
    const double target = m * static_cast<double>(n - i) / nd;
    double lo = 0.0;
    double hi = upper;
    // bisect down to neighbouring doubles
    for (;;) {
      const double mid = lo + 0.5 * (hi - lo);
      if (!(mid > lo && mid < hi)) break;
      if (init.cumulative_mass(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double miss_lo = std::abs(init.cumulative_mass(lo) - target);
    const double miss_hi = std::abs(init.cumulative_mass(hi) - target);
    x[i - 1] = miss_lo < miss_hi ? lo : hi;
    v[i - 1] = init.v0(x[i - 1]);
    upper = x[i - 1];
  }
  ParticleState state(L, 0.0, std::move(x), std::move(v));
  state.require_in_domain();
  return state;
}

InitialBounds initial_bounds(const FluidModel& model, const InitialData& init) {
  const double rho_min = init.rho_min();
  if (!(rho_min > 0.0)) {
    throw InvalidArgument("initial density must be strictly positive for the energy bounds");
  }
  const double m = model.m();
  const double L = model.L();
  const double s_lo = m / init.rho0_sup();
  const double s_hi = m / rho_min;

  InitialBounds b;
  b.rho_min = rho_min;
  constexpr int kSamples = 10'000;
  for (int j = 0; j < kSamples; ++j) {
    const double s = (s_hi == s_lo) ? s_lo : s_lo + (s_hi - s_lo) * j / (kSamples - 1);
    b.M_bar = std::max(b.M_bar, cap_k_prime(model, s));
  }

  const double vn2 = init.v0_deriv_l2() * init.v0_deriv_l2();
  const double rd = init.rho0_deriv_sup();
  const double potential = m * phi(model, s_lo);
  const double rmin3 = rho_min * rho_min * rho_min;
  b.E_bar = 0.5 * m * L * vn2 + potential;
  b.Z_bar = 0.5 * vn2;
  b.A_bar = 2.0 * m * m * b.M_bar * rd / rmin3;
  b.W_bar = m * L * vn2 + 2.0 * std::pow(m, 5) * b.M_bar * b.M_bar * rd * rd / (rmin3 * rmin3) +
            potential;
  return b;
}

AdmissibilityReport admissibility(const FluidModel& model, const InitialData& init) {
  AdmissibilityReport report;
  report.bounds = initial_bounds(model, init);
  report.limits = f_envelope_limits(model);
  report.lhs = std::sqrt(report.bounds.W_bar) + std::sqrt(report.bounds.E_bar);
  report.admissible = report.lhs < report.limits.threshold();
  if (report.admissible) {
    report.spacing = spacing_bounds(model, report.limits, report.bounds.E_bar, report.bounds.W_bar);
  }
  return report;
}

}  // namespace pflow
