#include "pflow/fluid_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pflow/error.hpp"

namespace pflow {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite (got " << value << ")";
    throw InvalidArgument(msg.str());
  }
}

// Integral of s^(p-1) over [a, b], a, b > 0.
double power_integral(double p, double a, double b) {
  const double log_ratio = std::log(b / a);
  if (p == 0.0) return log_ratio;
  return std::pow(a, p) * std::expm1(p * log_ratio) / p;
}

std::function<double(double)> central_first(std::function<double(double)> f) {
  return [f = std::move(f)](double x) {
    const double h = 1e-5 * x;
    return (f(x + h) - f(x - h)) / (2.0 * h);
  };
}

std::function<double(double)> central_second(std::function<double(double)> f) {
  return [f = std::move(f)](double x) {
    const double h = 1e-4 * x;
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
  };
}

CustomLaws laws_from_power(const PowerLaws& p) {
  CustomLaws laws;
  laws.P = [p](double r) { return p.coef * std::pow(r, p.exponent); };
  laws.P_prime = [p](double r) { return p.coef * p.exponent * std::pow(r, p.exponent - 1.0); };
  laws.P_double_prime = [p](double r) {
    return p.coef * p.exponent * (p.exponent - 1.0) * std::pow(r, p.exponent - 2.0);
  };
  laws.mu = [p](double r) { return p.visc_coef * std::pow(r, p.visc_exponent); };
  laws.mu_prime = [p](double r) {
    return p.visc_coef * p.visc_exponent * std::pow(r, p.visc_exponent - 1.0);
  };
  laws.mu_double_prime = [p](double r) {
    return p.visc_coef * p.visc_exponent * (p.visc_exponent - 1.0) *
           std::pow(r, p.visc_exponent - 2.0);
  };
  return laws;
}

void check_mass_and_length(double m, double L) {
  require_positive(m, "mass m");
  require_positive(L, "domain length L");
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::isentropic_gas: return "isentropic_gas";
    case ModelKind::ideal_gas_entropy: return "ideal_gas_entropy";
    case ModelKind::saint_venant: return "saint_venant";
    case ModelKind::custom: return "custom";
  }
  return "custom";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "isentropic_gas") return ModelKind::isentropic_gas;
  if (name == "ideal_gas_entropy") return ModelKind::ideal_gas_entropy;
  if (name == "saint_venant") return ModelKind::saint_venant;
  if (name == "custom") return ModelKind::custom;
  throw InvalidArgument("unknown model kind '" + name + "'");
}

double FluidModel::P(double rho) const { return laws_.P(rho); }
double FluidModel::P_prime(double rho) const { return laws_.P_prime(rho); }
double FluidModel::P_double_prime(double rho) const { return laws_.P_double_prime(rho); }
double FluidModel::mu(double rho) const { return laws_.mu(rho); }
double FluidModel::mu_prime(double rho) const { return laws_.mu_prime(rho); }
double FluidModel::mu_double_prime(double rho) const { return laws_.mu_double_prime(rho); }

std::vector<double> FluidModel::probe_grid() const {
  std::vector<double> grid;
  for (int k = table_.probe_min_exponent; k <= table_.probe_max_exponent; ++k) {
    grid.push_back(rho_star_ * std::pow(10.0, k));
  }
  return grid;
}

FluidModel FluidModel::with_quadrature() const {
  FluidModel copy = *this;
  copy.closed_forms_ = false;
  return copy;
}

FluidModel FluidModel::with_table(DerivedFunctionTable table) const {
  if (!(table.quad_rel_tol > 0.0) || !(table.quad_abs_tol > 0.0)) {
    throw InvalidArgument("quadrature tolerances must be positive");
  }
  if (table.probe_max_exponent - table.probe_min_exponent < 4 || table.probe_min_exponent > -2 ||
      table.probe_max_exponent < 2) {
    throw InvalidArgument("probe grid must extend at least two decades each side of rho*");
  }
  FluidModel copy = *this;
  copy.table_ = table;
  return copy;
}

FluidModel make_preset(ModelKind kind, const PresetParams& params, double m, double L) {
  check_mass_and_length(m, L);
  PowerLaws laws{};
  switch (kind) {
    case ModelKind::isentropic_gas:
      require_positive(params.c, "pressure coefficient c");
      require_positive(params.visc_amplitude, "viscosity amplitude");
      if (!(params.gamma > 1.0) || !std::isfinite(params.gamma)) {
        throw InvalidArgument("isentropic_gas requires gamma > 1");
      }
      if (!std::isfinite(params.visc_exponent)) {
        throw InvalidArgument("viscosity exponent must be finite");
      }
      laws = {params.c, params.gamma, params.visc_amplitude, params.visc_exponent};
      break;
    case ModelKind::ideal_gas_entropy:
      require_positive(params.c, "pressure coefficient c");
      require_positive(params.visc_amplitude, "viscosity amplitude A");
      if (!(params.gamma > 1.0 && params.gamma < 2.0)) {
        throw InvalidArgument("ideal_gas_entropy requires gamma in (1, 2)");
      }
      laws = {params.c, params.gamma, params.visc_amplitude, 0.5 * (params.gamma - 1.0)};
      break;
    case ModelKind::saint_venant:
      require_positive(params.g, "gravity g");
      require_positive(params.nu, "kinematic viscosity nu");
      laws = {0.5 * params.g, 2.0, params.nu, 1.0};
      break;
    case ModelKind::custom:
      throw InvalidArgument("make_preset: custom models are built with make_custom");
  }
  FluidModel model;
  model.kind_ = kind;
  model.m_ = m;
  model.L_ = L;
  model.rho_star_ = m / L;
  model.power_laws_ = laws;
  model.closed_forms_ = true;
  model.laws_ = laws_from_power(laws);
  return model;
}

FluidModel make_custom(CustomLaws laws, double m, double L) {
  check_mass_and_length(m, L);
  if (!laws.P || !laws.mu) throw InvalidArgument("custom model needs both P and mu");
  if (!laws.P_prime) laws.P_prime = central_first(laws.P);
  if (!laws.P_double_prime) laws.P_double_prime = central_second(laws.P);
  if (!laws.mu_prime) laws.mu_prime = central_first(laws.mu);
  if (!laws.mu_double_prime) laws.mu_double_prime = central_second(laws.mu);

  FluidModel model;
  model.kind_ = ModelKind::custom;
  model.m_ = m;
  model.L_ = L;
  model.rho_star_ = m / L;
  model.laws_ = std::move(laws);

  // Sampled sanity of the laws: P' > 0 and mu > 0.
  for (double rho : model.probe_grid()) {
    if (!(model.P(rho) > 0.0) || !(model.P_prime(rho) > 0.0) || !(model.mu(rho) > 0.0)) {
      std::ostringstream msg;
      msg << "custom laws must satisfy P > 0, P' > 0, mu > 0 (violated at rho = " << rho << ")";
      throw InvalidArgument(msg.str());
    }
  }
  return model;
}

FluidModel make_power_law(PowerLaws laws, double m, double L) {
  require_positive(laws.coef, "pressure coefficient");
  require_positive(laws.exponent, "pressure exponent");
  require_positive(laws.visc_coef, "viscosity coefficient");
  if (!std::isfinite(laws.visc_exponent)) throw InvalidArgument("viscosity exponent must be finite");
  FluidModel model = make_custom(laws_from_power(laws), m, L);
  model.power_laws_ = laws;
  return model;
}

double small_k(const FluidModel& model, double rho) {
  require_positive(rho, "density");
  const double rs = model.rho_star();
  if (model.uses_closed_forms()) {
    const auto& p = *model.power_laws();
    return p.visc_coef * power_integral(p.visc_exponent, rs, rho);
  }
  return integrate_log([&](double s) { return model.mu(s) / s; }, rs, rho,
                       model.quadrature_tolerance())
      .value;
}

double pressure_integral(const FluidModel& model, double rho) {
  require_positive(rho, "density");
  const double rs = model.rho_star();
  if (model.uses_closed_forms()) {
    const auto& p = *model.power_laws();
    return p.coef * power_integral(p.exponent - 1.0, rs, rho);
  }
  return integrate_log([&](double s) { return model.P(s) / (s * s); }, rs, rho,
                       model.quadrature_tolerance())
      .value;
}

double q_potential(const FluidModel& model, double rho) {
  require_positive(rho, "density");
  const double rs = model.rho_star();
  if (model.uses_closed_forms()) {
    const auto& p = *model.power_laws();
    const double g = p.exponent;
    const double d = rho / rs - 1.0;
    double h = 0.0;  // (1+d)^g - 1 - g d
    if (std::abs(d) < 0.1) {
      // binomial series; the closed form cancels to (rho - rho*)^2 here
      double term = g * (g - 1.0) / 2.0 * d * d;
      for (int k = 2; k < 60 && term != 0.0; ++k) {
        h += term;
        if (std::abs(term) < 1e-18 * std::abs(h)) break;
        term *= (g - k) / (k + 1.0) * d;
      }
    } else {
      h = std::pow(1.0 + d, g) - 1.0 - g * d;
    }
    return std::max(p.coef / (g - 1.0) * std::pow(rs, g) * h, 0.0);
  }
  // Q'' = P'/rho with Q(rho*) = Q'(rho*) = 0, so Q is the integral of
  // (rho - s) P'(s) / s, whose integrand keeps one sign.
  return integrate_log([&](double s) { return (rho - s) * model.P_prime(s) / s; }, rs, rho,
                       model.quadrature_tolerance())
      .value;
}

double phi(const FluidModel& model, double x) {
  require_positive(x, "spacing x");
  const double value = pressure_integral(model, model.m() / x);
  if (!std::isfinite(value)) {
    throw QuadratureError("phi: potential overflows near x -> 0", value);
  }
  return value;
}

double phi_prime(const FluidModel& model, double x) {
  require_positive(x, "spacing x");
  return -model.P(model.m() / x) / model.m();
}

double phi_double_prime(const FluidModel& model, double x) {
  require_positive(x, "spacing x");
  return model.P_prime(model.m() / x) / (x * x);
}

double cap_k(const FluidModel& model, double x) {
  require_positive(x, "spacing x");
  return -small_k(model, model.m() / x) / model.m();
}

double cap_k_prime(const FluidModel& model, double x) {
  require_positive(x, "spacing x");
  return model.mu(model.m() / x) / (model.m() * x);
}

FComponents f_components(const FluidModel& model, double rho) {
  require_positive(rho, "density");
  const double rs = model.rho_star();
  const auto tol = model.quadrature_tolerance();

  double f2 = 0.0;
  if (model.uses_closed_forms()) {
    const auto& p = *model.power_laws();
    f2 = p.visc_coef * power_integral(p.visc_exponent - 0.5, rs, rho);
  } else {
    f2 = integrate_log([&](double s) { return model.mu(s) / (s * std::sqrt(s)); }, rs, rho, tol)
             .value;
  }
  const double f1 = integrate_log(
                        [&](double s) {
                          return model.mu(s) * std::sqrt(q_potential(model, s)) / (s * std::sqrt(s));
                        },
                        rs, rho, tol)
                        .value;
  return {f1, f2, small_k(model, rho)};
}

double f_envelope(const FluidModel& model, double rho) {
  require_positive(rho, "density");
  if (rho == model.rho_star()) return 0.0;
  const auto c = f_components(model, rho);
  const double via_f2 = c.F2 / (2.0 * std::sqrt(2.0 * model.L()));
  const double via_k = c.k / std::sqrt(2.0 * model.m());
  if (rho > model.rho_star()) {
    const double via_f1 = std::sqrt(std::max(c.F1, 0.0) / (2.0 * kSqrt2));
    return std::max({via_f1, via_f2, via_k});
  }
  const double via_f1 = -std::sqrt(std::max(-c.F1, 0.0) / (2.0 * kSqrt2));
  return std::min({via_f1, via_f2, via_k});
}

double f_envelope_inverse(const FluidModel& model, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("f_envelope_inverse: value must be finite");
  const double rs = model.rho_star();
  if (value == 0.0) return rs;

  const bool upward = value > 0.0;
  const auto& table = model.table();
  const int start = upward ? table.probe_max_exponent : -table.probe_min_exponent;
  constexpr int kMaxDecades = 15;

  // Bracket in log(rho): [log rho*, log rho* +- decades*ln10].
  double inner = std::log(rs);
  double outer = inner;
  bool bracketed = false;
  for (int decades = start; decades <= kMaxDecades; ++decades) {
    outer = std::log(rs) + (upward ? 1.0 : -1.0) * decades * std::log(10.0);
    const double f = f_envelope(model, std::exp(outer));
    if (upward ? f >= value : f <= value) {
      bracketed = true;
      break;
    }
    inner = outer;
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "F(rho) = " << value << " has no solution on the "
        << (upward ? "high-density" : "low-density") << " side";
    throw AdmissibilityError(msg.str());
  }
  // log(rho) to relative precision 1e-10 in rho.
  while (std::abs(outer - inner) > 1e-11) {
    const double mid = 0.5 * (inner + outer);
    const double f = f_envelope(model, std::exp(mid));
    if (upward ? f >= value : f <= value) {
      outer = mid;
    } else {
      inner = mid;
    }
  }
  return std::exp(0.5 * (inner + outer));
}

TailEstimate classify_tail(const std::vector<double>& v) {
  if (v.size() < 3) throw InvalidArgument("classify_tail needs at least three probes");
  const std::size_t k = v.size() - 1;
  const double last = v[k];
  const double prev = v[k - 1];
  const double d_last = last - prev;
  const double d_prev = prev - v[k - 2];

  TailEstimate tail;
  if (!std::isfinite(last) || std::abs(last) > 1.5 * std::abs(prev) ||
      std::abs(d_last) > 0.8 * std::abs(d_prev)) {
    tail.infinite = true;
    tail.value = last >= 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    return tail;
  }
  tail.value = last;
  if (d_prev != 0.0) {
    const double r = d_last / d_prev;
    if (r > 0.0 && r < 1.0) tail.value = last + d_last * r / (1.0 - r);
  }
  return tail;
}

double EnvelopeLimits::threshold() const {
  return std::min(high.value, low_neg.value);
}

EnvelopeLimits f_envelope_limits(const FluidModel& model) {
  EnvelopeLimits out;
  out.rho = model.probe_grid();
  for (double r : out.rho) out.F.push_back(f_envelope(model, r));

  const auto& table = model.table();
  const std::size_t centre = static_cast<std::size_t>(-table.probe_min_exponent);
  std::vector<double> upward(out.F.begin() + static_cast<std::ptrdiff_t>(centre), out.F.end());
  std::vector<double> downward;
  for (std::size_t i = centre + 1; i-- > 0;) downward.push_back(-out.F[i]);

  out.high = classify_tail(upward);
  out.low_neg = classify_tail(downward);
  return out;
}

AssumptionReport check_assumption_a(const FluidModel& model) {
  AssumptionReport report;
  report.rho = model.probe_grid();
  for (double r : report.rho) report.integral.push_back(pressure_integral(model, r));

  const std::size_t centre = static_cast<std::size_t>(-model.table().probe_min_exponent);
  std::vector<double> upward(report.integral.begin() + static_cast<std::ptrdiff_t>(centre),
                             report.integral.end());
  std::vector<double> downward;
  for (std::size_t i = centre + 1; i-- > 0;) downward.push_back(report.integral[i]);

  const auto high = classify_tail(upward);
  const auto low = classify_tail(downward);
  report.grows_at_high_density = high.infinite && high.value > 0.0;
  report.bounded_at_low_density = !low.infinite;
  report.holds = report.grows_at_high_density && report.bounded_at_low_density;
  return report;
}

}  // namespace pflow
