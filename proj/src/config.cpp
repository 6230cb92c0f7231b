#include "pflow/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pflow/error.hpp"

namespace pflow {

namespace {

using json = nlohmann::json;

// Walks one JSON object, remembering which keys were read so that the
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(at(key), "must be finite");
    }
  }

  void number(const std::string& key, std::optional<double>& out) {
    if (has(key)) {
      double v = 0.0;
      number(key, v);
      out = v;
    } else {
      seen_.insert(key);
    }
  }

  void positive(const std::string& key, double& out) {
    number(key, out);
    if (!(out > 0.0)) fail(at(key), "must be positive");
  }

  template <typename Int>
  void integer(const std::string& key, Int& out, long long min_value) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(at(key), "expected an integer");
      const long long value = v->get<long long>();
      if (value < min_value) {
        fail(at(key), "must be >= " + std::to_string(min_value));
      }
      out = static_cast<Int>(value);
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(e.get<double>());
      }
    }
  }

  void require(const std::string& key) const {
    if (!has(key)) fail(at(key), "required field missing");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ModelConfig parse_model(const json& j) {
  ObjectReader r(j, "$.model");
  ModelConfig mc;
  r.require("kind");
  r.string("kind", mc.kind);
  if (mc.kind == "saint_venant") {
    r.positive("g", mc.preset.g);
    r.positive("nu", mc.preset.nu);
  } else if (mc.kind == "isentropic_gas" || mc.kind == "ideal_gas_entropy") {
    r.positive("c", mc.preset.c);
    r.number("gamma", mc.preset.gamma);
    r.positive("visc_amplitude", mc.preset.visc_amplitude);
    if (mc.kind == "isentropic_gas") r.number("visc_exponent", mc.preset.visc_exponent);
    if (!(mc.preset.gamma > 1.0)) ObjectReader::fail(r.at("gamma"), "must exceed 1");
    if (mc.kind == "ideal_gas_entropy" && !(mc.preset.gamma < 2.0)) {
      ObjectReader::fail(r.at("gamma"), "must lie in (1, 2)");
    }
  } else if (mc.kind == "power_law") {
    r.positive("coef", mc.power.coef);
    r.number("exponent", mc.power.exponent);
    r.positive("visc_coef", mc.power.visc_coef);
    r.number("visc_exponent", mc.power.visc_exponent);
  } else {
    ObjectReader::fail(r.at("kind"), "unknown model kind '" + mc.kind + "'");
  }
  if (const json* q = r.get("quadrature")) {
    ObjectReader qr(*q, "$.model.quadrature");
    qr.number("rel_tol", mc.quad_rel_tol);
    qr.number("abs_tol", mc.quad_abs_tol);
    if (mc.quad_rel_tol && !(*mc.quad_rel_tol > 0.0)) ObjectReader::fail(qr.at("rel_tol"), "must be positive");
    if (mc.quad_abs_tol && !(*mc.quad_abs_tol >= 0.0)) ObjectReader::fail(qr.at("abs_tol"), "must be nonnegative");
    qr.finish();
  }
  r.finish();
  return mc;
}

DensityConfig parse_density(const json& j) {
  ObjectReader r(j, "$.initial.rho0");
  DensityConfig dc;
  r.string("kind", dc.kind);
  if (dc.kind == "constant") {
    r.number("value", dc.value);
  } else if (dc.kind == "cosine") {
    r.number("amplitude", dc.amplitude);
    r.integer("mode", dc.mode, 1);
  } else if (dc.kind == "table") {
    r.require("x");
    r.require("rho");
    r.numbers("x", dc.x);
    r.numbers("rho", dc.values);
  } else {
    ObjectReader::fail(r.at("kind"), "unknown density kind '" + dc.kind + "'");
  }
  r.finish();
  return dc;
}

VelocityConfig parse_velocity(const json& j) {
  ObjectReader r(j, "$.initial.v0");
  VelocityConfig vc;
  r.string("kind", vc.kind);
  if (vc.kind == "zero") {
  } else if (vc.kind == "sine") {
    r.number("amplitude", vc.amplitude);
    r.integer("mode", vc.mode, 1);
  } else if (vc.kind == "table") {
    r.require("x");
    r.require("v");
    r.numbers("x", vc.x);
    r.numbers("v", vc.values);
  } else {
    ObjectReader::fail(r.at("kind"), "unknown velocity kind '" + vc.kind + "'");
  }
  r.finish();
  return vc;
}

void parse_integrator(const json& j, IntegratorConfig& ic) {
  ObjectReader r(j, "$.integrator");
  r.positive("rel_tol", ic.rel_tol);
  r.number("abs_tol", ic.abs_tol);
  if (!(ic.abs_tol >= 0.0)) ObjectReader::fail(r.at("abs_tol"), "must be nonnegative");
  r.positive("snapshot_dt", ic.snapshot_dt);
  r.positive("T", ic.T);
  r.number("dt_init", ic.dt_init);
  if (ic.dt_init && !(*ic.dt_init > 0.0)) ObjectReader::fail(r.at("dt_init"), "must be positive");
  r.positive("dt_max", ic.dt_max);
  r.integer("max_steps", ic.max_steps, 1);
  r.finish();
}

std::optional<double> env_number(const EnvLookup& lookup, const char* name) {
  const char* raw = lookup(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(raw, &end);
  if (errno != 0 || end == raw || *end != '\0' || !std::isfinite(v) || v < 0.0) {
    throw ConfigError(std::string(name) + ": expected a nonnegative number, got '" + raw + "'");
  }
  return v;
}

}  // namespace

SimulationConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("$: malformed JSON: ") + e.what());
  }
  ObjectReader r(j, "$");
  SimulationConfig cfg;

  r.require("model");
  cfg.model = parse_model(*r.get("model"));
  r.positive("m", cfg.m);
  r.positive("L", cfg.L);

  if (const json* init = r.get("initial")) {
    ObjectReader ir(*init, "$.initial");
    if (const json* rho = ir.get("rho0")) cfg.rho0 = parse_density(*rho);
    if (const json* v = ir.get("v0")) cfg.v0 = parse_velocity(*v);
    ir.finish();
  }
  if (const json* integ = r.get("integrator")) parse_integrator(*integ, cfg.integrator);

  r.integer("n", cfg.n, 2);
  if (const json* list = r.get("n_list")) {
    if (!list->is_array() || list->empty()) ObjectReader::fail("$.n_list", "expected a nonempty array");
    cfg.n_list.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      const json& e = (*list)[i];
      const std::string path = "$.n_list[" + std::to_string(i) + "]";
      if (!e.is_number_integer()) ObjectReader::fail(path, "expected an integer");
      if (e.get<long long>() < 2) ObjectReader::fail(path, "n must be >= 2");
      cfg.n_list.push_back(e.get<std::size_t>());
    }
  }
  if (const json* out = r.get("output")) {
    ObjectReader orr(*out, "$.output");
    orr.string("dir", cfg.output.dir);
    orr.integer("grid_size", cfg.output.grid_size, 2);
    orr.finish();
  }
  r.integer("seed", cfg.seed, 0);
  r.finish();
  return cfg;
}

SimulationConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_env_overrides(SimulationConfig& cfg, const EnvLookup& lookup) {
  if (auto v = env_number(lookup, "PFLOW_INTEGRATOR_REL_TOL")) cfg.integrator.rel_tol = *v;
  if (auto v = env_number(lookup, "PFLOW_INTEGRATOR_ABS_TOL")) cfg.integrator.abs_tol = *v;
  if (auto v = env_number(lookup, "PFLOW_QUAD_REL_TOL")) cfg.model.quad_rel_tol = *v;
  if (auto v = env_number(lookup, "PFLOW_QUAD_ABS_TOL")) cfg.model.quad_abs_tol = *v;
}

void apply_env_overrides(SimulationConfig& cfg) {
  apply_env_overrides(cfg, [](const char* name) { return std::getenv(name); });
}

FluidModel SimulationConfig::build_model() const {
  FluidModel base = model.kind == "power_law"
                        ? make_power_law(model.power, m, L)
                        : make_preset(model_kind_from_string(model.kind), model.preset, m, L);
  if (!model.quad_rel_tol && !model.quad_abs_tol) return base;
  DerivedFunctionTable table = base.table();
  if (model.quad_rel_tol) table.quad_rel_tol = *model.quad_rel_tol;
  if (model.quad_abs_tol) table.quad_abs_tol = *model.quad_abs_tol;
  return base.with_table(table);
}

InitialData SimulationConfig::build_initial(const FluidModel& fm) const {
  auto data = [&] {
    if (rho0.kind == "cosine") return InitialData::cosine_density(fm, rho0.amplitude, rho0.mode);
    if (rho0.kind == "table") return InitialData::table_density(fm, rho0.x, rho0.values);
    return InitialData::constant_density(fm, rho0.value.value_or(m / L));
  }();
  if (v0.kind == "sine") {
    data.sine_velocity(v0.amplitude, v0.mode);
  } else if (v0.kind == "table") {
    data.table_velocity(v0.x, v0.values);
  } else {
    data.zero_velocity();
  }
  return data;
}

}  // namespace pflow
