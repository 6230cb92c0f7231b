#include "pflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pflow/error.hpp"
#include "pflow/reconstruction.hpp"

namespace pflow {

namespace {

using json = nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

struct Setup {
  FluidModel model;
  InitialData init;
};

Setup setup(const SimulationConfig& cfg) {
  FluidModel model = cfg.build_model();
  InitialData init = cfg.build_initial(model);
  return {std::move(model), std::move(init)};
}

double ratio(double coarse, double fine) {
  return fine > 0.0 ? coarse / fine : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(const std::vector<std::string>& header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvTable::separator() {
  if (filled_ > 0) text_ += ',';
  ++filled_;
}

CsvTable& CsvTable::cell(double value) {
  separator();
  text_ += format_double(value);
  return *this;
}

CsvTable& CsvTable::cell(std::size_t value) {
  separator();
  text_ += std::to_string(value);
  return *this;
}

CsvTable& CsvTable::cell(const std::string& value) {
  separator();
  if (value.find_first_of(",\"\n") == std::string::npos) {
    text_ += value;
  } else {
    text_ += '"';
    for (char c : value) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

void CsvTable::end_row() {
  if (filled_ != columns_) {
    throw InvalidArgument("csv row has " + std::to_string(filled_) + " cells, expected " +
                          std::to_string(columns_));
  }
  text_ += '\n';
  filled_ = 0;
}

void CsvTable::save(const std::filesystem::path& path) const { write_text(path, text_); }

std::string admissibility_json(const AdmissibilityReport& report) {
  json j;
  const auto& b = report.bounds;
  j["bounds"] = {{"E_bar", b.E_bar}, {"W_bar", b.W_bar}, {"Z_bar", b.Z_bar},
                 {"A_bar", b.A_bar}, {"M_bar", b.M_bar}, {"rho_min", b.rho_min}};
  const auto& lim = report.limits;
  const double threshold = lim.threshold();
  j["limits"] = {{"high", lim.high.infinite ? json(nullptr) : json(lim.high.value)},
                 {"high_infinite", lim.high.infinite},
                 {"low", lim.low_neg.infinite ? json(nullptr) : json(lim.low_neg.value)},
                 {"low_infinite", lim.low_neg.infinite},
                 {"threshold", finite_or_null(threshold)},
                 {"threshold_infinite", std::isinf(threshold)}};
  j["lhs"] = report.lhs;
  j["admissible"] = report.admissible;
  if (report.spacing) {
    j["spacing"] = {{"a", report.spacing->a}, {"b", report.spacing->b},
                    {"budget", report.spacing->budget}};
  } else {
    j["spacing"] = nullptr;
  }
  return j.dump();
}

std::string error_record(const std::string& kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

int run_simulate(const SimulationConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& log) {
  const auto [model, init] = setup(cfg);
  const auto state0 = build_particles(model, init, cfg.n);
  const auto series = simulate(model, state0, cfg.integrator.T, cfg.integrator);
  std::filesystem::create_directories(out_dir);

  CsvTable particles({"t", "i", "x_i", "v_i", "rho_i"});
  CsvTable fields({"t", "x", "rho", "v"});
  CsvTable diagnostics({"t", "E_n", "W_n", "Z_n", "H_n", "mass", "min_spacing", "max_spacing"});
  for (const auto& snap : series.snapshots) {
    const auto& s = snap.state;
    const auto field = reconstruct(model, s);
    for (std::size_t i = 0; i <= s.n(); ++i) {
      particles.cell(s.t()).cell(i).cell(s.position(i)).cell(s.velocity(i)).cell(field.node_rho()[i]);
      particles.end_row();
    }
    const auto samples = sample_field(field, cfg.output.grid_size);
    for (std::size_t j = 0; j < samples.x.size(); ++j) {
      fields.cell(s.t()).cell(samples.x[j]).cell(samples.rho[j]).cell(samples.v[j]);
      fields.end_row();
    }
    double lo = s.spacing(1);
    double hi = lo;
    for (std::size_t i = 2; i <= s.n(); ++i) {
      lo = std::min(lo, s.spacing(i));
      hi = std::max(hi, s.spacing(i));
    }
    const auto& f = snap.functionals;
    diagnostics.cell(s.t()).cell(f.E_n).cell(f.W_n).cell(f.Z_n).cell(f.H_n);
    diagnostics.cell(total_mass(field)).cell(lo).cell(hi);
    diagnostics.end_row();
  }
  particles.save(out_dir / "particles.csv");
  fields.save(out_dir / "fields.csv");
  diagnostics.save(out_dir / "diagnostics.csv");

  log << "simulate: n=" << cfg.n << " T=" << cfg.integrator.T
      << " snapshots=" << series.snapshots.size() << " accepted=" << series.stats.accepted
      << " rejected=" << series.stats.rejected << "\n";
  for (const auto& w : series.warnings) {
    log << "warning: " << w.functional << " increased by " << format_double(w.increase)
        << " at t=" << format_double(w.t) << "\n";
  }
  return 0;
}

int run_check(const SimulationConfig& cfg, std::ostream& out) {
  const auto [model, init] = setup(cfg);
  const auto report = admissibility(model, init);
  out << admissibility_json(report) << "\n";
  return report.admissible ? 0 : 2;
}

int run_converge(const SimulationConfig& cfg, const std::vector<std::size_t>& n_list,
                 const std::filesystem::path& out_dir, std::ostream& log) {
  const auto [model, init] = setup(cfg);
  const auto rows = convergence_study(model, init, n_list, cfg.integrator.T, cfg.integrator);
  std::filesystem::create_directories(out_dir);

  CsvTable table({"n", "status", "mass_error", "continuity_residual", "momentum_residual",
                  "E_gap", "W_gap", "rho_distance", "v_distance", "rho_holder", "v_holder",
                  "accepted_steps", "rejected_steps", "error"});
  bool all_ok = true;
  for (const auto& r : rows) {
    all_ok = all_ok && r.ok;
    table.cell(r.n).cell(std::string(r.ok ? "ok" : "failed"));
    table.cell(r.mass_error).cell(r.continuity_residual).cell(r.momentum_residual);
    table.cell(r.E_gap).cell(r.W_gap).cell(r.rho_distance).cell(r.v_distance);
    table.cell(r.rho_holder).cell(r.v_holder);
    table.cell(r.stats.accepted).cell(r.stats.rejected).cell(r.error);
    table.end_row();
  }
  table.save(out_dir / "convergence.csv");

  log << "n  mass_ratio  cont_ratio  mom_ratio  E_gap_ratio  W_gap_ratio  rho_dist\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    log << r.n;
    if (k > 0 && rows[k - 1].ok && r.ok) {
      const auto& p = rows[k - 1];
      log << "  " << format_double(ratio(p.mass_error, r.mass_error)) << "  "
          << format_double(ratio(p.continuity_residual, r.continuity_residual)) << "  "
          << format_double(ratio(p.momentum_residual, r.momentum_residual)) << "  "
          << format_double(ratio(p.E_gap, r.E_gap)) << "  " << format_double(ratio(p.W_gap, r.W_gap));
    } else {
      log << "  -  -  -  -  -";
    }
    log << "  " << format_double(r.rho_distance) << (r.ok ? "" : "  failed: " + r.error) << "\n";
  }
  if (!all_ok) throw Error("convergence study: at least one resolution failed (see convergence.csv)");
  return 0;
}

int run_validate(const SimulationConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& log) {
  const auto [model, init] = setup(cfg);
  const auto bounds = initial_bounds(model, init);
  const auto series =
      simulate(model, build_particles(model, init, cfg.n), cfg.integrator.T, cfg.integrator);
  std::filesystem::create_directories(out_dir);

  std::vector<ResidualReport> reports;
  std::vector<std::string> labels;
  for (const auto& tf : continuity_test_functions(model.L(), series.T)) {
    reports.push_back(continuity_residual(model, series, init, tf));
    labels.push_back("continuity:" + tf.id);
  }
  for (const auto& tf : momentum_test_functions(model.L(), series.T)) {
    reports.push_back(momentum_residual(model, series, init, tf));
    labels.push_back("momentum:" + tf.id);
  }
  CsvTable residuals({"n", "metric", "value", "error_estimate", "inconclusive"});
  for (std::size_t k = 0; k < reports.size(); ++k) {
    residuals.cell(reports[k].n).cell(labels[k]).cell(reports[k].value);
    residuals.cell(reports[k].error_estimate).cell(std::string(reports[k].inconclusive ? "1" : "0"));
    residuals.end_row();
  }
  residuals.save(out_dir / "residuals.csv");

  const auto decay = decay_report(model, series, bounds);
  CsvTable decay_csv({"t", "E_n", "W_n", "E_cont", "W_cont", "E_n_ok", "W_n_ok", "E_cont_ok"});
  for (std::size_t j = 0; j < decay.t.size(); ++j) {
    decay_csv.cell(decay.t[j]).cell(decay.E_n[j]).cell(decay.W_n[j]);
    decay_csv.cell(decay.E_cont[j]).cell(decay.W_cont[j]);
    decay_csv.cell(std::string(decay.E_n_ok[j] ? "1" : "0"));
    decay_csv.cell(std::string(decay.W_n_ok[j] ? "1" : "0"));
    decay_csv.cell(std::string(decay.E_cont_ok[j] ? "1" : "0"));
    decay_csv.end_row();
  }
  decay_csv.save(out_dir / "decay.csv");

  std::ostringstream summary;
  summary << "n = " << cfg.n << ", T = " << format_double(series.T)
          << ", snapshots = " << series.snapshots.size() << "\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    summary << labels[k] << ": residual " << format_double(reports[k].value) << " +- "
            << format_double(reports[k].error_estimate)
            << (reports[k].inconclusive ? " (inconclusive)" : "") << "\n";
  }
  summary << "E_n/W_n decay violations: " << decay.violations << "\n";
  summary << "max time-averaged W: " << format_double(decay.max_W_average) << " (bound "
          << format_double(decay.W_average_bound) << ")\n";
  if (decay.first_violation) summary << "first violation: " << *decay.first_violation << "\n";
  write_text(out_dir / "summary.txt", summary.str());
  log << summary.str();
  return 0;
}

}  // namespace pflow
