#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pflow/config.hpp"
#include "pflow/error.hpp"
#include "pflow/io.hpp"

namespace {

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 2) {
      throw pflow::ConfigError("--n: expected a comma-separated list of integers >= 2, got '" + text + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw pflow::ConfigError("--n: empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle solver for 1-D viscous compressible flow"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string n_text;

  auto* sim = app.add_subcommand("simulate", "Integrate the particle system and export snapshots");
  sim->add_option("--config", config_path, "JSON configuration")->required();
  sim->add_option("--out", out_dir, "Output directory (default: output.dir from the config)");

  auto* check = app.add_subcommand("check", "Admissibility report for the initial data");
  check->add_option("--config", config_path, "JSON configuration")->required();

  auto* conv = app.add_subcommand("converge", "Convergence study over several particle counts");
  conv->add_option("--config", config_path, "JSON configuration")->required();
  conv->add_option("--n", n_text, "Comma-separated particle counts (default: n_list)");
  conv->add_option("--out", out_dir, "Output directory");

  auto* val = app.add_subcommand("validate", "Weak-form residuals and energy decay checks");
  val->add_option("--config", config_path, "JSON configuration")->required();
  val->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = pflow::parse_config(config_path);
    pflow::apply_env_overrides(cfg);
    const std::string dir = out_dir.empty() ? cfg.output.dir : out_dir;

    if (sim->parsed()) return pflow::run_simulate(cfg, dir, std::cout);
    if (check->parsed()) return pflow::run_check(cfg, std::cout);
    if (conv->parsed()) {
      const auto n_list = n_text.empty() ? cfg.n_list : parse_n_list(n_text);
      return pflow::run_converge(cfg, n_list, dir, std::cout);
    }
    return pflow::run_validate(cfg, dir, std::cout);
  } catch (const pflow::Error& e) {
    std::cerr << pflow::error_record(e.kind(), e.what()) << std::endl;
  } catch (const std::exception& e) {
    std::cerr << pflow::error_record("runtime", e.what()) << std::endl;
  }
  return 1;
}
