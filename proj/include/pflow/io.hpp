#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pflow/config.hpp"
#include "pflow/initializer.hpp"
#include "pflow/validation.hpp"

namespace pflow {

/// Text with 17 significant digits, '.' decimal point,
/// no grouping, independent of the global locale. inf/nan spelled out.
std::string format_double(double value);

/// Buffered CSV table; written to disk in one go by save().
class CsvTable {
 public:
  explicit CsvTable(const std::vector<std::string>& header);
  CsvTable& cell(double value);
  CsvTable& cell(std::size_t value);
  CsvTable& cell(const std::string& value);
  /// Throws InvalidArgument when the row width differs from the header.
  void end_row();
  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  void separator();
  std::string text_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Admissibility report as a single JSON object (infinite limits are
/// reported as null together with an explicit "*_infinite" flag).
std::string admissibility_json(const AdmissibilityReport& report);

/// One-line JSON error record for the diagnostic stream.
std::string error_record(const std::string& kind, const std::string& message);

// Workflows. Each returns the process exit status: 0 success,
// 2 inadmissible initial data (check only).
int run_simulate(const SimulationConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& log);
int run_check(const SimulationConfig& cfg, std::ostream& out);
int run_converge(const SimulationConfig& cfg, const std::vector<std::size_t>& n_list,
                 const std::filesystem::path& out_dir, std::ostream& log);
int run_validate(const SimulationConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& log);

}  // namespace pflow
