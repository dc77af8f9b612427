#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hadamard {

inline constexpr const char* kVersion = "hadamard-lab 0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Malformed or schema-invalid input. The message names the line/column or
/// the offending field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::map<std::string, double> tolerances;
  /// adds per-record runtimes and the thread count, which are not deterministic
  bool timing = false;
};

struct CheckRecord {
  std::string name;
  bool passed = false;
  double defect = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::string detail;
  double runtime = 0.0;
};

struct Report {
  std::string scenario;
  std::string task;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  /// task outputs as JSON text
  std::string results = "{}";

  bool all_passed() const;
  std::size_t failed_count() const;
};

Report run_scenario_text(const std::string& text, const RunOptions& options = {});
Report run_scenario_file(const std::string& path, const RunOptions& options = {});

/// Invariant suites on standard spaces; an empty list or "all" runs every
/// standard space.
Report run_fuzz(const std::vector<std::string>& spaces, std::size_t trials, std::uint64_t seed,
                bool timing = false);

std::string report_json(const Report& report, bool timing = false);
std::string report_csv(const Report& report);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Parses "key=value" into the tolerance map; throws SchemaError.
void parse_tolerance_override(const std::string& spec, std::map<std::string, double>& out);

}  // namespace hadamard
