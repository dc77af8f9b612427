#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hadamard/scenario.hpp"

using namespace hadamard;

namespace {

int emit(const Report& report, const std::string& out, const std::string& csv, bool timing) {
  const std::string text = report_json(report, timing);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
  if (!csv.empty()) write_file_atomic(csv, report_csv(report));
  for (const auto& r : report.records) {
    if (!r.passed) {
      std::cerr << "FAIL " << r.name << " defect=" << r.defect << " tolerance=" << r.tolerance;
      if (!r.detail.empty()) std::cerr << " (" << r.detail << ")";
      std::cerr << "\n";
    }
  }
  std::cerr << report.records.size() - report.failed_count() << "/" << report.records.size()
            << " checks passed\n";
  return report.all_passed() ? 0 : 1;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property checks for CAT(0) model spaces"};
  app.require_subcommand(1);

  std::string scenario, out, csv, spaces = "all";
  std::vector<std::string> tol;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario, "Scenario JSON")->required();
  run->add_option("--out", out, "Report path (stdout if omitted)");
  run->add_option("--csv", csv, "Defect table path");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  auto* trials_opt = run->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  run->add_option("--tol", tol, "Tolerance override key=value (repeatable)");
  run->add_flag("--timing", timing, "Record runtimes and thread count");

  std::uint64_t fuzz_seed = 0;
  std::size_t fuzz_trials = 1000;
  auto* fuzz = app.add_subcommand("fuzz", "Run the invariant suites on standard spaces");
  fuzz->add_option("--spaces", spaces, "Comma separated labels or 'all'");
  fuzz->add_option("--trials", fuzz_trials, "Instances per suite")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fuzz_seed, "Seed");
  fuzz->add_option("--out", out, "Report path (stdout if omitted)");
  fuzz->add_option("--csv", csv, "Defect table path");
  fuzz->add_flag("--timing", timing, "Record runtimes and thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      RunOptions options;
      if (*seed_opt) options.seed = seed;
      if (*trials_opt) options.trials = trials;
      for (const auto& t : tol) parse_tolerance_override(t, options.tolerances);
      options.timing = timing;
      return emit(run_scenario_file(scenario, options), out, csv, timing);
    }
    return emit(run_fuzz(split_list(spaces), fuzz_trials, fuzz_seed, timing), out, csv, timing);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
