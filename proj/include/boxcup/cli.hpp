#pragma once

// Command-line front end: reproducible runs writing JSON/CSV artifacts, and
// a report over a results directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "boxcup/experiment.hpp"

namespace boxcup {

struct RunConfig {
  Scenario scenario = Scenario::dense;
  int bound_sets = 10;
  std::size_t directions = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out = "results";
  std::vector<int> b3_list{30, 60, 90, 120, 150};
};

/// Numbers in artifacts: 12 significant digits.
std::string format_number(double value);

// Artifact contents. Column orders are part of the file format.
std::string bounds_json(Scenario scenario, std::uint64_t seed, std::span<const BoundsSet> bounds);
std::string hypergraph_json(const Hypergraph& h);
std::string widths_csv(std::span<const WidthRecord> records);
std::string differences_csv(std::span<const DifferenceRow> rows);
std::string profile_csv(const ProfileCurve& curve);
std::string volumes_csv(std::span<const VolumeRow> rows);
std::string regression_csv(std::span<const RegressionSeries> series);
std::string worstcase_csv(std::span<const WorstCaseRow> rows);

std::vector<BoundsSet> parse_bounds_json(const std::string& text);
Hypergraph parse_hypergraph_json(const std::string& text);
std::vector<WidthRecord> parse_widths_csv(const std::string& text);

/// Writes every (file name, content) pair into `dir` or none of them: contents
/// go to temporary files first and are renamed into place at the end.
void write_artifacts(const std::filesystem::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& files);

/// Full pipeline for `config`; writes bounds.json, hypergraph.json, widths.csv,
/// differences.csv, profile.csv, volumes.csv and regression.csv.
void execute(const RunConfig& config);

/// Human-readable summary of a results directory: ordering violations, R^2
/// values and (when worstcase.csv exists) worst-case peak locations. Throws
/// std::runtime_error naming the first missing or malformed file.
std::string emit_report(const std::filesystem::path& dir);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace boxcup
