#pragma once

// Width experiments on box cubic relaxations: quasi mean widths, difference
// tables, performance profiles, radius-vs-width regressions and the
// worst-case sweep.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxcup/boxcup.hpp"

namespace boxcup {

/// Mean over directions of (max - min) of sum_e q_e f_e, with the standard
/// error of that mean. `widths` holds the per-direction values when requested.
struct QuasiMeanWidth {
  double omega = 0.0;
  double std_error = 0.0;
  std::vector<double> widths;
};

/// Directions are split over `threads` workers; per-direction widths go to a
/// preallocated table that is reduced in direction order, so the result does
/// not depend on the thread count. Throws on an empty direction list.
QuasiMeanWidth quasi_mean_width(const AssembledRelaxation& region,
                                std::span<const Direction> directions, unsigned threads,
                                bool keep_widths = false);

struct WidthRecord {
  int bound_set_id = 0;
  Relaxation relaxation = Relaxation::hull;
  double omega = 0.0;
  double std_error = 0.0;
  std::vector<double> widths;
};

struct DifferenceRow {
  int bound_set_id = 0;
  double d_h3 = 0.0;  // omega(h) - omega(3)
  double d_23 = 0.0;  // omega(2) - omega(3)
  double d_13 = 0.0;  // omega(1) - omega(3)
  double sort_key = 0.0;  // omega(1) - omega(h)
};

/// One row per bound set, sorted ascending by omega(1) - omega(h) (stable in
/// bound-set id). Throws if a bound set lacks one of the four relaxations.
std::vector<DifferenceRow> width_difference_report(std::span<const WidthRecord> records);

struct ProfileCurve {
  std::vector<double> tau;
  /// fraction[l - 1][t]: share of bound sets with ln(omega(l) / omega(h)) <= tau[t].
  std::array<std::vector<double>, 3> fraction;
};

/// `points` uniform values on [0, tau_max]; tau_max defaults to ln 2.
std::vector<double> default_tau_grid(std::size_t points = 200, double tau_max = 0.0);

/// Throws if a bound set has a nonpositive hull width or misses a relaxation.
ProfileCurve performance_profile(std::span<const WidthRecord> records,
                                 std::span<const double> tau_grid);

/// Sum over edges of the fourth root of the per-edge relaxation volume, each
/// edge labeled on its own box. No ball constant.
double aggregated_idealized_radius(const Hypergraph& h, const BoundsSet& bounds,
                                   Relaxation relaxation);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  /// Empty when y is constant (zero total sum of squares).
  std::optional<double> r_squared;
};

/// Ordinary least squares y ~ slope * x + intercept. Throws with fewer than two
/// points, mismatched sizes or constant x.
RegressionResult linear_fit(std::span<const double> x, std::span<const double> y);

struct VolumeRow {
  int bound_set_id = 0;
  int edge_id = 0;
  double vol_h = 0.0, vol_1 = 0.0, vol_2 = 0.0, vol_3 = 0.0;
};

std::vector<VolumeRow> edge_volumes(const Hypergraph& h, const BoundsSet& bounds, int bound_set_id);

struct RegressionSeries {
  std::string series;
  std::size_t points = 0;
  RegressionResult fit;
};

/// Seven fits over bound sets: radius_h, radius_3, radius_2, radius_1
/// (aggregated radius vs omega) and diff_3h, diff_2h, diff_1h (aggregated
/// radial distance to the hull vs omega difference to the hull).
std::vector<RegressionSeries> radius_regressions(const Hypergraph& h,
                                                 std::span<const BoundsSet> bounds,
                                                 std::span<const WidthRecord> records);

struct WorstCaseRow {
  int b3 = 0;
  int a3 = 0;
  double omega_1 = 0.0, omega_2 = 0.0, omega_3 = 0.0;
  double d_23 = 0.0;  // omega(2) - omega(3)
  double d_21 = 0.0;  // omega(2) - omega(1)
  // Per-edge volumes; every edge has the same box.
  double vol_h = 0.0, vol_1 = 0.0, vol_2 = 0.0, vol_3 = 0.0;
};

/// The 10-edge instance on 6 vertices: x1..x5 in [0,1], x6 in [a3, b3], edges
/// the triples containing vertex 6.
Hypergraph worst_case_hypergraph();
BoundsSet worst_case_bounds(int a3, int b3);

/// One row per a3 = 1..b3-1; the same `directions_count` directions (drawn
/// from the seed's "worst-case/directions" stream) are used for every a3.
std::vector<WorstCaseRow> worst_case_sweep(int b3, std::size_t directions_count,
                                           std::uint64_t seed, unsigned threads);

struct ExperimentConfig {
  Scenario scenario = Scenario::dense;
  int bound_sets = 10;
  std::size_t directions = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool keep_widths = false;
};

struct ExperimentResult {
  Hypergraph hypergraph;
  std::vector<BoundsSet> bounds;
  std::vector<WidthRecord> widths;
  std::vector<VolumeRow> volumes;
  std::vector<DifferenceRow> differences;
  ProfileCurve profile;
  std::vector<RegressionSeries> regressions;
};

/// Bound set k is drawn from the "bounds/k" substream; the directions from
/// "directions" and are shared by all bound sets and relaxations.
std::vector<BoundsSet> experiment_bounds(const Hypergraph& h, int count, std::uint64_t seed);
std::vector<Direction> experiment_directions(const Hypergraph& h, std::size_t count,
                                             std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace boxcup
