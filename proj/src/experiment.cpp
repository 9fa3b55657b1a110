#include "boxcup/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "boxcup/parallel.hpp"
#include "boxcup/rng.hpp"
#include "boxcup/volume.hpp"

namespace boxcup {

QuasiMeanWidth quasi_mean_width(const AssembledRelaxation& region,
                                std::span<const Direction> directions, unsigned threads,
                                bool keep_widths) {
  if (directions.empty()) throw std::invalid_argument("quasi mean width needs a direction");
  const Simplex simplex(region.lp);
  if (simplex.feasibility() != SolveStatus::optimal) {
    throw std::runtime_error("relaxation region is " + to_string(simplex.feasibility()));
  }
  const std::size_t edges = region.f_index.size();
  std::vector<double> widths(directions.size(), 0.0);
  parallel_ranges(directions.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> objective(region.lp.variable_count(), 0.0);
    for (std::size_t d = begin; d < end; ++d) {
      const auto& q = directions[d].q;
      if (q.size() != edges) {
        throw std::invalid_argument("direction dimension does not match the edge count");
      }
      for (std::size_t e = 0; e < edges; ++e) objective[region.f_index[e]] = q[e];
      widths[d] = simplex.width(objective);
    }
  });

  QuasiMeanWidth out;
  double sum = 0.0;
  for (double w : widths) sum += w;
  const double n = static_cast<double>(widths.size());
  out.omega = sum / n;
  if (widths.size() > 1) {
    double ss = 0.0;
    for (double w : widths) ss += (w - out.omega) * (w - out.omega);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  if (keep_widths) out.widths = std::move(widths);
  return out;
}

namespace {

using OmegaTable = std::map<int, std::array<std::optional<double>, 4>>;

std::size_t slot(Relaxation r) { return static_cast<std::size_t>(r); }

OmegaTable tabulate(std::span<const WidthRecord> records) {
  OmegaTable table;
  for (const auto& r : records) table[r.bound_set_id][slot(r.relaxation)] = r.omega;
  for (const auto& [id, row] : table) {
    for (Relaxation rel : kAllRelaxations) {
      if (!row[slot(rel)]) {
        throw std::invalid_argument("bound set " + std::to_string(id) + " has no width for relaxation " +
                                    to_string(rel));
      }
    }
  }
  return table;
}

double omega_of(const std::array<std::optional<double>, 4>& row, Relaxation r) {
  return *row[slot(r)];
}

}  // namespace

std::vector<DifferenceRow> width_difference_report(std::span<const WidthRecord> records) {
  std::vector<DifferenceRow> rows;
  for (const auto& [id, row] : tabulate(records)) {
    const double h = omega_of(row, Relaxation::hull);
    const double w1 = omega_of(row, Relaxation::p1);
    const double w2 = omega_of(row, Relaxation::p2);
    const double w3 = omega_of(row, Relaxation::p3);
    rows.push_back({id, h - w3, w2 - w3, w1 - w3, w1 - h});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const DifferenceRow& x, const DifferenceRow& y) {
    return x.sort_key < y.sort_key;
  });
  return rows;
}

std::vector<double> default_tau_grid(std::size_t points, double tau_max) {
  if (tau_max <= 0.0) tau_max = std::numbers::ln2;
  std::vector<double> grid(points);
  for (std::size_t t = 0; t < points; ++t) {
    grid[t] = points == 1 ? 0.0 : tau_max * static_cast<double>(t) / static_cast<double>(points - 1);
  }
  return grid;
}

ProfileCurve performance_profile(std::span<const WidthRecord> records,
                                 std::span<const double> tau_grid) {
  const OmegaTable table = tabulate(records);
  std::array<std::vector<double>, 3> ratios;
  for (const auto& [id, row] : table) {
    const double h = omega_of(row, Relaxation::hull);
    if (!(h > 0.0)) {
      throw std::invalid_argument("bound set " + std::to_string(id) + " has a nonpositive hull width");
    }
    ratios[0].push_back(std::log(omega_of(row, Relaxation::p1) / h));
    ratios[1].push_back(std::log(omega_of(row, Relaxation::p2) / h));
    ratios[2].push_back(std::log(omega_of(row, Relaxation::p3) / h));
  }
  ProfileCurve curve;
  curve.tau.assign(tau_grid.begin(), tau_grid.end());
  const double count = static_cast<double>(table.size());
  for (std::size_t l = 0; l < 3; ++l) {
    for (double tau : tau_grid) {
      const auto within = std::count_if(ratios[l].begin(), ratios[l].end(),
                                        [tau](double r) { return r <= tau; });
      curve.fraction[l].push_back(count > 0 ? static_cast<double>(within) / count : 0.0);
    }
  }
  return curve;
}

namespace {

double edge_volume(const Bounds3& labeled, Relaxation relaxation) {
  return relaxation == Relaxation::hull ? vol_hull(labeled)
                                        : vol_double_mccormick(labeled, grouping_of(relaxation));
}

}  // namespace

double aggregated_idealized_radius(const Hypergraph& h, const BoundsSet& bounds,
                                   Relaxation relaxation) {
  double sum = 0.0;
  for (const auto& e : h.edges()) {
    const Bounds3 labeled = omega_permutation(edge_bounds(bounds, e)).labeled;
    sum += std::pow(edge_volume(labeled, relaxation), 0.25);
  }
  return sum;
}

RegressionResult linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("linear fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear fit needs x values that are not all equal");
  RegressionResult out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (out.slope * x[i] + out.intercept);
      ss_res += r * r;
    }
    out.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return out;
}

std::vector<VolumeRow> edge_volumes(const Hypergraph& h, const BoundsSet& bounds, int bound_set_id) {
  std::vector<VolumeRow> rows;
  int edge_id = 0;
  for (const auto& e : h.edges()) {
    const Bounds3 labeled = omega_permutation(edge_bounds(bounds, e)).labeled;
    rows.push_back({bound_set_id, edge_id++, vol_hull(labeled),
                    vol_double_mccormick(labeled, GroupingChoice(1)),
                    vol_double_mccormick(labeled, GroupingChoice(2)),
                    vol_double_mccormick(labeled, GroupingChoice(3))});
  }
  return rows;
}

std::vector<RegressionSeries> radius_regressions(const Hypergraph& h,
                                                 std::span<const BoundsSet> bounds,
                                                 std::span<const WidthRecord> records) {
  const OmegaTable table = tabulate(records);
  std::vector<std::array<double, 4>> radius, omega;
  for (const auto& [id, row] : table) {
    if (id < 0 || static_cast<std::size_t>(id) >= bounds.size()) {
      throw std::invalid_argument("no bounds for bound set " + std::to_string(id));
    }
    std::array<double, 4> r{}, w{};
    for (Relaxation rel : kAllRelaxations) {
      r[slot(rel)] = aggregated_idealized_radius(h, bounds[static_cast<std::size_t>(id)], rel);
      w[slot(rel)] = omega_of(row, rel);
    }
    radius.push_back(r);
    omega.push_back(w);
  }

  std::vector<RegressionSeries> out;
  const auto fit = [&](std::string name, auto x_of, auto y_of) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < radius.size(); ++k) {
      x.push_back(x_of(k));
      y.push_back(y_of(k));
    }
    RegressionResult r{std::nan(""), std::nan(""), std::nullopt};
    bool constant_x = true;
    for (double v : x) constant_x = constant_x && v == x.front();
    if (x.size() >= 2 && !constant_x) r = linear_fit(x, y);
    out.push_back({std::move(name), x.size(), r});
  };
  const std::array<Relaxation, 4> order{Relaxation::hull, Relaxation::p3, Relaxation::p2,
                                        Relaxation::p1};
  for (Relaxation rel : order) {
    fit("radius_" + to_string(rel), [&](std::size_t k) { return radius[k][slot(rel)]; },
        [&](std::size_t k) { return omega[k][slot(rel)]; });
  }
  const std::size_t hull = slot(Relaxation::hull);
  for (Relaxation rel : {Relaxation::p3, Relaxation::p2, Relaxation::p1}) {
    fit("diff_" + to_string(rel) + "h",
        [&](std::size_t k) { return radius[k][slot(rel)] - radius[k][hull]; },
        [&](std::size_t k) { return omega[k][slot(rel)] - omega[k][hull]; });
  }
  return out;
}

Hypergraph worst_case_hypergraph() {
  std::vector<std::array<int, 3>> edges;
  for (int j = 1; j <= 5; ++j)
    for (int k = j + 1; k <= 5; ++k) edges.push_back({j, k, 6});
  return Hypergraph(6, std::move(edges));
}

BoundsSet worst_case_bounds(int a3, int b3) {
  if (a3 < 0 || a3 >= b3) throw std::invalid_argument("worst case needs 0 <= a3 < b3");
  BoundsSet out;
  out.bounds.assign(5, Interval{0, 1});
  out.bounds.push_back({a3, b3});
  return out;
}

std::vector<WorstCaseRow> worst_case_sweep(int b3, std::size_t directions_count,
                                           std::uint64_t seed, unsigned threads) {
  if (b3 < 2) throw std::invalid_argument("worst-case sweep needs b3 >= 2");
  const Hypergraph h = worst_case_hypergraph();
  const auto directions = gen_directions(static_cast<int>(h.edge_count()), directions_count,
                                         derive_seed(seed, "worst-case/directions"));
  std::vector<WorstCaseRow> rows;
  for (int a3 = 1; a3 < b3; ++a3) {
    const BoundsSet bounds = worst_case_bounds(a3, b3);
    WorstCaseRow row;
    row.b3 = b3;
    row.a3 = a3;
    row.omega_1 = quasi_mean_width(assemble_relaxation(h, bounds, Relaxation::p1), directions, threads).omega;
    row.omega_2 = quasi_mean_width(assemble_relaxation(h, bounds, Relaxation::p2), directions, threads).omega;
    row.omega_3 = quasi_mean_width(assemble_relaxation(h, bounds, Relaxation::p3), directions, threads).omega;
    row.d_23 = row.omega_2 - row.omega_3;
    row.d_21 = row.omega_2 - row.omega_1;
    const Bounds3 labeled = omega_permutation(edge_bounds(bounds, h.edges().front())).labeled;
    row.vol_h = vol_hull(labeled);
    row.vol_1 = vol_double_mccormick(labeled, GroupingChoice(1));
    row.vol_2 = vol_double_mccormick(labeled, GroupingChoice(2));
    row.vol_3 = vol_double_mccormick(labeled, GroupingChoice(3));
    rows.push_back(row);
  }
  return rows;
}

std::vector<BoundsSet> experiment_bounds(const Hypergraph& h, int count, std::uint64_t seed) {
  std::vector<BoundsSet> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(gen_bounds(h.n(), derive_seed(seed, "bounds/" + std::to_string(k))));
  }
  return out;
}

std::vector<Direction> experiment_directions(const Hypergraph& h, std::size_t count,
                                             std::uint64_t seed) {
  return gen_directions(static_cast<int>(h.edge_count()), count, derive_seed(seed, "directions"));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.bound_sets < 1 || config.directions < 1) {
    throw std::invalid_argument("bound-set and direction counts must be positive");
  }
  ExperimentResult out{make_hypergraph(config.scenario), {}, {}, {}, {}, {}, {}};
  out.bounds = experiment_bounds(out.hypergraph, config.bound_sets, config.seed);
  const auto directions = experiment_directions(out.hypergraph, config.directions, config.seed);
  for (int k = 0; k < config.bound_sets; ++k) {
    const BoundsSet& bounds = out.bounds[static_cast<std::size_t>(k)];
    for (Relaxation rel : kAllRelaxations) {
      auto width = quasi_mean_width(assemble_relaxation(out.hypergraph, bounds, rel, HullForm::envelope),
                                    directions,
                                    config.threads, config.keep_widths);
      out.widths.push_back({k, rel, width.omega, width.std_error, std::move(width.widths)});
    }
    auto vols = edge_volumes(out.hypergraph, bounds, k);
    out.volumes.insert(out.volumes.end(), vols.begin(), vols.end());
  }
  out.differences = width_difference_report(out.widths);
  out.profile = performance_profile(out.widths, default_tau_grid());
  if (config.bound_sets >= 2) {
    out.regressions = radius_regressions(out.hypergraph, out.bounds, out.widths);
  }
  return out;
}

}  // namespace boxcup
