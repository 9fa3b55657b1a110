// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero when a criterion fails that is not listed via --allow-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "boxcup/cli.hpp"
#include "boxcup/experiment.hpp"
#include "boxcup/parallel.hpp"
#include "boxcup/rng.hpp"
#include "boxcup/volume.hpp"

using namespace boxcup;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Bounds3 random_integer_labeled(std::uint64_t seed) {
  const BoundsSet b = gen_bounds(3, seed);
  const Bounds3 box({double(b.bounds[0].lower), double(b.bounds[1].lower), double(b.bounds[2].lower)},
                    {double(b.bounds[0].upper), double(b.bounds[1].upper), double(b.bounds[2].upper)});
  return omega_permutation(box).labeled;
}

Bounds3 random_real_labeled(Rng& rng) {
  std::array<double, 3> a{}, b{};
  for (int i = 0; i < 3; ++i) {
    double u = 10.0 * uniform01(rng), v = 10.0 * uniform01(rng);
    if (u > v) std::swap(u, v);
    if (v - u < 1e-3) v = u + 1e-3;
    a[i] = u;
    b[i] = v;
  }
  return omega_permutation(Bounds3(a, b)).labeled;
}

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Outcome criterion1(unsigned threads) {
  Outcome out;
  constexpr std::uint64_t samples = 1'000'000;
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 20; ++k) {
    const Bounds3 box = random_integer_labeled(derive_seed(kSeed, "acceptance/c1/" + std::to_string(k)));
    const std::array<std::pair<double, InequalitySystem>, 4> cases = {{
        {vol_hull(box), hull_formulation(box)},
        {vol_double_mccormick(box, GroupingChoice(1)), double_mccormick_system(box, GroupingChoice(1))},
        {vol_double_mccormick(box, GroupingChoice(2)), double_mccormick_system(box, GroupingChoice(2))},
        {vol_double_mccormick(box, GroupingChoice(3)), double_mccormick_system(box, GroupingChoice(3))},
    }};
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const auto mc = mc_volume_estimate(
          box, cases[c].second, samples,
          derive_seed(kSeed, "acceptance/c1/mc/" + std::to_string(k) + "/" + std::to_string(c)),
          threads);
      const double z = mc.std_error > 0 ? std::abs(mc.estimate - cases[c].first) / mc.std_error
                                        : (mc.estimate == cases[c].first ? 0.0 : INFINITY);
      worst = std::max(worst, z);
      if (z > 3.0) ++failures;
    }
  }
  out.pass = failures == 0;
  out.detail = std::to_string(failures) + " of 80 outside 3 std errors, max " + fmt("%.2f", worst) + " std errors";
  return out;
}

Outcome criterion2() {
  Rng rng(derive_seed(kSeed, "acceptance/c2"));
  int failures = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Bounds3 box = random_real_labeled(rng);
    const double h = vol_hull(box), v1 = vol_double_mccormick(box, GroupingChoice(1)),
                 v2 = vol_double_mccormick(box, GroupingChoice(2)),
                 v3 = vol_double_mccormick(box, GroupingChoice(3));
    const double scale = v1;
    const double slack = std::min({(v3 - h) / scale, (v2 - v3) / scale, (v1 - v2) / scale});
    worst = std::min(worst, slack);
    if (slack < -1e-12) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " of 1000 violations, min relative slack " + fmt("%.3g", worst)};
}

Outcome criterion3() {
  Rng rng(derive_seed(kSeed, "acceptance/c3"));
  double worst = -INFINITY;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const Bounds3 box = random_real_labeled(rng);
    for (int c = 1; c <= 3; ++c) {
      const auto system = double_mccormick_system(box, GroupingChoice(c));
      LinearProgram lp;
      for (const auto& name : system.variables()) lp.add_variable(name, -kInfinity, kInfinity);
      for (const auto& row : system.inequalities()) lp.add_constraint(row);
      for (const auto& row : double_mccormick_redundant_pair(box, GroupingChoice(c))) {
        // violation = rhs - lhs
        std::vector<Term> objective;
        for (const auto& t : row.terms()) objective.push_back({t.variable, -t.coefficient});
        lp.set_objective(objective);
        const Solution s = solve(lp, Sense::maximize);
        if (s.status != SolveStatus::optimal) {
          ++failures;
          continue;
        }
        const double violation = s.value + row.rhs();
        worst = std::max(worst, violation);
        if (violation > 1e-9) ++failures;
      }
    }
  }
  return {failures == 0, std::to_string(failures) + " of 600 maximizations above 1e-9, max violation " + fmt("%.3g", worst)};
}

Outcome criterion4(unsigned threads) {
  const Hypergraph h = make_hypergraph(Scenario::dense);
  const auto bounds = experiment_bounds(h, 2, kSeed);
  const auto dirs = experiment_directions(h, 500, kSeed);
  int failures = 0;
  double worst = -INFINITY;
  std::vector<WidthRecord> records;
  for (int k = 0; k < 2; ++k) {
    std::array<QuasiMeanWidth, 4> w;
    for (Relaxation rel : kAllRelaxations) {
      w[static_cast<std::size_t>(rel)] =
          quasi_mean_width(assemble_relaxation(h, bounds[k], rel, HullForm::extended), dirs, threads, true);
      records.push_back({k, rel, w[static_cast<std::size_t>(rel)].omega, w[static_cast<std::size_t>(rel)].std_error, {}});
    }
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      for (std::size_t l = 1; l < 4; ++l) {
        const double gap = w[0].widths[d] - w[l].widths[d];
        worst = std::max(worst, gap);
        if (gap > 1e-6) ++failures;
      }
    }
  }
  int rows_bad = 0;
  for (const auto& row : width_difference_report(records)) {
    if (row.d_h3 > 1e-6) ++rows_bad;
  }
  return {failures == 0 && rows_bad == 0,
          std::to_string(failures) + " of 3000 direction comparisons violated (max width(h)-width(l) " +
              fmt("%.3g", worst) + "), " + std::to_string(rows_bad) + " positive d_h3 rows"};
}

Outcome criterion5(const ExperimentResult& r) {
  int good = 0;
  for (const auto& row : r.differences) {
    if (row.d_23 >= -1e-4 && row.d_13 >= row.d_23 - 1e-4) ++good;
  }
  const double share = double(good) / double(r.differences.size());
  return {share >= 0.8, std::to_string(good) + " of " + std::to_string(r.differences.size()) +
                            " bound sets show the ordering"};
}

Outcome criterion6(const ExperimentResult& r) {
  double worst32 = INFINITY, worst21 = INFINITY;
  for (std::size_t t = 0; t < r.profile.tau.size(); ++t) {
    worst32 = std::min(worst32, r.profile.fraction[2][t] - r.profile.fraction[1][t]);
    worst21 = std::min(worst21, r.profile.fraction[1][t] - r.profile.fraction[0][t]);
  }
  return {worst32 >= -0.1 && worst21 >= -0.1,
          "min(frac_3 - frac_2) " + fmt("%.3g", worst32) + ", min(frac_2 - frac_1) " + fmt("%.3g", worst21)};
}

Outcome criterion7(const ExperimentResult& r) {
  const auto r2 = [&](const std::string& name) {
    for (const auto& s : r.regressions)
      if (s.series == name) return s.fit.r_squared.value_or(NAN);
    return double(NAN);
  };
  bool pass = true;
  std::ostringstream detail;
  for (const char* rel : {"h", "3", "2", "1"}) {
    const double v = r2(std::string("radius_") + rel);
    pass = pass && v >= 0.9;
    detail << "radius_" << rel << " " << fmt("%.3f", v) << " ";
  }
  for (const char* rel : {"3", "2", "1"}) {
    const double diff = r2(std::string("diff_") + rel + "h");
    const double base = r2(std::string("radius_") + rel);
    pass = pass && diff >= base;
    detail << "diff_" << rel << "h " << fmt("%.3f", diff) << " ";
  }
  return {pass, detail.str()};
}

Outcome criterion8(unsigned threads) {
  bool pass = true;
  std::ostringstream detail;
  for (int b3 : {30, 60}) {
    const auto rows = worst_case_sweep(b3, 5000, kSeed, threads);
    bool positive = true, volumes_equal = true;
    int argmax = 0;
    double peak = -INFINITY, max_d21 = 0.0;
    for (const auto& row : rows) {
      positive = positive && row.d_23 > 0.0;
      volumes_equal = volumes_equal && row.vol_3 == row.vol_h;
      if (row.d_23 > peak) {
        peak = row.d_23;
        argmax = row.a3;
      }
      max_d21 = std::max(max_d21, std::abs(row.d_21));
    }
    const bool near = std::abs(argmax - b3 / 3.0) <= 2.0;
    const bool small = max_d21 <= 0.01 * peak;
    pass = pass && positive && near && small && volumes_equal;
    detail << "b3=" << b3 << ": (a) " << (positive ? "ok" : "fail") << " (b) argmax a3=" << argmax
           << (near ? " ok" : " fail") << " (c) max|d21|/peak " << fmt("%.4f", max_d21 / peak)
           << (small ? " ok" : " fail") << " (d) " << (volumes_equal ? "ok" : "fail") << "; ";
  }
  return {pass, detail.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"boxcup"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome criterion9() {
  const auto root = std::filesystem::temp_directory_path() / "boxcup-acceptance-determinism";
  std::filesystem::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
      {"run", {"run", "--scenario", "dense", "--bound-sets", "2", "--directions", "100", "--seed", "7"}},
      {"sparse", {"run", "--scenario", "sparse", "--bound-sets", "2", "--directions", "50", "--seed", "3"}},
      {"worst", {"worst-case", "--b3", "9,12", "--directions", "50", "--seed", "5"}},
      {"volumes", {"volumes", "--scenario", "very-sparse", "--bound-sets", "3", "--seed", "11"}},
  };
  int mismatches = 0, files = 0;
  for (const auto& [name, args] : commands) {
    std::vector<std::filesystem::path> dirs;
    for (const char* threads : {"1", "1", "4"}) {
      const auto dir = root / (name + "-" + std::to_string(dirs.size()));
      auto full = args;
      full.insert(full.end(), {"--threads", threads, "--out", dir.string()});
      if (cli(full) != 0) return {false, "command " + name + " failed"};
      dirs.push_back(dir);
    }
    for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
      ++files;
      const std::string reference = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        if (slurp(dirs[k] / entry.path().filename()) != reference) ++mismatches;
      }
    }
  }
  std::filesystem::remove_all(root);
  return {mismatches == 0 && files > 0,
          std::to_string(files) + " files compared across repeats and 1/4 threads, " +
              std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> allowed;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--allow-fail") allowed.insert(std::stoi(argv[++i]));
  }
  const unsigned threads = default_thread_count();
  int blocking = 0;
  const auto report = [&](int id, const char* title, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool tolerated = !o.pass && allowed.contains(id);
    std::printf("criterion %d %s: %s%s (%s) [%.1fs]\n", id, title, o.pass ? "PASS" : "FAIL",
                tolerated ? " (known, allowed)" : "", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass && !tolerated) ++blocking;
  };

  report(1, "volume formulas vs Monte-Carlo", [&] { return criterion1(threads); });
  report(2, "volume ordering", [] { return criterion2(); });
  report(3, "redundant pair", [] { return criterion3(); });
  report(4, "containment widths", [&] { return criterion4(threads); });

  ExperimentConfig config;
  config.scenario = Scenario::dense;
  config.bound_sets = 10;
  config.directions = 5000;
  config.seed = kSeed;
  config.threads = threads;
  std::optional<ExperimentResult> dense;
  report(5, "width difference trend", [&] {
    dense = run_experiment(config);
    return criterion5(*dense);
  });
  report(6, "performance profile dominance", [&] {
    return dense ? criterion6(*dense) : Outcome{false, "no experiment result"};
  });
  report(7, "radius regressions", [&] {
    return dense ? criterion7(*dense) : Outcome{false, "no experiment result"};
  });
  report(8, "worst case sweep", [&] { return criterion8(threads); });
  report(9, "determinism", [] { return criterion9(); });
  return blocking == 0 ? 0 : 1;
}
