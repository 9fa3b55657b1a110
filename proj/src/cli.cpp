#include "boxcup/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "boxcup/parallel.hpp"

namespace boxcup {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  // Avoid "-0" so that reruns compare equal byte for byte.
  if (std::string(buf) == "-0") return "0";
  return buf;
}

std::string bounds_json(Scenario scenario, std::uint64_t seed, std::span<const BoundsSet> bounds) {
  json sets = json::array();
  for (const auto& set : bounds) {
    json pairs = json::array();
    for (const auto& iv : set.bounds) pairs.push_back({iv.lower, iv.upper});
    sets.push_back({{"n", set.n()}, {"bounds", pairs}});
  }
  json doc = {{"scenario", to_string(scenario)}, {"seed", seed}, {"bound_sets", sets}};
  return doc.dump(2) + "\n";
}

std::string hypergraph_json(const Hypergraph& h) {
  json edges = json::array();
  for (const auto& e : h.edges()) edges.push_back({e[0], e[1], e[2]});
  return json{{"n", h.n()}, {"edges", edges}}.dump(2) + "\n";
}

std::string widths_csv(std::span<const WidthRecord> records) {
  std::string out = "bound_set_id,relaxation,omega,std_error\n";
  for (const auto& r : records) {
    out += std::to_string(r.bound_set_id) + "," + to_string(r.relaxation) + "," +
           format_number(r.omega) + "," + format_number(r.std_error) + "\n";
  }
  return out;
}

std::string differences_csv(std::span<const DifferenceRow> rows) {
  std::string out = "bound_set_id,d_h3,d_23,d_13,sort_key\n";
  for (const auto& r : rows) {
    out += std::to_string(r.bound_set_id) + "," + format_number(r.d_h3) + "," +
           format_number(r.d_23) + "," + format_number(r.d_13) + "," + format_number(r.sort_key) +
           "\n";
  }
  return out;
}

std::string profile_csv(const ProfileCurve& curve) {
  std::string out = "tau,frac_1,frac_2,frac_3\n";
  for (std::size_t t = 0; t < curve.tau.size(); ++t) {
    out += format_number(curve.tau[t]) + "," + format_number(curve.fraction[0][t]) + "," +
           format_number(curve.fraction[1][t]) + "," + format_number(curve.fraction[2][t]) + "\n";
  }
  return out;
}

std::string volumes_csv(std::span<const VolumeRow> rows) {
  std::string out = "bound_set_id,edge_id,vol_h,vol_1,vol_2,vol_3\n";
  for (const auto& r : rows) {
    out += std::to_string(r.bound_set_id) + "," + std::to_string(r.edge_id) + "," +
           format_number(r.vol_h) + "," + format_number(r.vol_1) + "," + format_number(r.vol_2) +
           "," + format_number(r.vol_3) + "\n";
  }
  return out;
}

std::string regression_csv(std::span<const RegressionSeries> series) {
  std::string out = "series,slope,intercept,r2\n";
  for (const auto& s : series) {
    out += s.series + "," + format_number(s.fit.slope) + "," + format_number(s.fit.intercept) + "," +
           (s.fit.r_squared ? format_number(*s.fit.r_squared) : std::string("undefined")) + "\n";
  }
  return out;
}

std::string worstcase_csv(std::span<const WorstCaseRow> rows) {
  std::string out = "b3,a3,omega_1,omega_2,omega_3,d_23,d_21,vol_h,vol_1,vol_2,vol_3\n";
  for (const auto& r : rows) {
    out += std::to_string(r.b3) + "," + std::to_string(r.a3) + "," + format_number(r.omega_1) + "," +
           format_number(r.omega_2) + "," + format_number(r.omega_3) + "," + format_number(r.d_23) +
           "," + format_number(r.d_21) + "," + format_number(r.vol_h) + "," +
           format_number(r.vol_1) + "," + format_number(r.vol_2) + "," + format_number(r.vol_3) +
           "\n";
  }
  return out;
}

std::vector<BoundsSet> parse_bounds_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<BoundsSet> out;
  for (const auto& set : doc.at("bound_sets")) {
    BoundsSet b;
    for (const auto& pair : set.at("bounds")) {
      const Interval iv{pair.at(0).get<int>(), pair.at(1).get<int>()};
      if (iv.lower < 0 || iv.lower >= iv.upper) throw std::invalid_argument("invalid interval");
      b.bounds.push_back(iv);
    }
    if (b.n() != set.at("n").get<std::size_t>()) {
      throw std::invalid_argument("bound count does not match n");
    }
    out.push_back(std::move(b));
  }
  return out;
}

Hypergraph parse_hypergraph_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<std::array<int, 3>> edges;
  for (const auto& e : doc.at("edges")) edges.push_back({e.at(0), e.at(1), e.at(2)});
  return Hypergraph(doc.at("n").get<int>(), std::move(edges));
}

namespace {

using CsvRows = std::vector<std::vector<std::string>>;

CsvRows parse_csv(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::invalid_argument("unexpected header (want '" + header + "')");
  }
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  CsvRows rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) throw std::invalid_argument("row with wrong column count");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_number(const std::string& cell) {
  std::size_t used = 0;
  const double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::invalid_argument("bad number '" + cell + "'");
  return v;
}

int to_int(const std::string& cell) {
  std::size_t used = 0;
  const int v = std::stoi(cell, &used);
  if (used != cell.size()) throw std::invalid_argument("bad integer '" + cell + "'");
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename Fn>
auto load(const fs::path& dir, const std::string& name, Fn parse) {
  const std::string text = read_file(dir / name);
  try {
    return parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error("corrupt file " + (dir / name).string() + ": " + e.what());
  }
}

}  // namespace

std::vector<WidthRecord> parse_widths_csv(const std::string& text) {
  std::vector<WidthRecord> out;
  for (const auto& row : parse_csv(text, "bound_set_id,relaxation,omega,std_error")) {
    out.push_back({to_int(row[0]), parse_relaxation(row[1]), to_number(row[2]), to_number(row[3]), {}});
  }
  return out;
}

void write_artifacts(const fs::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  std::vector<fs::path> temps;
  const auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path tmp = dir / (name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    temps.push_back(tmp);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw std::runtime_error("cannot write " + (dir / name).string());
    }
  }
  for (std::size_t k = 0; k < files.size(); ++k) {
    fs::rename(temps[k], dir / files[k].first, ec);
    if (ec) {
      cleanup();
      throw std::runtime_error("cannot write " + (dir / files[k].first).string());
    }
  }
}

void execute(const RunConfig& config) {
  ExperimentConfig ec;
  ec.scenario = config.scenario;
  ec.bound_sets = config.bound_sets;
  ec.directions = config.directions;
  ec.seed = config.seed;
  ec.threads = config.threads;
  const ExperimentResult r = run_experiment(ec);
  write_artifacts(config.out, {{"bounds.json", bounds_json(config.scenario, config.seed, r.bounds)},
                               {"hypergraph.json", hypergraph_json(r.hypergraph)},
                               {"widths.csv", widths_csv(r.widths)},
                               {"differences.csv", differences_csv(r.differences)},
                               {"profile.csv", profile_csv(r.profile)},
                               {"volumes.csv", volumes_csv(r.volumes)},
                               {"regression.csv", regression_csv(r.regressions)}});
}

std::string emit_report(const fs::path& dir) {
  const auto widths = load(dir, "widths.csv", parse_widths_csv);
  const auto differences = load(dir, "differences.csv", [](const std::string& t) {
    return parse_csv(t, "bound_set_id,d_h3,d_23,d_13,sort_key");
  });
  const auto profile = load(dir, "profile.csv", [](const std::string& t) {
    return parse_csv(t, "tau,frac_1,frac_2,frac_3");
  });
  const auto volumes = load(dir, "volumes.csv", [](const std::string& t) {
    return parse_csv(t, "bound_set_id,edge_id,vol_h,vol_1,vol_2,vol_3");
  });
  const auto regression = load(dir, "regression.csv", [](const std::string& t) {
    return parse_csv(t, "series,slope,intercept,r2");
  });

  std::ostringstream out;
  std::size_t bound_sets = 0;
  {
    std::map<int, int> seen;
    for (const auto& w : widths) ++seen[w.bound_set_id];
    bound_sets = seen.size();
  }
  out << "bound sets: " << bound_sets << "\n";

  const auto check = [&](const std::string& file, auto body) {
    try {
      body();
    } catch (const std::exception& e) {
      throw std::runtime_error("corrupt file " + (dir / file).string() + ": " + e.what());
    }
  };

  check("volumes.csv", [&] {
    std::size_t bad = 0;
    for (const auto& row : volumes) {
      const double h = to_number(row[2]), v1 = to_number(row[3]), v2 = to_number(row[4]),
                   v3 = to_number(row[5]);
      const double slack = 1e-12 * std::max(1.0, v1);
      if (!(h <= v3 + slack && v3 <= v2 + slack && v2 <= v1 + slack)) ++bad;
    }
    out << "volume ordering violations (h <= 3 <= 2 <= 1): " << bad << " of " << volumes.size()
        << " edges\n";
  });

  check("differences.csv", [&] {
    std::size_t hull_above = 0, two_below_three = 0, one_below_two = 0;
    for (const auto& row : differences) {
      const double d_h3 = to_number(row[1]), d_23 = to_number(row[2]), d_13 = to_number(row[3]);
      if (d_h3 > 1e-6) ++hull_above;
      if (d_23 < 0.0) ++two_below_three;
      if (d_13 < d_23) ++one_below_two;
    }
    out << "width ordering violations over " << differences.size() << " bound sets:\n"
        << "  omega(h) > omega(3) + 1e-6: " << hull_above << "\n"
        << "  omega(2) < omega(3): " << two_below_three << "\n"
        << "  omega(1) < omega(2): " << one_below_two << "\n";
  });

  check("profile.csv", [&] {
    if (!profile.empty()) {
      const auto& first = profile.front();
      const auto& last = profile.back();
      out << "performance profile (fraction within factor e^tau of the hull):\n";
      for (const auto* row : {&first, &last}) {
        out << "  tau=" << (*row)[0] << ": P1 " << (*row)[1] << ", P2 " << (*row)[2] << ", P3 "
            << (*row)[3] << "\n";
      }
    }
  });

  check("regression.csv", [&] {
    out << "R^2:\n";
    for (const auto& row : regression) {
      out << "  " << row[0] << ": " << row[3] << " (slope " << row[1] << ")\n";
    }
  });

  const fs::path worst = dir / "worstcase.csv";
  if (fs::exists(worst)) {
    const auto rows = load(dir, "worstcase.csv", [](const std::string& t) {
      return parse_csv(t, "b3,a3,omega_1,omega_2,omega_3,d_23,d_21,vol_h,vol_1,vol_2,vol_3");
    });
    check("worstcase.csv", [&] {
      std::map<int, std::pair<int, double>> peak;  // b3 -> (a3, d_23)
      std::map<int, double> max_d21;
      for (const auto& row : rows) {
        const int b3 = to_int(row[0]), a3 = to_int(row[1]);
        const double d23 = to_number(row[5]), d21 = std::abs(to_number(row[6]));
        auto it = peak.find(b3);
        if (it == peak.end() || d23 > it->second.second) peak[b3] = {a3, d23};
        max_d21[b3] = std::max(max_d21[b3], d21);
      }
      out << "worst case peaks of omega(2) - omega(3):\n";
      for (const auto& [b3, p] : peak) {
        out << "  b3=" << b3 << ": a3=" << p.first << " (b3/3=" << format_number(b3 / 3.0)
            << "), peak " << format_number(p.second) << ", max |omega(2) - omega(1)| "
            << format_number(max_d21[b3]) << "\n";
      }
    });
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double-McCormick relaxations of trilinear monomials: volumes and box cubic width experiments"};
  app.require_subcommand(1);

  RunConfig config;
  config.threads = default_thread_count();
  std::string scenario = "dense";
  std::string out_dir = "results";
  bool full_scale = false;

  const auto add_scenario = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "dense | sparse | very-sparse");
    cmd->add_option("--bound-sets", config.bound_sets, "number of random bound sets")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", config.seed, "master seed");
  };
  const auto add_run = [&](CLI::App* cmd) {
    cmd->add_option("--directions", config.directions, "number of objective directions")
        ->check(CLI::PositiveNumber);
  };
  const auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", config.threads, "worker threads (default: BOXCUP_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  };
  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "results directory");
    add_threads(cmd);
  };

  auto* gen = app.add_subcommand("gen-bounds", "draw bound sets and write bounds.json, hypergraph.json");
  add_scenario(gen);
  add_out(gen);

  auto* run = app.add_subcommand("run", "full width experiment");
  add_scenario(run);
  add_run(run);
  add_out(run);
  run->add_flag("--paper-scale", full_scale, "30 bound sets and 100000 directions");

  auto* volumes = app.add_subcommand("volumes", "per-edge closed-form volumes (volumes.csv)");
  add_scenario(volumes);
  add_out(volumes);

  auto* profile = app.add_subcommand("profile", "performance profile from widths.csv");
  add_out(profile);

  auto* regress = app.add_subcommand("regress", "radius vs width regressions from a results directory");
  add_out(regress);

  auto* worst = app.add_subcommand("worst-case", "a3 sweep with x1..x5 in [0,1], x6 in [a3,b3]");
  worst->add_option("--b3", config.b3_list, "comma-separated b3 values")->delimiter(',');
  worst->add_option("--seed", config.seed, "master seed");
  add_run(worst);
  add_out(worst);

  auto* report = app.add_subcommand("report", "summarize a results directory");
  add_out(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    config.out = out_dir;
    if (full_scale) {
      config.bound_sets = 30;
      config.directions = 100000;
    }
    if (gen->parsed() || run->parsed() || volumes->parsed()) {
      config.scenario = parse_scenario(scenario);
    }

    if (gen->parsed()) {
      const Hypergraph h = make_hypergraph(config.scenario);
      const auto bounds = experiment_bounds(h, config.bound_sets, config.seed);
      write_artifacts(config.out, {{"bounds.json", bounds_json(config.scenario, config.seed, bounds)},
                                   {"hypergraph.json", hypergraph_json(h)}});
    } else if (run->parsed()) {
      execute(config);
    } else if (volumes->parsed()) {
      const Hypergraph h = make_hypergraph(config.scenario);
      const auto bounds = experiment_bounds(h, config.bound_sets, config.seed);
      std::vector<VolumeRow> rows;
      for (std::size_t k = 0; k < bounds.size(); ++k) {
        auto v = edge_volumes(h, bounds[k], static_cast<int>(k));
        rows.insert(rows.end(), v.begin(), v.end());
      }
      write_artifacts(config.out, {{"bounds.json", bounds_json(config.scenario, config.seed, bounds)},
                                   {"hypergraph.json", hypergraph_json(h)},
                                   {"volumes.csv", volumes_csv(rows)}});
    } else if (profile->parsed()) {
      const auto widths = load(config.out, "widths.csv", parse_widths_csv);
      write_artifacts(config.out,
                      {{"profile.csv", profile_csv(performance_profile(widths, default_tau_grid()))}});
    } else if (regress->parsed()) {
      const auto h = load(config.out, "hypergraph.json", parse_hypergraph_json);
      const auto bounds = load(config.out, "bounds.json", parse_bounds_json);
      const auto widths = load(config.out, "widths.csv", parse_widths_csv);
      write_artifacts(config.out,
                      {{"regression.csv", regression_csv(radius_regressions(h, bounds, widths))}});
    } else if (worst->parsed()) {
      std::vector<WorstCaseRow> rows;
      for (int b3 : config.b3_list) {
        auto block = worst_case_sweep(b3, config.directions, config.seed, config.threads);
        rows.insert(rows.end(), block.begin(), block.end());
      }
      write_artifacts(config.out, {{"worstcase.csv", worstcase_csv(rows)}});
    } else if (report->parsed()) {
      out << emit_report(config.out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace boxcup
