#include "boxcup/boxcup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "boxcup/rng.hpp"

namespace boxcup {

Hypergraph::Hypergraph(int n, std::vector<std::array<int, 3>> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n_ < 3) throw std::invalid_argument("hypergraph needs at least 3 vertices");
  std::set<std::array<int, 3>> seen;
  for (auto& e : edges_) {
    std::sort(e.begin(), e.end());
    if (e[0] < 1 || e[2] > n_ || e[0] == e[1] || e[1] == e[2]) {
      throw std::invalid_argument("hyperedge needs 3 distinct vertices in 1..n");
    }
    if (!seen.insert(e).second) throw std::invalid_argument("duplicate hyperedge");
  }
}

int Hypergraph::degree(int v) const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [v](const auto& e) {
    return e[0] == v || e[1] == v || e[2] == v;
  }));
}

Scenario parse_scenario(std::string_view name) {
  if (name == "dense") return Scenario::dense;
  if (name == "sparse") return Scenario::sparse;
  if (name == "very-sparse") return Scenario::very_sparse;
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected dense, sparse or very-sparse)");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::dense: return "dense";
    case Scenario::sparse: return "sparse";
    case Scenario::very_sparse: return "very-sparse";
  }
  return "unknown";
}

Hypergraph make_hypergraph(Scenario scenario) {
  std::vector<std::array<int, 3>> edges;
  switch (scenario) {
    case Scenario::dense:
      for (int i = 1; i <= 6; ++i)
        for (int j = i + 1; j <= 6; ++j)
          for (int k = j + 1; k <= 6; ++k) edges.push_back({i, j, k});
      return Hypergraph(6, std::move(edges));
    case Scenario::sparse:
      for (int i = 0; i < 20; ++i) edges.push_back({i + 1, (i + 1) % 20 + 1, (i + 2) % 20 + 1});
      return Hypergraph(20, std::move(edges));
    case Scenario::very_sparse:
      // Vertex i+1 (i < 20) is shared by e_i and e_{i+1}; vertex 21+j is
      // shared by e_j and e_{j+10}.
      for (int i = 0; i < 20; ++i) edges.push_back({(i + 19) % 20 + 1, i + 1, 21 + i % 10});
      return Hypergraph(30, std::move(edges));
  }
  throw std::invalid_argument("unknown scenario");
}

const std::vector<Interval>& admissible_intervals() {
  static const std::vector<Interval> pairs = [] {
    std::vector<Interval> out;
    for (int a = 0; a <= 10; ++a)
      for (int b = a + 1; b <= 10; ++b) out.push_back({a, b});
    return out;
  }();
  return pairs;
}

BoundsSet gen_bounds(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one vertex");
  const auto& pairs = admissible_intervals();
  const std::uint64_t count = pairs.size();
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / count * count;
  Rng rng(seed);
  BoundsSet out;
  out.bounds.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uint64_t draw = 0;
    do {
      draw = rng();
    } while (draw >= limit);
    out.bounds.push_back(pairs[draw % count]);
  }
  return out;
}

std::vector<Direction> gen_directions(int m, std::size_t count, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("direction dimension must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Direction> out(count);
  for (auto& d : out) {
    double norm = 0.0;
    do {
      d.q.assign(static_cast<std::size_t>(m), 0.0);
      norm = 0.0;
      for (auto& v : d.q) {
        v = normal(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : d.q) v /= norm;
  }
  return out;
}

std::string to_string(Relaxation relaxation) {
  switch (relaxation) {
    case Relaxation::hull: return "h";
    case Relaxation::p1: return "1";
    case Relaxation::p2: return "2";
    case Relaxation::p3: return "3";
  }
  return "?";
}

Relaxation parse_relaxation(std::string_view name) {
  if (name == "h") return Relaxation::hull;
  if (name == "1") return Relaxation::p1;
  if (name == "2") return Relaxation::p2;
  if (name == "3") return Relaxation::p3;
  throw std::invalid_argument("unknown relaxation '" + std::string(name) + "'");
}

GroupingChoice grouping_of(Relaxation relaxation) {
  switch (relaxation) {
    case Relaxation::p1: return GroupingChoice(1);
    case Relaxation::p2: return GroupingChoice(2);
    case Relaxation::p3: return GroupingChoice(3);
    case Relaxation::hull: break;
  }
  throw std::invalid_argument("the hull has no grouping choice");
}

Bounds3 edge_bounds(const BoundsSet& bounds, const std::array<int, 3>& edge) {
  std::array<double, 3> a{}, b{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (edge[i] < 1 || static_cast<std::size_t>(edge[i]) > bounds.n()) {
      throw std::invalid_argument("no bounds for vertex " + std::to_string(edge[i]));
    }
    a[i] = bounds.at_vertex(edge[i]).lower;
    b[i] = bounds.at_vertex(edge[i]).upper;
  }
  return Bounds3(a, b);
}

namespace {

std::string x_name(int v) { return "x" + std::to_string(v); }

std::string f_name(const std::array<int, 3>& e) {
  return "f" + std::to_string(e[0]) + "_" + std::to_string(e[1]) + "_" + std::to_string(e[2]);
}

}  // namespace

AssembledRelaxation assemble_relaxation(const Hypergraph& h, const BoundsSet& bounds,
                                        Relaxation relaxation, HullForm hull_form) {
  if (bounds.n() < static_cast<std::size_t>(h.n())) {
    throw std::invalid_argument("bounds cover " + std::to_string(bounds.n()) +
                                " vertices, hypergraph has " + std::to_string(h.n()));
  }
  AssembledRelaxation out{relaxation, {}, {}};
  LinearProgram& lp = out.lp;
  for (int v = 1; v <= h.n(); ++v) {
    lp.add_variable(x_name(v), bounds.at_vertex(v).lower, bounds.at_vertex(v).upper);
  }

  std::vector<OmegaLabeling> labels;
  for (const auto& e : h.edges()) {
    const OmegaLabeling label = omega_permutation(edge_bounds(bounds, e));
    const auto& a = label.labeled.lower();
    const auto& b = label.labeled.upper();
    out.f_index.push_back(lp.add_variable(f_name(e), a[0] * a[1] * a[2], b[0] * b[1] * b[2]));
    labels.push_back(label);
  }
  const bool extended = relaxation == Relaxation::hull && hull_form == HullForm::extended;
  if (extended) {
    for (std::size_t edge_id = 0; edge_id < h.edge_count(); ++edge_id) {
      for (int v = 0; v < 8; ++v) {
        lp.add_variable("l" + std::to_string(edge_id) + "_" + std::to_string(v), 0.0, kInfinity);
      }
    }
  }

  std::size_t edge_id = 0;
  for (const auto& e : h.edges()) {
    const OmegaLabeling& label = labels[edge_id];
    std::vector<std::string> names{f_name(e)};
    for (int i = 0; i < 3; ++i) names.push_back(x_name(e[static_cast<std::size_t>(label.perm[i])]));
    if (relaxation == Relaxation::hull && !extended) {
      for (const auto& row : hull_envelope_inequalities(label.labeled)) {
        std::vector<Term> terms;
        for (const auto& t : row.terms()) {
          const auto pos = std::find(kMonomialVariables.begin(), kMonomialVariables.end(), t.variable);
          terms.push_back({names[static_cast<std::size_t>(pos - kMonomialVariables.begin())],
                           t.coefficient});
        }
        lp.add_constraint(LinearInequality(std::move(terms), row.rhs()));
      }
      ++edge_id;
      continue;
    }
    InequalitySystem system = [&] {
      if (relaxation == Relaxation::hull) {
        for (int v = 0; v < 8; ++v) {
          names.push_back("l" + std::to_string(edge_id) + "_" + std::to_string(v));
        }
        return hull_formulation(label.labeled).renamed(names);
      }
      return double_mccormick_system(label.labeled, grouping_of(relaxation)).renamed(names);
    }();
    for (const auto& row : system.inequalities()) lp.add_constraint(row);
    ++edge_id;
  }
  return out;
}

}  // namespace boxcup
