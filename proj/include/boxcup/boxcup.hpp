#pragma once

// Box cubic problem instances: hypergraph scenarios, random bounds, random
// objective directions and the four aggregate relaxations.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boxcup/lp.hpp"
#include "boxcup/trilinear.hpp"

namespace boxcup {

/// 3-uniform hypergraph on vertices 1..n; each edge is stored sorted.
class Hypergraph {
 public:
  Hypergraph(int n, std::vector<std::array<int, 3>> edges);

  int n() const { return n_; }
  const std::vector<std::array<int, 3>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Number of edges containing vertex v (1-based).
  int degree(int v) const;

 private:
  int n_;
  std::vector<std::array<int, 3>> edges_;
};

enum class Scenario { dense, sparse, very_sparse };

Scenario parse_scenario(std::string_view name);
std::string to_string(Scenario scenario);

/// dense: complete on 6 vertices. sparse: the 20 cyclic triples on 20
/// vertices. very-sparse: 20 edges on 30 vertices, every vertex in exactly two
/// edges (edge e_i meets e_{i+1} in one vertex and e_{i+10} in another).
Hypergraph make_hypergraph(Scenario scenario);

struct Interval {
  int lower = 0;
  int upper = 1;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Integer box bounds for vertices 1..n (stored 0-based).
struct BoundsSet {
  std::vector<Interval> bounds;

  std::size_t n() const { return bounds.size(); }
  const Interval& at_vertex(int v) const { return bounds.at(static_cast<std::size_t>(v - 1)); }
  friend bool operator==(const BoundsSet&, const BoundsSet&) = default;
};

/// Each interval uniform over the 55 integer pairs 0 <= a < b <= 10.
BoundsSet gen_bounds(int n, std::uint64_t seed);

/// The 55 admissible pairs in lexicographic order.
const std::vector<Interval>& admissible_intervals();

struct Direction {
  std::vector<double> q;
};

/// `count` independent standard-normal vectors of dimension m, normalized.
std::vector<Direction> gen_directions(int m, std::size_t count, std::uint64_t seed);

enum class Relaxation { hull, p1, p2, p3 };

/// "h", "1", "2", "3".
std::string to_string(Relaxation relaxation);
Relaxation parse_relaxation(std::string_view name);
inline constexpr std::array<Relaxation, 4> kAllRelaxations = {
    Relaxation::hull, Relaxation::p1, Relaxation::p2, Relaxation::p3};

/// Grouping used by a double-McCormick relaxation (throws for the hull).
GroupingChoice grouping_of(Relaxation relaxation);

/// Box of one edge, in edge vertex order.
Bounds3 edge_bounds(const BoundsSet& bounds, const std::array<int, 3>& edge);

/// LP region of one aggregate relaxation. Variables are x1..xn, then one f
/// per edge, then (hull only) eight multipliers per edge.
struct AssembledRelaxation {
  Relaxation relaxation;
  LinearProgram lp;
  /// Variable index of the f variable of each edge.
  std::vector<std::size_t> f_index;
};

/// How the hull relaxation is written: the multiplier formulation over the
/// eight corners, or its projection given by the envelope inequalities.
enum class HullForm { extended, envelope };

/// Per edge: label the edge's own box, instantiate the chosen system on
/// (f_e, x_i, x_j, x_k) and add its rows; x variables are shared. `hull_form`
/// only matters for the hull relaxation.
AssembledRelaxation assemble_relaxation(const Hypergraph& h, const BoundsSet& bounds,
                                        Relaxation relaxation,
                                        HullForm hull_form = HullForm::extended);

}  // namespace boxcup
