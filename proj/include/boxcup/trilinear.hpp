#pragma once

// Polyhedral systems for a single trilinear monomial f = x1*x2*x3 on a box:
// bilinear McCormick, the three projected double-McCormick systems and a
// vertex-based extended formulation of the convex hull.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "boxcup/inequality.hpp"

namespace boxcup {

/// Box [a1,b1] x [a2,b2] x [a3,b3] with 0 <= a_i < b_i. Indices are 0-based.
class Bounds3 {
 public:
  Bounds3(std::array<double, 3> lower, std::array<double, 3> upper);

  double lower(int i) const { return lower_[static_cast<std::size_t>(i)]; }
  double upper(int i) const { return upper_[static_cast<std::size_t>(i)]; }
  const std::array<double, 3>& lower() const { return lower_; }
  const std::array<double, 3>& upper() const { return upper_; }

  /// Bounds reordered so that result variable i is this box's variable perm[i].
  Bounds3 permuted(const std::array<int, 3>& perm) const;
  /// All six constants multiplied by t > 0.
  Bounds3 scaled(double t) const;

  friend bool operator==(const Bounds3&, const Bounds3&) = default;

 private:
  std::array<double, 3> lower_;
  std::array<double, 3> upper_;
};

/// The three mixed corner sums ordered by the labeling condition:
///   a1b2b3 + b1a2a3,  b1a2b3 + a1b2a3,  b1b2a3 + a1a2b3.
std::array<double, 3> omega_sums(const Bounds3& bounds);

/// True when the three sums are nondecreasing (up to a 1e-12 relative slack).
bool satisfies_omega(const Bounds3& bounds);

struct OmegaLabeling {
  /// labeled variable i is original variable perm[i] (0-based).
  std::array<int, 3> perm;
  Bounds3 labeled;
};

/// Lexicographically smallest permutation whose relabeled box satisfies the
/// labeling condition. One always exists: the three sums are the three
/// pairings of the corner products, so sorting them gives a valid order.
OmegaLabeling omega_permutation(const Bounds3& bounds);

/// Which labeled variable (1, 2 or 3) is left out of the first McCormick
/// step. System i groups the other two variables first.
class GroupingChoice {
 public:
  explicit GroupingChoice(int system_index);

  int system_index() const { return index_; }
  /// 0-based index of the ungrouped variable.
  int ungrouped() const { return index_ - 1; }
  /// 0-based grouped indices, smaller first.
  std::array<int, 2> grouped() const;

  friend bool operator==(const GroupingChoice&, const GroupingChoice&) = default;

 private:
  int index_;
};

enum class SystemKind { bilinear_mccormick, double_mccormick, hull_extended };

std::string to_string(SystemKind kind);

/// A finite list of >=-inequalities. The first `projected_dimension()`
/// variables are the ones a membership query supplies values for; any
/// remaining variables (the hull's convex multipliers) are auxiliary.
class InequalitySystem {
 public:
  InequalitySystem(SystemKind kind, std::vector<std::string> variables,
                   std::vector<LinearInequality> inequalities);

  SystemKind kind() const { return kind_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<LinearInequality>& inequalities() const { return inequalities_; }
  std::size_t projected_dimension() const;

  /// Positional renaming of every variable; used when placing a per-monomial
  /// system inside a larger model.
  InequalitySystem renamed(std::span<const std::string> names) const;

 private:
  SystemKind kind_;
  std::vector<std::string> variables_;
  std::vector<LinearInequality> inequalities_;
};

/// Default variable names for the single-monomial systems.
inline const std::array<std::string, 4> kMonomialVariables = {"f", "x1", "x2", "x3"};

/// The four McCormick inequalities for w = xi * xj, over variables (xi, xj, w).
InequalitySystem mccormick_bilinear(double a_i, double b_i, double a_j, double b_j);

/// The 14 projected double-McCormick inequalities over (f, x1, x2, x3) for the
/// given grouping. `labeled` must
/// satisfy the labeling condition.
InequalitySystem double_mccormick_system(const Bounds3& labeled, GroupingChoice choice);

/// The two inequalities f - a_i a_j x_k >= 0 and -f + b_i b_j x_k >= 0 that the
/// elimination also produces. They are implied by the 14 above and are never
/// part of `double_mccormick_system`; exposed so the implication can be checked.
std::vector<LinearInequality> double_mccormick_redundant_pair(const Bounds3& labeled,
                                                              GroupingChoice choice);

/// f-value x1*x2*x3 at the 8 box corners. Corner v takes the upper bound of
/// variable i when bit i of v is set.
std::array<double, 8> corner_values(const Bounds3& bounds);

/// Extended formulation of the convex hull over variables (f, x1, x2, x3,
/// l0..l7): 8 nonnegativity rows, the normalization equation and the four
/// linking equations (equations as consecutive inequality pairs).
InequalitySystem hull_formulation(const Bounds3& bounds);

/// Lower and upper envelope pieces of the hull over (f, x1, x2, x3): every
/// affine interpolant through four corners of the graph that lies below (or
/// above) all eight corners, deduplicated. Together with the box bounds they
/// describe the same set as `hull_formulation` projected onto (f, x).
std::vector<LinearInequality> hull_envelope_inequalities(const Bounds3& bounds);

/// Whether `point` (values for the projected variables) lies in the projection
/// of the system's feasible set, within `tol`. Hull systems are decided by an
/// LP feasibility problem in the multipliers.
bool membership(std::span<const double> point, const InequalitySystem& system, double tol);

/// Precompiled membership test for repeated queries on one (f, x1, x2, x3)
/// system. For hull systems the lower and upper envelope pieces are found by
/// enumerating the affine interpolants through four corners, so each query is
/// a handful of dot products.
class MembershipTester {
 public:
  explicit MembershipTester(const InequalitySystem& system);

  bool contains(std::span<const double, 4> point, double tol) const;

  /// Number of dense rows checked per query.
  std::size_t row_count() const { return rows_.size(); }

 private:
  struct Row {
    std::array<double, 4> coef;
    double rhs;
  };
  std::vector<Row> rows_;
};

}  // namespace boxcup
