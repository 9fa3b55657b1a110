#pragma once

// Dense bounded-variable primal simplex for the small LPs in this project
// (a few hundred rows and columns at most).

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "boxcup/inequality.hpp"

namespace boxcup {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VariableDecl {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

/// Variables with (possibly infinite) bounds, >=-constraints over them and a
/// linear objective. Equations are given as consecutive inequality pairs.
class LinearProgram {
 public:
  std::size_t add_variable(std::string name, double lower, double upper);
  /// Every variable the inequality mentions must already be declared.
  void add_constraint(LinearInequality row);
  void set_objective(std::span<const Term> objective);
  void set_objective_coefficient(std::size_t index, double coefficient);

  const std::vector<VariableDecl>& variables() const { return variables_; }
  const std::vector<LinearInequality>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }
  std::size_t variable_count() const { return variables_.size(); }

  /// Index of a declared variable; throws std::out_of_range otherwise.
  std::size_t index_of(const std::string& name) const;
  bool has_variable(const std::string& name) const { return index_.contains(name); }

  /// Largest constraint violation of `point` (0 when feasible), bounds included.
  double max_violation(std::span<const double> point) const;

 private:
  std::vector<VariableDecl> variables_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<LinearInequality> constraints_;
  std::vector<double> objective_;
};

enum class Sense { minimize, maximize };

enum class SolveStatus { optimal, infeasible, unbounded, failed };

std::string to_string(SolveStatus status);

/// `value` and `point` are meaningful only when `status == optimal`; `point`
/// is indexed like `LinearProgram::variables()`.
struct Solution {
  SolveStatus status = SolveStatus::failed;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> point;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t degenerate_pivots_before_bland = 1000;
  std::size_t iteration_limit = 100000;
};

/// A prepared solver for one feasible region.
///
/// Construction converts the program to a condensed tableau (singleton rows
/// become variable bounds, consecutive opposite pairs become equations) and
/// runs phase 1 once. Every `solve` call starts phase 2 from that same
/// feasible basis, so results depend only on the program and the objective.
/// `solve` is const and may be called concurrently.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp, SimplexOptions options = {});

  /// Status of the region itself: optimal when feasible, infeasible otherwise
  /// (or failed on numerical trouble).
  SolveStatus feasibility() const { return feasibility_; }

  /// Optimizes `objective` (dense, indexed like the program's variables).
  Solution solve(std::span<const double> objective, Sense sense) const;

  /// max - min of `direction` over the region. Throws std::runtime_error when
  /// the region is empty, unbounded in the direction, or the solver fails.
  double width(std::span<const double> direction) const;

 private:
  struct State {
    // Condensed tableau: basic value i = sum_j tableau[i*cols + j] * nonbasic value j.
    std::vector<double> tableau;
    std::vector<std::size_t> basic;
    std::vector<std::size_t> nonbasic;
    std::vector<double> value;  // indexed by variable id (structural, then row logicals)
  };

  enum class Phase { one, two };
  SolveStatus iterate(State& s, Phase phase, std::span<const double> cost,
                      std::size_t& iterations) const;
  void pivot(State& s, std::size_t row, std::size_t col) const;
  void recompute_basic(State& s) const;
  double infeasibility(const State& s, std::size_t var) const;
  void drop_fixed_nonbasic(State& s) const;
  bool refactor(State& s) const;

  SimplexOptions options_;
  std::size_t structural_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> matrix_;  // general rows, rows_ x structural_
  SolveStatus feasibility_ = SolveStatus::failed;
  State start_;
};

/// One-shot solve of `lp` with its own objective.
Solution solve(const LinearProgram& lp, Sense sense);

/// max - min of `direction` (variable name -> coefficient) over the region of
/// `lp`; its objective is ignored. Throws when unbounded or infeasible.
double directional_width(const LinearProgram& lp, std::span<const Term> direction);

}  // namespace boxcup
