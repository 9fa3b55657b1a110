#include "boxcup/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxcup {

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper) {
  if (name.empty()) throw std::invalid_argument("variable name must not be empty");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("invalid bounds for variable '" + name + "'");
  }
  if (index_.contains(name)) {
    throw std::invalid_argument("variable '" + name + "' declared twice");
  }
  index_.emplace(name, variables_.size());
  variables_.push_back({std::move(name), lower, upper});
  objective_.push_back(0.0);
  return variables_.size() - 1;
}

void LinearProgram::add_constraint(LinearInequality row) {
  for (const auto& term : row.terms()) {
    if (!index_.contains(term.variable)) {
      throw std::invalid_argument("constraint references undeclared variable '" +
                                  term.variable + "'");
    }
  }
  constraints_.push_back(std::move(row));
}

void LinearProgram::set_objective(std::span<const Term> objective) {
  std::fill(objective_.begin(), objective_.end(), 0.0);
  for (const auto& term : objective) objective_[index_of(term.variable)] += term.coefficient;
}

void LinearProgram::set_objective_coefficient(std::size_t index, double coefficient) {
  objective_.at(index) = coefficient;
}

std::size_t LinearProgram::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown variable '" + name + "'");
  return it->second;
}

double LinearProgram::max_violation(std::span<const double> point) const {
  if (point.size() != variables_.size()) {
    throw std::invalid_argument("point dimension does not match the program");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max({worst, variables_[j].lower - point[j], point[j] - variables_[j].upper});
  }
  for (const auto& row : constraints_) {
    double lhs = 0.0;
    for (const auto& t : row.terms()) lhs += t.coefficient * point[index_of(t.variable)];
    worst = std::max(worst, row.rhs() - lhs);
  }
  return worst;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kRecomputeEvery = 25;
constexpr std::size_t kRefactorEvery = 50;
constexpr int kPolishPasses = 4;
constexpr double kRatioTie = 1e-12;
constexpr double kHarrisTol = 1e-9;

}  // namespace

// Variable ids: [0, structural_) structural columns, [structural_,
// structural_ + rows_) row logicals (the row activity a'x), and one trailing
// constant fixed at 1 that carries folded-in fixed columns.
Simplex::Simplex(const LinearProgram& lp, SimplexOptions options) : options_(options) {
  structural_ = lp.variable_count();
  lower_.reserve(structural_);
  upper_.reserve(structural_);
  for (const auto& v : lp.variables()) {
    lower_.push_back(v.lower);
    upper_.push_back(v.upper);
  }

  std::vector<std::vector<double>> dense;
  const auto& rows = lp.constraints();
  dense.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> coef(structural_, 0.0);
    for (const auto& t : row.terms()) coef[lp.index_of(t.variable)] += t.coefficient;
    dense.push_back(std::move(coef));
  }

  std::vector<std::vector<double>> general;
  std::vector<double> row_lower, row_upper;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& coef = dense[r];
    const double rhs = rows[r].rhs();
    std::size_t nnz = 0, last = 0;
    for (std::size_t j = 0; j < structural_; ++j) {
      if (coef[j] != 0.0) {
        ++nnz;
        last = j;
      }
    }
    if (nnz == 0) {
      // Cancelled duplicate terms; the row reads 0 >= rhs.
      if (rhs > options_.feasibility_tol) {
        feasibility_ = SolveStatus::infeasible;
        return;
      }
      continue;
    }
    if (nnz == 1) {
      const double bound = rhs / coef[last];
      if (coef[last] > 0.0) {
        lower_[last] = std::max(lower_[last], bound);
      } else {
        upper_[last] = std::min(upper_[last], bound);
      }
      continue;
    }
    bool equation = false;
    if (r + 1 < rows.size() && rows[r + 1].rhs() == -rhs) {
      const auto& next = dense[r + 1];
      equation = std::equal(coef.begin(), coef.end(), next.begin(),
                            [](double x, double y) { return x == -y; });
    }
    general.push_back(coef);
    row_lower.push_back(rhs);
    row_upper.push_back(equation ? rhs : kInfinity);
    if (equation) ++r;
  }

  for (std::size_t j = 0; j < structural_; ++j) {
    if (lower_[j] > upper_[j]) {
      if (lower_[j] - upper_[j] > options_.feasibility_tol) {
        feasibility_ = SolveStatus::infeasible;
        return;
      }
      upper_[j] = lower_[j];
    }
  }

  rows_ = general.size();
  matrix_.reserve(rows_ * structural_);
  for (const auto& row : general) matrix_.insert(matrix_.end(), row.begin(), row.end());
  lower_.insert(lower_.end(), row_lower.begin(), row_lower.end());
  upper_.insert(upper_.end(), row_upper.begin(), row_upper.end());
  const std::size_t constant = structural_ + rows_;
  lower_.push_back(1.0);
  upper_.push_back(1.0);

  State& s = start_;
  s.value.assign(constant + 1, 0.0);
  for (std::size_t j = 0; j < structural_; ++j) {
    if (std::isfinite(lower_[j])) {
      s.value[j] = lower_[j];
    } else if (std::isfinite(upper_[j])) {
      s.value[j] = upper_[j];
    }
  }
  s.value[constant] = 1.0;

  const std::size_t cols = structural_ + 1;
  s.nonbasic.resize(cols);
  for (std::size_t j = 0; j < structural_; ++j) s.nonbasic[j] = j;
  s.nonbasic[structural_] = constant;
  s.basic.resize(rows_);
  s.tableau.assign(rows_ * cols, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    s.basic[i] = structural_ + i;
    std::copy(general[i].begin(), general[i].end(), s.tableau.begin() + i * cols);
  }
  recompute_basic(s);

  std::size_t iterations = 0;
  const SolveStatus phase1 = iterate(s, Phase::one, {}, iterations);
  if (phase1 == SolveStatus::failed || !refactor(s)) {
    feasibility_ = SolveStatus::failed;
    return;
  }
  recompute_basic(s);
  for (std::size_t var : s.basic) {
    if (infeasibility(s, var) > options_.feasibility_tol) {
      feasibility_ = SolveStatus::infeasible;
      return;
    }
  }
  drop_fixed_nonbasic(s);
  feasibility_ = SolveStatus::optimal;
}

double Simplex::infeasibility(const State& s, std::size_t var) const {
  const double v = s.value[var];
  return std::max({0.0, lower_[var] - v, v - upper_[var]});
}

void Simplex::recompute_basic(State& s) const {
  const std::size_t cols = s.nonbasic.size();
  for (std::size_t i = 0; i < s.basic.size(); ++i) {
    const double* row = s.tableau.data() + i * cols;
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) sum += row[j] * s.value[s.nonbasic[j]];
    s.value[s.basic[i]] = sum;
  }
}

// Fixed nonbasic columns never enter again; fold them into the constant column.
void Simplex::drop_fixed_nonbasic(State& s) const {
  const std::size_t cols = s.nonbasic.size();
  const std::size_t constant = structural_ + rows_;
  const auto const_col = static_cast<std::size_t>(
      std::find(s.nonbasic.begin(), s.nonbasic.end(), constant) - s.nonbasic.begin());
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t var = s.nonbasic[j];
    if (var != constant && lower_[var] == upper_[var]) {
      for (std::size_t i = 0; i < s.basic.size(); ++i) {
        s.tableau[i * cols + const_col] += s.tableau[i * cols + j] * s.value[var];
      }
    } else {
      keep.push_back(j);
    }
  }
  if (keep.size() == cols) return;
  std::vector<double> compact(s.basic.size() * keep.size());
  std::vector<std::size_t> nonbasic(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) nonbasic[k] = s.nonbasic[keep[k]];
  for (std::size_t i = 0; i < s.basic.size(); ++i) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      compact[i * keep.size() + k] = s.tableau[i * cols + keep[k]];
    }
  }
  s.tableau = std::move(compact);
  s.nonbasic = std::move(nonbasic);
}

// Rebuilds the tableau for the current basis from the original rows. Only the
// structural basics need a dense solve: the rows whose logical is nonbasic
// (or fixed) determine them from the nonbasic values.
bool Simplex::refactor(State& s) const {
  const std::size_t cols = s.nonbasic.size();
  const std::size_t constant = structural_ + rows_;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> column(constant + 1, none), basic_pos(constant + 1, none);
  for (std::size_t j = 0; j < cols; ++j) column[s.nonbasic[j]] = j;
  const std::size_t cc = column[constant];
  if (cc == none) return false;

  std::vector<std::size_t> bs;
  for (std::size_t var : s.basic) {
    if (var < structural_) {
      basic_pos[var] = bs.size();
      bs.push_back(var);
    }
  }
  for (std::size_t i = 0; i < s.basic.size(); ++i) {
    if (s.basic[i] >= structural_) basic_pos[s.basic[i]] = i;
  }
  std::vector<std::size_t> free_rows;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (basic_pos[structural_ + r] == none) free_rows.push_back(r);
  }
  const std::size_t k = bs.size();
  if (free_rows.size() != k) return false;

  // M x_B = R * (nonbasic values), one row per free row.
  std::vector<double> m(k * k), rhs(k * cols, 0.0);
  double scale = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const double* arow = matrix_.data() + free_rows[a] * structural_;
    for (std::size_t b = 0; b < k; ++b) {
      m[a * k + b] = arow[bs[b]];
      scale = std::max(scale, std::abs(arow[bs[b]]));
    }
    double* r = rhs.data() + a * cols;
    const std::size_t logical = structural_ + free_rows[a];
    if (column[logical] != none) {
      r[column[logical]] += 1.0;
    } else {
      r[cc] += s.value[logical];
    }
    for (std::size_t j = 0; j < structural_; ++j) {
      if (arow[j] == 0.0 || basic_pos[j] != none) continue;
      if (column[j] != none) {
        r[column[j]] -= arow[j];
      } else {
        r[cc] -= arow[j] * s.value[j];
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t a = c + 1; a < k; ++a) {
      if (std::abs(m[a * k + c]) > std::abs(m[p * k + c])) p = a;
    }
    if (std::abs(m[p * k + c]) <= 1e-12 * std::max(scale, 1.0)) return false;
    if (p != c) {
      std::swap_ranges(m.begin() + c * k, m.begin() + (c + 1) * k, m.begin() + p * k);
      std::swap_ranges(rhs.begin() + c * cols, rhs.begin() + (c + 1) * cols, rhs.begin() + p * cols);
    }
    for (std::size_t a = c + 1; a < k; ++a) {
      const double f = m[a * k + c] / m[c * k + c];
      if (f == 0.0) continue;
      for (std::size_t b = c; b < k; ++b) m[a * k + b] -= f * m[c * k + b];
      for (std::size_t j = 0; j < cols; ++j) rhs[a * cols + j] -= f * rhs[c * cols + j];
    }
  }
  for (std::size_t c = k; c-- > 0;) {
    for (std::size_t b = c + 1; b < k; ++b) {
      const double f = m[c * k + b];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) rhs[c * cols + j] -= f * rhs[b * cols + j];
    }
    const double d = m[c * k + c];
    for (std::size_t j = 0; j < cols; ++j) rhs[c * cols + j] /= d;
  }

  for (std::size_t i = 0; i < s.basic.size(); ++i) {
    const std::size_t var = s.basic[i];
    double* row = s.tableau.data() + i * cols;
    if (var < structural_) {
      std::copy_n(rhs.data() + basic_pos[var] * cols, cols, row);
      continue;
    }
    std::fill_n(row, cols, 0.0);
    const double* arow = matrix_.data() + (var - structural_) * structural_;
    for (std::size_t j = 0; j < structural_; ++j) {
      const double a = arow[j];
      if (a == 0.0) continue;
      if (basic_pos[j] != none) {
        const double* x = rhs.data() + basic_pos[j] * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] += a * x[c];
      } else if (column[j] != none) {
        row[column[j]] += a;
      } else {
        row[cc] += a * s.value[j];
      }
    }
  }
  return true;
}

void Simplex::pivot(State& s, std::size_t p, std::size_t q) const {
  const std::size_t cols = s.nonbasic.size();
  double* prow = s.tableau.data() + p * cols;
  const double pv = prow[q];
  for (std::size_t i = 0; i < s.basic.size(); ++i) {
    if (i == p) continue;
    double* row = s.tableau.data() + i * cols;
    const double factor = row[q] / pv;
    if (factor == 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) row[j] -= factor * prow[j];
    row[q] = factor;
  }
  for (std::size_t j = 0; j < cols; ++j) prow[j] = -prow[j] / pv;
  prow[q] = 1.0 / pv;
  std::swap(s.basic[p], s.nonbasic[q]);
}

SolveStatus Simplex::iterate(State& s, Phase phase, std::span<const double> cost,
                             std::size_t& iterations) const {
  const std::size_t m = s.basic.size();
  const std::size_t cols = s.nonbasic.size();
  const std::size_t constant = structural_ + rows_;
  const double ftol = options_.feasibility_tol;
  std::vector<double> basic_cost(m);
  std::vector<double> reduced(cols);
  std::size_t degenerate = 0;
  std::size_t since_refresh = 0;
  std::size_t since_refactor = 0;
  bool stale = true;
  struct Limit {
    std::size_t row;
    double coef;
    double step;
    double target;
  };
  std::vector<Limit> limits;

  const auto var_cost = [&](std::size_t var) {
    return phase == Phase::two && var < structural_ ? cost[var] : 0.0;
  };

  while (true) {
    if (iterations >= options_.iteration_limit) return SolveStatus::failed;
    const bool bland = degenerate >= options_.degenerate_pivots_before_bland;

    // Phase 1 costs depend on which basics are infeasible, so they are rebuilt
    // every iteration; phase 2 reduced costs are carried through the pivots.
    if (phase == Phase::one || stale) {
      bool any_cost = false;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t var = s.basic[i];
        if (phase == Phase::one) {
          const double v = s.value[var];
          basic_cost[i] = v < lower_[var] - ftol ? -1.0 : (v > upper_[var] + ftol ? 1.0 : 0.0);
        } else {
          basic_cost[i] = var_cost(var);
        }
        any_cost = any_cost || basic_cost[i] != 0.0;
      }
      if (phase == Phase::one && !any_cost) return SolveStatus::optimal;
      for (std::size_t j = 0; j < cols; ++j) reduced[j] = var_cost(s.nonbasic[j]);
      for (std::size_t i = 0; i < m; ++i) {
        if (basic_cost[i] == 0.0) continue;
        const double* row = s.tableau.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) reduced[j] += basic_cost[i] * row[j];
      }
      stale = false;
    }

    // Pricing.
    std::size_t enter = cols;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t var = s.nonbasic[j];
      if (var == constant || lower_[var] == upper_[var]) continue;
      const double rc = reduced[j];
      const double v = s.value[var];
      const bool eligible = (rc < -options_.optimality_tol && v < upper_[var]) ||
                            (rc > options_.optimality_tol && v > lower_[var]);
      if (!eligible) continue;
      const double score = std::abs(rc);
      bool take = false;
      if (enter == cols) {
        take = true;
      } else if (bland) {
        take = var < s.nonbasic[enter];
      } else {
        take = score > best_score || (score == best_score && var < s.nonbasic[enter]);
      }
      if (take) {
        enter = j;
        best_score = score;
      }
    }
    if (enter == cols) return SolveStatus::optimal;

    const std::size_t enter_var = s.nonbasic[enter];
    const double dir = reduced[enter] < 0.0 ? 1.0 : -1.0;

    // Ratio test, two passes: the largest step allowed when every bound is
    // relaxed by kHarrisTol, then the largest pivot among rows blocking
    // within that step.
    limits.clear();
    double max_step = kInfinity;
    for (std::size_t i = 0; i < m; ++i) {
      const double coef = s.tableau[i * cols + enter];
      if (std::abs(coef) <= options_.pivot_tol) continue;
      const double rate = coef * dir;
      const std::size_t var = s.basic[i];
      const double v = s.value[var];
      double target = 0.0;
      bool limited = false;
      if (phase == Phase::one && v < lower_[var] - ftol) {
        if (rate > 0.0) {
          target = lower_[var];
          limited = true;
        }
      } else if (phase == Phase::one && v > upper_[var] + ftol) {
        if (rate < 0.0) {
          target = upper_[var];
          limited = true;
        }
      } else if (rate > 0.0 && std::isfinite(upper_[var])) {
        target = upper_[var];
        limited = true;
      } else if (rate < 0.0 && std::isfinite(lower_[var])) {
        target = lower_[var];
        limited = true;
      }
      if (!limited) continue;
      const double step = std::max(0.0, (target - v) / rate);
      const double relaxed = std::max(0.0, (target + (rate > 0.0 ? kHarrisTol : -kHarrisTol) - v) / rate);
      max_step = std::min(max_step, relaxed);
      limits.push_back({i, coef, step, target});
    }
    std::size_t leave = m;
    double best_step = kInfinity;
    double leave_target = 0.0;
    double best_pivot = 0.0;
    for (const Limit& l : limits) {
      if (l.step > max_step) continue;
      const double mag = std::abs(l.coef);
      const std::size_t var = s.basic[l.row];
      bool take = false;
      if (leave == m) {
        take = true;
      } else if (bland) {
        take = var < s.basic[leave];
      } else {
        take = mag > best_pivot || (mag == best_pivot && var < s.basic[leave]);
      }
      if (take) {
        leave = l.row;
        best_step = l.step;
        best_pivot = mag;
        leave_target = l.target;
      }
    }

    const double flip = upper_[enter_var] - lower_[enter_var];
    if (leave == m && !std::isfinite(flip)) {
      return phase == Phase::two ? SolveStatus::unbounded : SolveStatus::failed;
    }

    ++iterations;
    if (leave == m || flip <= best_step) {
      // Entering variable moves to its opposite bound without a basis change.
      for (std::size_t i = 0; i < m; ++i) {
        s.value[s.basic[i]] += s.tableau[i * cols + enter] * dir * flip;
      }
      s.value[enter_var] = dir > 0.0 ? upper_[enter_var] : lower_[enter_var];
      continue;
    }

    const double step = best_step;
    for (std::size_t i = 0; i < m; ++i) {
      s.value[s.basic[i]] += s.tableau[i * cols + enter] * dir * step;
    }
    s.value[enter_var] += dir * step;
    s.value[s.basic[leave]] = leave_target;
    if (phase == Phase::two) {
      const double factor = reduced[enter] / s.tableau[leave * cols + enter];
      const double* prow = s.tableau.data() + leave * cols;
      for (std::size_t j = 0; j < cols; ++j) reduced[j] -= factor * prow[j];
      reduced[enter] = factor;
    }
    pivot(s, leave, enter);
    if (step <= kRatioTie) ++degenerate;
    ++since_refactor;
    if (since_refactor >= kRefactorEvery) {
      if (!refactor(s)) return SolveStatus::failed;
      since_refactor = 0;
      since_refresh = kRecomputeEvery;
    }
    if (++since_refresh >= kRecomputeEvery) {
      recompute_basic(s);
      stale = true;
      since_refresh = 0;
    }
  }
}

Solution Simplex::solve(std::span<const double> objective, Sense sense) const {
  Solution out;
  if (feasibility_ != SolveStatus::optimal) {
    out.status = feasibility_;
    return out;
  }
  if (objective.size() != structural_) {
    throw std::invalid_argument("objective dimension does not match the program");
  }
  std::vector<double> cost(objective.begin(), objective.end());
  if (sense == Sense::maximize) {
    for (auto& c : cost) c = -c;
  }
  State s = start_;
  // Re-optimize from a freshly rebuilt tableau until the basis is both
  // feasible and optimal without further pivots.
  bool settled = false;
  for (int pass = 0; pass < kPolishPasses && !settled; ++pass) {
    const std::size_t before = out.iterations;
    out.status = iterate(s, Phase::two, cost, out.iterations);
    if (out.status != SolveStatus::optimal) return out;
    if (!refactor(s)) {
      out.status = SolveStatus::failed;
      return out;
    }
    recompute_basic(s);
    const bool feasible = std::all_of(s.basic.begin(), s.basic.end(), [&](std::size_t var) {
      return infeasibility(s, var) <= options_.feasibility_tol;
    });
    if (!feasible) {
      if (iterate(s, Phase::one, {}, out.iterations) != SolveStatus::optimal) {
        out.status = SolveStatus::failed;
        return out;
      }
      continue;
    }
    settled = pass > 0 && out.iterations == before;
    if (pass == 0) {
      // One more pricing pass on the rebuilt tableau.
      const std::size_t mark = out.iterations;
      out.status = iterate(s, Phase::two, cost, out.iterations);
      if (out.status != SolveStatus::optimal) return out;
      settled = out.iterations == mark;
    }
  }
  if (!settled) {
    out.status = SolveStatus::failed;
    return out;
  }
  out.point.assign(s.value.begin(), s.value.begin() + static_cast<std::ptrdiff_t>(structural_));
  double value = 0.0;
  for (std::size_t j = 0; j < structural_; ++j) value += objective[j] * out.point[j];
  out.value = value;
  return out;
}

double Simplex::width(std::span<const double> direction) const {
  const Solution hi = solve(direction, Sense::maximize);
  if (hi.status != SolveStatus::optimal) {
    throw std::runtime_error("width: maximization " + to_string(hi.status));
  }
  const Solution lo = solve(direction, Sense::minimize);
  if (lo.status != SolveStatus::optimal) {
    throw std::runtime_error("width: minimization " + to_string(lo.status));
  }
  return std::max(0.0, hi.value - lo.value);
}

Solution solve(const LinearProgram& lp, Sense sense) {
  return Simplex(lp).solve(lp.objective(), sense);
}

double directional_width(const LinearProgram& lp, std::span<const Term> direction) {
  std::vector<double> dense(lp.variable_count(), 0.0);
  for (const auto& t : direction) dense[lp.index_of(t.variable)] += t.coefficient;
  return Simplex(lp).width(dense);
}

}  // namespace boxcup
