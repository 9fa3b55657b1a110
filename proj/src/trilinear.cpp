#include "boxcup/trilinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boxcup/lp.hpp"

namespace boxcup {

Bounds3::Bounds3(std::array<double, 3> lower, std::array<double, 3> upper)
    : lower_(lower), upper_(upper) {
  for (int i = 0; i < 3; ++i) {
    const double a = lower_[static_cast<std::size_t>(i)];
    const double b = upper_[static_cast<std::size_t>(i)];
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || !(a < b)) {
      throw std::invalid_argument("bounds must satisfy 0 <= a_i < b_i (variable " +
                                  std::to_string(i + 1) + ")");
    }
  }
}

Bounds3 Bounds3::permuted(const std::array<int, 3>& perm) const {
  std::array<double, 3> a{}, b{};
  for (std::size_t i = 0; i < 3; ++i) {
    a[i] = lower_.at(static_cast<std::size_t>(perm[i]));
    b[i] = upper_.at(static_cast<std::size_t>(perm[i]));
  }
  return Bounds3(a, b);
}

Bounds3 Bounds3::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("scale factor must be positive");
  std::array<double, 3> a = lower_, b = upper_;
  for (std::size_t i = 0; i < 3; ++i) {
    a[i] *= t;
    b[i] *= t;
  }
  return Bounds3(a, b);
}

std::array<double, 3> omega_sums(const Bounds3& x) {
  const auto& a = x.lower();
  const auto& b = x.upper();
  return {a[0] * b[1] * b[2] + b[0] * a[1] * a[2],
          b[0] * a[1] * b[2] + a[0] * b[1] * a[2],
          b[0] * b[1] * a[2] + a[0] * a[1] * b[2]};
}

bool satisfies_omega(const Bounds3& bounds) {
  const auto s = omega_sums(bounds);
  const double slack = 1e-12 * std::max({1.0, std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
  return s[0] <= s[1] + slack && s[1] <= s[2] + slack;
}

OmegaLabeling omega_permutation(const Bounds3& bounds) {
  std::array<int, 3> perm{0, 1, 2};
  do {
    Bounds3 labeled = bounds.permuted(perm);
    if (satisfies_omega(labeled)) return {perm, labeled};
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Unreachable for valid bounds.
  throw std::logic_error("no permutation satisfies the labeling condition");
}

GroupingChoice::GroupingChoice(int system_index) : index_(system_index) {
  if (system_index < 1 || system_index > 3) {
    throw std::invalid_argument("grouping choice must be 1, 2 or 3");
  }
}

std::array<int, 2> GroupingChoice::grouped() const {
  switch (index_) {
    case 1: return {1, 2};
    case 2: return {0, 2};
    default: return {0, 1};
  }
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::bilinear_mccormick: return "bilinear-mccormick";
    case SystemKind::double_mccormick: return "double-mccormick";
    case SystemKind::hull_extended: return "hull-extended";
  }
  return "unknown";
}

InequalitySystem::InequalitySystem(SystemKind kind, std::vector<std::string> variables,
                                   std::vector<LinearInequality> inequalities)
    : kind_(kind), variables_(std::move(variables)), inequalities_(std::move(inequalities)) {
  for (const auto& row : inequalities_) {
    for (const auto& t : row.terms()) {
      if (std::find(variables_.begin(), variables_.end(), t.variable) == variables_.end()) {
        throw std::invalid_argument("inequality uses undeclared variable '" + t.variable + "'");
      }
    }
  }
  const auto expect = [&](std::size_t vars, std::size_t rows) {
    if (variables_.size() != vars || inequalities_.size() != rows) {
      throw std::invalid_argument(to_string(kind_) + " system has the wrong shape");
    }
  };
  switch (kind_) {
    case SystemKind::bilinear_mccormick: expect(3, 4); break;
    case SystemKind::double_mccormick: expect(4, 14); break;
    case SystemKind::hull_extended: expect(12, 18); break;
  }
}

std::size_t InequalitySystem::projected_dimension() const {
  return kind_ == SystemKind::bilinear_mccormick ? 3 : 4;
}

InequalitySystem InequalitySystem::renamed(std::span<const std::string> names) const {
  if (names.size() != variables_.size()) {
    throw std::invalid_argument("renaming needs one name per variable");
  }
  std::vector<LinearInequality> rows;
  rows.reserve(inequalities_.size());
  for (const auto& row : inequalities_) {
    std::vector<Term> terms;
    for (const auto& t : row.terms()) {
      const auto pos = std::find(variables_.begin(), variables_.end(), t.variable);
      terms.push_back({names[static_cast<std::size_t>(pos - variables_.begin())], t.coefficient});
    }
    rows.emplace_back(std::move(terms), row.rhs());
  }
  return InequalitySystem(kind_, std::vector<std::string>(names.begin(), names.end()),
                          std::move(rows));
}

InequalitySystem mccormick_bilinear(double a_i, double b_i, double a_j, double b_j) {
  if (!(a_i < b_i) || !(a_j < b_j)) {
    throw std::invalid_argument("McCormick needs nondegenerate intervals");
  }
  const std::string xi = "xi", xj = "xj", w = "w";
  std::vector<LinearInequality> rows;
  rows.emplace_back(std::vector<Term>{{w, 1.0}, {xi, -a_j}, {xj, -a_i}}, -a_i * a_j);
  rows.emplace_back(std::vector<Term>{{w, -1.0}, {xi, b_j}, {xj, a_i}}, a_i * b_j);
  rows.emplace_back(std::vector<Term>{{w, -1.0}, {xi, a_j}, {xj, b_i}}, b_i * a_j);
  rows.emplace_back(std::vector<Term>{{w, 1.0}, {xi, -b_j}, {xj, -b_i}}, -b_i * b_j);
  return InequalitySystem(SystemKind::bilinear_mccormick, {xi, xj, w}, std::move(rows));
}

namespace {

struct Template {
  double ai, aj, ak, bi, bj, bk;
  std::string xi, xj, xk;
};

Template instantiate(const Bounds3& labeled, GroupingChoice choice) {
  if (!satisfies_omega(labeled)) {
    throw std::invalid_argument("bounds must be relabeled to satisfy the labeling condition first");
  }
  const auto [i, j] = choice.grouped();
  const int k = choice.ungrouped();
  return {labeled.lower(i),
          labeled.lower(j),
          labeled.lower(k),
          labeled.upper(i),
          labeled.upper(j),
          labeled.upper(k),
          kMonomialVariables[static_cast<std::size_t>(i + 1)],
          kMonomialVariables[static_cast<std::size_t>(j + 1)],
          kMonomialVariables[static_cast<std::size_t>(k + 1)]};
}

}  // namespace

InequalitySystem double_mccormick_system(const Bounds3& labeled, GroupingChoice choice) {
  const Template t = instantiate(labeled, choice);
  const double ai = t.ai, aj = t.aj, ak = t.ak, bi = t.bi, bj = t.bj, bk = t.bk;
  const std::string &xi = t.xi, &xj = t.xj, &xk = t.xk;
  const std::string f = "f";
  std::vector<LinearInequality> rows;
  rows.reserve(14);
  rows.emplace_back(std::vector<Term>{{xi, 1.0}}, ai);
  rows.emplace_back(std::vector<Term>{{xj, 1.0}}, aj);
  rows.emplace_back(std::vector<Term>{{f, 1.0}, {xi, -aj * ak}, {xj, -ai * ak}, {xk, -ai * aj}},
                    -2.0 * ai * aj * ak);
  rows.emplace_back(std::vector<Term>{{f, 1.0}, {xi, -aj * bk}, {xj, -ai * bk}, {xk, -bi * bj}},
                    -(ai * aj * bk + bi * bj * bk));
  rows.emplace_back(std::vector<Term>{{xj, -1.0}}, -bj);
  rows.emplace_back(std::vector<Term>{{xi, -1.0}}, -bi);
  rows.emplace_back(std::vector<Term>{{f, 1.0}, {xi, -bj * ak}, {xj, -bi * ak}, {xk, -ai * aj}},
                    -(ai * aj * ak + bi * bj * ak));
  rows.emplace_back(std::vector<Term>{{f, 1.0}, {xi, -bj * bk}, {xj, -bi * bk}, {xk, -bi * bj}},
                    -2.0 * bi * bj * bk);
  rows.emplace_back(std::vector<Term>{{f, -1.0}, {xi, bj * bk}, {xj, ai * bk}, {xk, ai * aj}},
                    ai * aj * bk + ai * bj * bk);
  rows.emplace_back(std::vector<Term>{{f, -1.0}, {xi, aj * bk}, {xj, bi * bk}, {xk, ai * aj}},
                    ai * aj * bk + bi * aj * bk);
  rows.emplace_back(std::vector<Term>{{xk, -1.0}}, -bk);
  rows.emplace_back(std::vector<Term>{{f, -1.0}, {xi, bj * ak}, {xj, ai * ak}, {xk, bi * bj}},
                    ai * bj * ak + bi * bj * ak);
  rows.emplace_back(std::vector<Term>{{f, -1.0}, {xi, aj * ak}, {xj, bi * ak}, {xk, bi * bj}},
                    bi * aj * ak + bi * bj * ak);
  rows.emplace_back(std::vector<Term>{{xk, 1.0}}, ak);
  return InequalitySystem(SystemKind::double_mccormick,
                          {kMonomialVariables.begin(), kMonomialVariables.end()}, std::move(rows));
}

std::vector<LinearInequality> double_mccormick_redundant_pair(const Bounds3& labeled,
                                                              GroupingChoice choice) {
  const Template t = instantiate(labeled, choice);
  std::vector<LinearInequality> rows;
  rows.emplace_back(std::vector<Term>{{"f", 1.0}, {t.xk, -t.ai * t.aj}}, 0.0);
  rows.emplace_back(std::vector<Term>{{"f", -1.0}, {t.xk, t.bi * t.bj}}, 0.0);
  return rows;
}

namespace {

std::array<double, 3> corner(const Bounds3& bounds, int v) {
  std::array<double, 3> x{};
  for (int i = 0; i < 3; ++i) {
    x[static_cast<std::size_t>(i)] = (v >> i) & 1 ? bounds.upper(i) : bounds.lower(i);
  }
  return x;
}

std::string multiplier_name(int v) { return "l" + std::to_string(v); }

}  // namespace

std::array<double, 8> corner_values(const Bounds3& bounds) {
  std::array<double, 8> out{};
  for (int v = 0; v < 8; ++v) {
    const auto x = corner(bounds, v);
    out[static_cast<std::size_t>(v)] = x[0] * x[1] * x[2];
  }
  return out;
}

InequalitySystem hull_formulation(const Bounds3& bounds) {
  std::vector<std::string> vars(kMonomialVariables.begin(), kMonomialVariables.end());
  for (int v = 0; v < 8; ++v) vars.push_back(multiplier_name(v));

  std::vector<LinearInequality> rows;
  for (int v = 0; v < 8; ++v) rows.emplace_back(std::vector<Term>{{multiplier_name(v), 1.0}}, 0.0);

  std::vector<Term> normalization;
  for (int v = 0; v < 8; ++v) normalization.push_back({multiplier_name(v), 1.0});
  append_equation(rows, normalization, 1.0);

  const auto values = corner_values(bounds);
  for (int i = 0; i < 4; ++i) {
    // x_i - sum_v v_i l_v = 0 for i < 3, then f - sum_v f(v) l_v = 0.
    std::vector<Term> terms{{i < 3 ? kMonomialVariables[static_cast<std::size_t>(i + 1)] : "f", 1.0}};
    for (int v = 0; v < 8; ++v) {
      const double c = i < 3 ? corner(bounds, v)[static_cast<std::size_t>(i)]
                             : values[static_cast<std::size_t>(v)];
      terms.push_back({multiplier_name(v), -c});
    }
    append_equation(rows, std::move(terms), 0.0);
  }
  return InequalitySystem(SystemKind::hull_extended, std::move(vars), std::move(rows));
}

bool membership(std::span<const double> point, const InequalitySystem& system, double tol) {
  const std::size_t dim = system.projected_dimension();
  if (point.size() != dim) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                " coordinates, system projects onto " + std::to_string(dim));
  }
  const auto& vars = system.variables();
  if (system.kind() != SystemKind::hull_extended) {
    for (const auto& row : system.inequalities()) {
      if (row.slack(vars, point) < -tol) return false;
    }
    return true;
  }

  // Feasibility in the multipliers with the projected variables fixed at the
  // point (equations loosened by tol).
  LinearProgram lp;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (j < dim) {
      lp.add_variable(vars[j], point[j] - tol, point[j] + tol);
    } else {
      lp.add_variable(vars[j], 0.0, kInfinity);
    }
  }
  for (const auto& row : system.inequalities()) lp.add_constraint(row);
  return Simplex(lp).feasibility() == SolveStatus::optimal;
}

namespace {

// Solves the 4x4 system m * c = r by Gaussian elimination with partial
// pivoting. Returns false when (nearly) singular.
bool solve4(std::array<std::array<double, 5>, 4> m, std::array<double, 4>& out) {
  for (int col = 0; col < 4; ++col) {
    int best = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[best][col])) best = r;
    }
    if (std::abs(m[best][col]) < 1e-12) return false;
    std::swap(m[col], m[best]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  for (int r = 0; r < 4; ++r) out[r] = m[r][4] / m[r][r];
  return true;
}

// Corner (x1, x2, x3, f).
using Corners = std::array<std::array<double, 4>, 8>;

Corners graph_corners(const Bounds3& bounds) {
  Corners out{};
  const auto values = corner_values(bounds);
  for (int v = 0; v < 8; ++v) {
    const auto x = corner(bounds, v);
    out[v] = {x[0], x[1], x[2], values[static_cast<std::size_t>(v)]};
  }
  return out;
}

// Envelope pieces as rows c . (f, x1, x2, x3) >= rhs, stored {c0, c1, c2, c3, rhs}.
std::vector<std::array<double, 5>> envelope_pieces(const Corners& corners) {
  double scale = 1.0;
  for (const auto& c : corners) scale = std::max(scale, std::abs(c[3]));
  const double eps = 1e-9 * scale;
  std::vector<std::array<double, 5>> pieces;
  const auto add = [&](const std::array<double, 5>& row) {
    for (const auto& p : pieces) {
      bool same = true;
      for (int k = 0; k < 5; ++k) same = same && std::abs(p[k] - row[k]) <= eps;
      if (same) return;
    }
    pieces.push_back(row);
  };
  for (int s0 = 0; s0 < 8; ++s0)
    for (int s1 = s0 + 1; s1 < 8; ++s1)
      for (int s2 = s1 + 1; s2 < 8; ++s2)
        for (int s3 = s2 + 1; s3 < 8; ++s3) {
          const std::array<int, 4> pick{s0, s1, s2, s3};
          std::array<std::array<double, 5>, 4> m{};
          for (int r = 0; r < 4; ++r) {
            const auto& c = corners[pick[r]];
            m[r] = {c[0], c[1], c[2], 1.0, c[3]};
          }
          std::array<double, 4> g{};  // f = g0 x1 + g1 x2 + g2 x3 + g3
          if (!solve4(m, g)) continue;
          bool below = true, above = true;
          for (const auto& c : corners) {
            const double affine = g[0] * c[0] + g[1] * c[1] + g[2] * c[2] + g[3];
            below = below && affine <= c[3] + eps;
            above = above && affine >= c[3] - eps;
          }
          if (below) add({1.0, -g[0], -g[1], -g[2], g[3]});
          if (above) add({-1.0, g[0], g[1], g[2], -g[3]});
        }
  return pieces;
}

}  // namespace

std::vector<LinearInequality> hull_envelope_inequalities(const Bounds3& bounds) {
  std::vector<LinearInequality> rows;
  for (const auto& p : envelope_pieces(graph_corners(bounds))) {
    std::vector<Term> terms;
    for (int k = 0; k < 4; ++k) {
      if (p[k] != 0.0) terms.push_back({kMonomialVariables[static_cast<std::size_t>(k)], p[k]});
    }
    rows.emplace_back(std::move(terms), p[4]);
  }
  return rows;
}

MembershipTester::MembershipTester(const InequalitySystem& system) {
  if (system.projected_dimension() != 4) {
    throw std::invalid_argument("membership tester needs an (f, x1, x2, x3) system");
  }
  if (system.kind() == SystemKind::double_mccormick) {
    const auto& vars = system.variables();
    for (const auto& row : system.inequalities()) {
      Row r{{0.0, 0.0, 0.0, 0.0}, row.rhs()};
      for (const auto& t : row.terms()) {
        const auto pos = std::find(vars.begin(), vars.end(), t.variable) - vars.begin();
        r.coef[static_cast<std::size_t>(pos)] = t.coefficient;
      }
      rows_.push_back(r);
    }
    return;
  }

  // Hull: read the corners back out of the linking equations (rows 10, 12,
  // 14 link x1..x3, row 16 links f).
  const auto& vars = system.variables();
  const auto& rows = system.inequalities();
  Corners corners{};
  for (int v = 0; v < 8; ++v) {
    const std::string& lambda = vars[static_cast<std::size_t>(4 + v)];
    for (int c = 0; c < 4; ++c) {
      corners[v][c] = -rows[static_cast<std::size_t>(10 + 2 * c)].coefficient(lambda);
    }
  }
  for (int i = 0; i < 3; ++i) {
    double lo = corners[0][i], hi = corners[0][i];
    for (const auto& c : corners) {
      lo = std::min(lo, c[i]);
      hi = std::max(hi, c[i]);
    }
    std::array<double, 4> up{0, 0, 0, 0}, down{0, 0, 0, 0};
    up[static_cast<std::size_t>(i + 1)] = 1.0;
    down[static_cast<std::size_t>(i + 1)] = -1.0;
    rows_.push_back({up, lo});
    rows_.push_back({down, -hi});
  }
  for (const auto& p : envelope_pieces(corners)) rows_.push_back({{p[0], p[1], p[2], p[3]}, p[4]});
}

bool MembershipTester::contains(std::span<const double, 4> point, double tol) const {
  for (const auto& r : rows_) {
    const double lhs =
        r.coef[0] * point[0] + r.coef[1] * point[1] + r.coef[2] * point[2] + r.coef[3] * point[3];
    if (lhs < r.rhs - tol) return false;
  }
  return true;
}

}  // namespace boxcup
