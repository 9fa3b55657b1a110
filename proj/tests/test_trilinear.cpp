#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "boxcup/rng.hpp"
#include "boxcup/trilinear.hpp"

using namespace boxcup;

namespace {

std::array<double, 3> sums_by_hand(const Bounds3& b) {
  const double a1 = b.lower(0), a2 = b.lower(1), a3 = b.lower(2);
  const double b1 = b.upper(0), b2 = b.upper(1), b3 = b.upper(2);
  return {a1 * b2 * b3 + b1 * a2 * a3, b1 * a2 * b3 + a1 * b2 * a3, b1 * b2 * a3 + a1 * a2 * b3};
}

bool has_row(const InequalitySystem& s, const std::map<std::string, double>& coef, double rhs) {
  for (const auto& row : s.inequalities()) {
    bool same = std::abs(row.rhs() - rhs) < 1e-12;
    for (const auto& v : s.variables()) {
      const auto it = coef.find(v);
      same = same && std::abs(row.coefficient(v) - (it == coef.end() ? 0.0 : it->second)) < 1e-12;
    }
    if (same) return true;
  }
  return false;
}

bool satisfies_all(const InequalitySystem& s, std::span<const double> point, double tol) {
  return std::all_of(s.inequalities().begin(), s.inequalities().end(),
                     [&](const LinearInequality& row) { return row.slack(s.variables(), point) >= -tol; });
}

Bounds3 random_labeled(Rng& rng) {
  std::array<double, 3> a{}, b{};
  for (int i = 0; i < 3; ++i) {
    double u = 10.0 * uniform01(rng), v = 10.0 * uniform01(rng);
    if (u > v) std::swap(u, v);
    a[i] = u;
    b[i] = std::max(v, u + 0.01);
  }
  return omega_permutation(Bounds3(a, b)).labeled;
}

std::array<double, 4> random_point_in_range(const Bounds3& b, Rng& rng) {
  std::array<double, 4> p{};
  const double flo = b.lower(0) * b.lower(1) * b.lower(2), fhi = b.upper(0) * b.upper(1) * b.upper(2);
  p[0] = flo + (fhi - flo) * uniform01(rng);
  for (int i = 0; i < 3; ++i) p[i + 1] = b.lower(i) + (b.upper(i) - b.lower(i)) * uniform01(rng);
  return p;
}

}  // namespace

TEST_CASE("bounds validation") {
  CHECK_THROWS_AS(Bounds3({1, 0, 0}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Bounds3({-1, 0, 0}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Bounds3({0, 0, 0}, {1, INFINITY, 1}), std::invalid_argument);
  CHECK_NOTHROW(Bounds3({0, 0, 0}, {1, 1, 1}));
}

TEST_CASE("labeling examples") {
  SUBCASE("already labeled with zero sums") {
    const Bounds3 b({0, 0, 2}, {1, 1, 6});
    const auto l = omega_permutation(b);
    CHECK(l.perm == std::array<int, 3>{0, 1, 2});
    const auto s = omega_sums(l.labeled);
    CHECK(s == sums_by_hand(l.labeled));
    CHECK(s == std::array<double, 3>{0, 0, 2});
  }
  SUBCASE("reversal") {
    const auto l = omega_permutation(Bounds3({1, 1, 1}, {2, 3, 4}));
    CHECK(l.perm == std::array<int, 3>{2, 1, 0});
    CHECK(l.labeled == Bounds3({1, 1, 1}, {4, 3, 2}));
    CHECK(omega_sums(l.labeled) == std::array<double, 3>{10, 11, 14});
  }
  SUBCASE("tie in the first two sums") {
    const auto l = omega_permutation(Bounds3({1, 2, 3}, {2, 4, 5}));
    CHECK(l.perm == std::array<int, 3>{0, 1, 2});
    CHECK(omega_sums(l.labeled) == std::array<double, 3>{32, 32, 34});
  }
}

TEST_CASE("labeling picks the first valid permutation and is idempotent") {
  Rng rng(derive_seed(3, "test/omega"));
  for (int k = 0; k < 500; ++k) {
    std::array<double, 3> a{}, b{};
    for (int i = 0; i < 3; ++i) {
      a[i] = std::floor(6 * uniform01(rng));
      b[i] = a[i] + 1 + std::floor(5 * uniform01(rng));
    }
    const Bounds3 box(a, b);
    std::array<int, 3> perm{0, 1, 2}, first{-1, -1, -1};
    do {
      const auto s = sums_by_hand(box.permuted(perm));
      const double tol = 1e-12 * std::max(1.0, s[2]);
      if (s[0] <= s[1] + tol && s[1] <= s[2] + tol) {
        first = perm;
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto l = omega_permutation(box);
    REQUIRE(l.perm == first);
    CHECK(satisfies_omega(l.labeled));
    CHECK(omega_permutation(l.labeled).perm == std::array<int, 3>{0, 1, 2});
  }
}

TEST_CASE("grouping choices") {
  CHECK(GroupingChoice(1).grouped() == std::array<int, 2>{1, 2});
  CHECK(GroupingChoice(2).grouped() == std::array<int, 2>{0, 2});
  CHECK(GroupingChoice(3).grouped() == std::array<int, 2>{0, 1});
  CHECK(GroupingChoice(3).ungrouped() == 2);
  CHECK_THROWS(GroupingChoice(0));
  CHECK_THROWS(GroupingChoice(4));
}

TEST_CASE("bilinear McCormick rows") {
  SUBCASE("unit intervals") {
    const auto s = mccormick_bilinear(0, 1, 0, 1);
    CHECK(s.inequalities().size() == 4);
    CHECK(has_row(s, {{"w", 1}}, 0));
    CHECK(has_row(s, {{"w", -1}, {"xi", 1}}, 0));
    CHECK(has_row(s, {{"w", -1}, {"xj", 1}}, 0));
    CHECK(has_row(s, {{"w", 1}, {"xi", -1}, {"xj", -1}}, -1));
  }
  SUBCASE("shifted intervals") {
    const auto s = mccormick_bilinear(1, 2, 3, 4);
    CHECK(has_row(s, {{"w", 1}, {"xi", -3}, {"xj", -1}}, -3));
  }
  CHECK_THROWS(mccormick_bilinear(1, 1, 0, 1));
}

TEST_CASE("double McCormick system") {
  const Bounds3 unit({0, 0, 0}, {1, 1, 1});
  for (int c = 1; c <= 3; ++c) {
    const auto s = double_mccormick_system(unit, GroupingChoice(c));
    CHECK(s.inequalities().size() == 14);
    CHECK(s.projected_dimension() == 4);
    for (int v = 0; v < 8; ++v) {
      const double x1 = v & 1, x2 = (v >> 1) & 1, x3 = (v >> 2) & 1;
      const std::array<double, 4> p{x1 * x2 * x3, x1, x2, x3};
      CHECK(satisfies_all(s, p, 1e-12));
    }
  }
  const Bounds3 labeled({1, 1, 1}, {4, 3, 2});
  CHECK(has_row(double_mccormick_system(labeled, GroupingChoice(3)),
                {{"f", 1}, {"x1", -1}, {"x2", -1}, {"x3", -1}}, -2));
  CHECK_THROWS_AS(double_mccormick_system(Bounds3({1, 1, 1}, {2, 3, 4}), GroupingChoice(1)),
                  std::invalid_argument);
}

TEST_CASE("graph points on a grid satisfy every double McCormick system") {
  Rng rng(derive_seed(5, "test/grid"));
  for (int k = 0; k < 30; ++k) {
    const Bounds3 b = random_labeled(rng);
    for (int c = 1; c <= 3; ++c) {
      const auto s = double_mccormick_system(b, GroupingChoice(c));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          for (int l = 0; l < 5; ++l) {
            const double x1 = b.lower(0) + (b.upper(0) - b.lower(0)) * i / 4.0;
            const double x2 = b.lower(1) + (b.upper(1) - b.lower(1)) * j / 4.0;
            const double x3 = b.lower(2) + (b.upper(2) - b.lower(2)) * l / 4.0;
            const std::array<double, 4> p{x1 * x2 * x3, x1, x2, x3};
            REQUIRE(satisfies_all(s, p, 1e-9));
          }
    }
  }
}

TEST_CASE("corner values") {
  const auto unit = corner_values(Bounds3({0, 0, 0}, {1, 1, 1}));
  CHECK(unit == std::array<double, 8>{0, 0, 0, 0, 0, 0, 0, 1});
  const auto c = corner_values(Bounds3({1, 1, 1}, {4, 3, 2}));
  CHECK(c == std::array<double, 8>{1, 4, 3, 12, 2, 8, 6, 24});
}

TEST_CASE("system sizes") {
  const Bounds3 b({1, 1, 1}, {4, 3, 2});
  CHECK(mccormick_bilinear(1, 2, 3, 4).inequalities().size() == 4);
  CHECK(double_mccormick_system(b, GroupingChoice(2)).inequalities().size() == 14);
  const auto hull = hull_formulation(b);
  CHECK(hull.variables().size() == 12);
  // 8 multiplier signs, then the normalization and four linking equations as pairs.
  CHECK(hull.inequalities().size() == 8 + 2 * (1 + 4));
  CHECK(hull.projected_dimension() == 4);
  CHECK(double_mccormick_redundant_pair(b, GroupingChoice(1)).size() == 2);
}

TEST_CASE("membership examples") {
  Rng rng(derive_seed(7, "test/membership"));
  for (int k = 0; k < 10; ++k) {
    const Bounds3 b = random_labeled(rng);
    std::vector<InequalitySystem> systems{hull_formulation(b)};
    for (int c = 1; c <= 3; ++c) systems.push_back(double_mccormick_system(b, GroupingChoice(c)));
    const std::array<double, 4> low{b.lower(0) * b.lower(1) * b.lower(2), b.lower(0), b.lower(1), b.lower(2)};
    const double m1 = (b.lower(0) + b.upper(0)) / 2, m2 = (b.lower(1) + b.upper(1)) / 2,
                 m3 = (b.lower(2) + b.upper(2)) / 2;
    const std::array<double, 4> mid{m1 * m2 * m3, m1, m2, m3};
    for (const auto& s : systems) {
      CHECK(membership(low, s, 1e-9));
      CHECK(membership(mid, s, 1e-9));
    }
    const std::array<double, 4> above{b.upper(0) * b.upper(1) * b.upper(2) + 1, b.upper(0), b.upper(1), b.upper(2)};
    CHECK_FALSE(membership(above, systems[0], 1e-9));
  }
}

TEST_CASE("hull points lie in every double McCormick relaxation") {
  Rng rng(derive_seed(9, "test/containment"));
  for (int k = 0; k < 10; ++k) {
    const Bounds3 b = random_labeled(rng);
    const MembershipTester hull(hull_formulation(b));
    std::vector<InequalitySystem> dm;
    for (int c = 1; c <= 3; ++c) dm.push_back(double_mccormick_system(b, GroupingChoice(c)));
    int accepted = 0;
    for (int tries = 0; accepted < 1000 && tries < 200000; ++tries) {
      const auto p = random_point_in_range(b, rng);
      if (!hull.contains(p, 0.0)) continue;
      ++accepted;
      for (const auto& s : dm) REQUIRE(satisfies_all(s, p, 1e-9));
    }
    CHECK(accepted == 1000);
  }
}

TEST_CASE("fast membership agrees with the LP test") {
  Rng rng(derive_seed(11, "test/tester"));
  for (int k = 0; k < 5; ++k) {
    const Bounds3 b = random_labeled(rng);
    std::vector<InequalitySystem> systems{hull_formulation(b)};
    for (int c = 1; c <= 3; ++c) systems.push_back(double_mccormick_system(b, GroupingChoice(c)));
    for (const auto& s : systems) {
      const MembershipTester tester(s);
      for (int t = 0; t < 200; ++t) {
        const auto p = random_point_in_range(b, rng);
        // Points this close to the boundary may be classified differently by rounding.
        const bool loose = tester.contains(p, 1e-7), tight = tester.contains(p, -1e-7);
        if (loose != tight) continue;
        CHECK(membership(p, s, 1e-9) == loose);
      }
    }
  }
}

TEST_CASE("envelope inequalities hold at corners and are tight somewhere") {
  const Bounds3 b({1, 1, 1}, {4, 3, 2});
  const auto rows = hull_envelope_inequalities(b);
  CHECK(rows.size() >= 2);
  const auto f = corner_values(b);
  for (const auto& row : rows) {
    double min_slack = INFINITY;
    for (int v = 0; v < 8; ++v) {
      std::array<double, 4> p{f[v], (v & 1) ? b.upper(0) : b.lower(0), (v & 2) ? b.upper(1) : b.lower(1),
                              (v & 4) ? b.upper(2) : b.lower(2)};
      min_slack = std::min(min_slack, row.slack(kMonomialVariables, p));
    }
    CHECK(min_slack >= -1e-9);
    CHECK(min_slack <= 1e-9);
  }
}

TEST_CASE("renaming keeps rows") {
  const auto s = double_mccormick_system(Bounds3({0, 0, 0}, {1, 1, 1}), GroupingChoice(1));
  const std::array<std::string, 4> names{"g", "a", "b", "c"};
  const auto r = s.renamed(names);
  CHECK(r.variables() == std::vector<std::string>(names.begin(), names.end()));
  CHECK(r.inequalities().size() == s.inequalities().size());
  CHECK(r.inequalities()[0].coefficient("g") == s.inequalities()[0].coefficient("f"));
}
