#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace boxcup {

/// One term `coefficient * variable` of a linear form.
struct Term {
  std::string variable;
  double coefficient = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

/// A single inequality `sum_k c_k v_k >= rhs` over named variables.
///
/// Terms keep their insertion order so that printed systems are byte-stable.
/// Equations are stored as two consecutive inequalities with negated sides.
class LinearInequality {
 public:
  LinearInequality(std::vector<Term> terms, double rhs);

  const std::vector<Term>& terms() const { return terms_; }
  double rhs() const { return rhs_; }

  /// Coefficient of `variable`, or 0 when it does not appear.
  double coefficient(const std::string& variable) const;

  /// Left-hand side minus rhs evaluated at `values` (indexed like `variables`).
  double slack(std::span<const std::string> variables, std::span<const double> values) const;

  /// The same inequality with both sides multiplied by -1 (`<=` read as `>=`).
  LinearInequality negated() const;

  std::string to_string() const;

  friend bool operator==(const LinearInequality&, const LinearInequality&) = default;

 private:
  std::vector<Term> terms_;
  double rhs_ = 0.0;
};

/// Appends `lhs == rhs` as the pair `lhs >= rhs`, `-lhs >= -rhs`.
void append_equation(std::vector<LinearInequality>& rows, std::vector<Term> terms, double rhs);

}  // namespace boxcup
