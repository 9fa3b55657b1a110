#include "boxcup/inequality.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace boxcup {

LinearInequality::LinearInequality(std::vector<Term> terms, double rhs)
    : terms_(std::move(terms)), rhs_(rhs) {
  bool nonzero = false;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].variable.empty()) {
      throw std::invalid_argument("inequality term with empty variable name");
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (terms_[l].variable == terms_[k].variable) {
        throw std::invalid_argument("variable '" + terms_[k].variable +
                                    "' appears twice in one inequality");
      }
    }
    nonzero = nonzero || terms_[k].coefficient != 0.0;
  }
  if (!nonzero) {
    throw std::invalid_argument("inequality needs at least one nonzero coefficient");
  }
}

double LinearInequality::coefficient(const std::string& variable) const {
  auto it = std::find_if(terms_.begin(), terms_.end(),
                         [&](const Term& t) { return t.variable == variable; });
  return it == terms_.end() ? 0.0 : it->coefficient;
}

double LinearInequality::slack(std::span<const std::string> variables,
                               std::span<const double> values) const {
  if (variables.size() != values.size()) {
    throw std::invalid_argument("variable/value count mismatch");
  }
  double lhs = 0.0;
  for (const auto& term : terms_) {
    auto it = std::find(variables.begin(), variables.end(), term.variable);
    if (it == variables.end()) {
      throw std::invalid_argument("no value for variable '" + term.variable + "'");
    }
    lhs += term.coefficient * values[static_cast<std::size_t>(it - variables.begin())];
  }
  return lhs - rhs_;
}

LinearInequality LinearInequality::negated() const {
  std::vector<Term> flipped = terms_;
  for (auto& t : flipped) t.coefficient = -t.coefficient;
  return LinearInequality(std::move(flipped), -rhs_);
}

std::string LinearInequality::to_string() const {
  std::string out;
  char buf[64];
  for (const auto& t : terms_) {
    if (t.coefficient == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%+.12g", t.coefficient);
    if (!out.empty()) out += ' ';
    out += buf;
    out += '*';
    out += t.variable;
  }
  std::snprintf(buf, sizeof buf, " >= %.12g", rhs_);
  out += buf;
  return out;
}

void append_equation(std::vector<LinearInequality>& rows, std::vector<Term> terms, double rhs) {
  rows.emplace_back(std::move(terms), rhs);
  rows.push_back(rows.back().negated());
}

}  // namespace boxcup
