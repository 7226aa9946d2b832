#pragma once

#include "sdof/rational.hpp"
#include "sdof/regions.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdof {

/// sum_v coeffs[v] * v <= rhs. Zero coefficients are never stored.
struct LinearConstraint {
  std::map<std::string, Rational> coeffs;
  Rational rhs;

  Rational coeff(const std::string& v) const;
  bool operator==(const LinearConstraint&) const = default;
};

/// Scales to coprime integer coefficients (rhs stays rational), so
/// 16 d1 + 4 d2 <= 17 becomes 4 d1 + d2 <= 17/4.
LinearConstraint normalize(const LinearConstraint& c);

std::string to_string(const LinearConstraint& c);

/// Nonnegative variables, each with an optional upper bound, plus linear
/// constraints. Bounds are materialized as ordinary constraints.
class BoundedTermSystem {
 public:
  /// upper == nullopt marks a free nonnegative variable.
  void add_variable(const std::string& name, std::optional<Rational> upper = std::nullopt);
  void add_constraint(LinearConstraint c);  // throws UnknownVariable

  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  bool has_variable(const std::string& name) const;
  /// The declared bound, if any (not updated by elimination).
  std::optional<Rational> upper_bound(const std::string& name) const;

  /// Every constraint holds at the point (missing variables read as zero).
  bool satisfied_by(const std::map<std::string, Rational>& point) const;
  /// A constraint with no variables and negative rhs is present.
  bool trivially_infeasible() const;

 private:
  friend BoundedTermSystem fm_eliminate(const BoundedTermSystem&, const std::string&);
  std::vector<std::string> variables_;
  std::map<std::string, std::optional<Rational>> bounds_;
  std::vector<LinearConstraint> constraints_;
};

/// Fourier-Motzkin projection of one variable: every upper constraint on it
/// is combined with every lower one. Results are normalized, constant true
/// rows dropped, and rows with identical left sides reduced to the tightest.
BoundedTermSystem fm_eliminate(const BoundedTermSystem& system, const std::string& var);
BoundedTermSystem fm_eliminate_all(BoundedTermSystem system, const std::vector<std::string>& vars);

/// The outer-bound derivation: terms a (<= 1), b, c, e (<= 1/2), f (free) and
/// d1 <= a - b/2, d1 <= a - f, d1 + d2 <= b + 3c/2 + e + f.
BoundedTermSystem mr_outer_bound_system();

/// 2-D region from a system over exactly the variables d1 and d2.
RegionPolytope region_from_system(const BoundedTermSystem& system);

/// Independent check of a projection: is there a lift of `point` (values of
/// the kept variables) into the original system? Enumerates basic solutions
/// of the fiber with exact rational elimination.
bool lift_exists(const BoundedTermSystem& original, const std::map<std::string, Rational>& point);

}  // namespace sdof
