#include "sdof/fm.hpp"

#include "sdof/error.hpp"

#include <algorithm>

namespace sdof {

Rational LinearConstraint::coeff(const std::string& v) const {
  const auto it = coeffs.find(v);
  return it == coeffs.end() ? Rational(0) : it->second;
}

LinearConstraint normalize(const LinearConstraint& c) {
  LinearConstraint out;
  for (const auto& [v, a] : c.coeffs)
    if (a != 0) out.coeffs[v] = a;
  out.rhs = c.rhs;
  if (out.coeffs.empty()) return out;
  BigInt lcm = 1;
  for (const auto& [v, a] : out.coeffs) lcm = boost::multiprecision::lcm(lcm, denominator_of(a));
  BigInt g = 0;
  for (const auto& [v, a] : out.coeffs) g = boost::multiprecision::gcd(g, BigInt(numerator_of(a * lcm)));
  const Rational scale = Rational(lcm) / Rational(abs(g));
  for (auto& [v, a] : out.coeffs) a *= scale;
  out.rhs *= scale;
  return out;
}

std::string to_string(const LinearConstraint& c) {
  std::string s;
  for (const auto& [v, a] : c.coeffs) {
    if (!s.empty()) s += " + ";
    s += (a == 1 ? "" : to_string(a) + "*") + v;
  }
  return (s.empty() ? "0" : s) + " <= " + to_string(c.rhs);
}

void BoundedTermSystem::add_variable(const std::string& name, std::optional<Rational> upper) {
  if (has_variable(name)) throw LabError(ErrorCode::BadArgument, "variable '" + name + "' declared twice");
  if (upper && *upper < 0) throw LabError(ErrorCode::BadArgument, "negative bound on '" + name + "'");
  variables_.push_back(name);
  bounds_[name] = upper;
  constraints_.push_back({{{name, -1}}, 0});
  if (upper) constraints_.push_back({{{name, 1}}, *upper});
}

void BoundedTermSystem::add_constraint(LinearConstraint c) {
  for (const auto& [v, a] : c.coeffs)
    if (!has_variable(v)) throw LabError(ErrorCode::UnknownVariable, "no variable '" + v + "'");
  constraints_.push_back(normalize(c));
}

bool BoundedTermSystem::has_variable(const std::string& name) const { return bounds_.count(name) != 0; }

std::optional<Rational> BoundedTermSystem::upper_bound(const std::string& name) const {
  const auto it = bounds_.find(name);
  if (it == bounds_.end()) throw LabError(ErrorCode::UnknownVariable, "no variable '" + name + "'");
  return it->second;
}

bool BoundedTermSystem::satisfied_by(const std::map<std::string, Rational>& point) const {
  for (const auto& c : constraints_) {
    Rational lhs = 0;
    for (const auto& [v, a] : c.coeffs) {
      const auto it = point.find(v);
      if (it != point.end()) lhs += a * it->second;
    }
    if (lhs > c.rhs) return false;
  }
  return true;
}

bool BoundedTermSystem::trivially_infeasible() const {
  return std::any_of(constraints_.begin(), constraints_.end(),
                     [](const LinearConstraint& c) { return c.coeffs.empty() && c.rhs < 0; });
}

BoundedTermSystem fm_eliminate(const BoundedTermSystem& system, const std::string& var) {
  if (!system.has_variable(var)) throw LabError(ErrorCode::UnknownVariable, "no variable '" + var + "'");
  std::vector<const LinearConstraint*> upper, lower;
  std::map<std::map<std::string, Rational>, Rational> rows;
  const auto keep = [&rows](const LinearConstraint& c) {
    const LinearConstraint n = normalize(c);
    if (n.coeffs.empty() && n.rhs >= 0) return;
    const auto it = rows.find(n.coeffs);
    if (it == rows.end() || n.rhs < it->second) rows[n.coeffs] = n.rhs;
  };
  for (const auto& c : system.constraints()) {
    const Rational a = c.coeff(var);
    if (a > 0)
      upper.push_back(&c);
    else if (a < 0)
      lower.push_back(&c);
    else
      keep(c);
  }
  for (const auto* p : upper) {
    for (const auto* q : lower) {
      const Rational wp = -q->coeff(var);
      const Rational wq = p->coeff(var);
      LinearConstraint sum;
      for (const auto& [v, a] : p->coeffs) sum.coeffs[v] += wp * a;
      for (const auto& [v, a] : q->coeffs) sum.coeffs[v] += wq * a;
      sum.coeffs.erase(var);
      sum.rhs = wp * p->rhs + wq * q->rhs;
      keep(sum);
    }
  }

  BoundedTermSystem out;
  for (const auto& v : system.variables())
    if (v != var) out.variables_.push_back(v);
  out.bounds_ = system.bounds_;
  out.bounds_.erase(var);
  for (const auto& [coeffs, rhs] : rows) out.constraints_.push_back({coeffs, rhs});
  return out;
}

BoundedTermSystem fm_eliminate_all(BoundedTermSystem system, const std::vector<std::string>& vars) {
  for (const auto& v : vars) system = fm_eliminate(system, v);
  return system;
}

BoundedTermSystem mr_outer_bound_system() {
  BoundedTermSystem s;
  s.add_variable("d1");
  s.add_variable("d2");
  s.add_variable("a", Rational(1));
  s.add_variable("b", rat(1, 2));
  s.add_variable("c", rat(1, 2));
  s.add_variable("e", rat(1, 2));
  s.add_variable("f");
  s.add_constraint({{{"d1", 1}, {"a", -1}, {"b", rat(1, 2)}}, 0});
  s.add_constraint({{{"d1", 1}, {"a", -1}, {"f", 1}}, 0});
  s.add_constraint({{{"d1", 1}, {"d2", 1}, {"b", -1}, {"c", rat(-3, 2)}, {"e", -1}, {"f", -1}}, 0});
  return s;
}

RegionPolytope region_from_system(const BoundedTermSystem& system) {
  for (const auto& v : system.variables())
    if (v != "d1" && v != "d2")
      throw LabError(ErrorCode::BadArgument, "variable '" + v + "' is not eliminated");
  if (system.trivially_infeasible()) throw LabError(ErrorCode::BadArgument, "system is infeasible");
  std::vector<HalfPlane> hs;
  for (const auto& c : system.constraints())
    if (!c.coeffs.empty()) hs.emplace_back(c.coeff("d1"), c.coeff("d2"), c.rhs);
  return RegionPolytope(std::move(hs));
}

namespace {

/// Solves the square system exactly; nullopt if singular.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> m, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

bool lift_exists(const BoundedTermSystem& original, const std::map<std::string, Rational>& point) {
  std::vector<std::string> free;
  for (const auto& v : original.variables())
    if (!point.count(v)) free.push_back(v);
  // Fiber: A x <= r over the free variables.
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> r;
  for (const auto& c : original.constraints()) {
    Rational rhs = c.rhs;
    std::vector<Rational> row(free.size());
    for (const auto& [v, k] : c.coeffs) {
      const auto it = point.find(v);
      if (it != point.end())
        rhs -= k * it->second;
      else
        row[static_cast<std::size_t>(std::find(free.begin(), free.end(), v) - free.begin())] = k;
    }
    a.push_back(std::move(row));
    r.push_back(std::move(rhs));
  }
  const auto fits = [&](const std::vector<Rational>& x) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      Rational lhs = 0;
      for (std::size_t j = 0; j < x.size(); ++j) lhs += a[i][j] * x[j];
      if (lhs > r[i]) return false;
    }
    return true;
  };
  const std::size_t k = free.size();
  if (k == 0) return fits({});
  if (a.size() < k) return false;
  // Every variable is nonnegative, so a nonempty fiber is pointed and has a vertex.
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  do {
    std::vector<std::vector<Rational>> m;
    std::vector<Rational> b;
    for (std::size_t i : idx) {
      m.push_back(a[i]);
      b.push_back(r[i]);
    }
    const auto x = solve_exact(std::move(m), std::move(b));
    if (x && fits(*x)) return true;
  } while (next_combination(idx, a.size()));
  return false;
}

}  // namespace sdof
