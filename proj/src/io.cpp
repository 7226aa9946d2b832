#include "sdof/io.hpp"

#include "sdof/error.hpp"

#include <cstdio>
#include <limits>

namespace sdof {

namespace {

Json big_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return v.convert_to<long long>();
  return v.str();
}

BigInt big_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long long>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw LabError(ErrorCode::ConfigError, "expected an integer, got " + j.dump());
}

Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json row_json(const Eigen::RowVectorXcd& r) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < r.size(); ++i) a.push_back(complex_json(r(i)));
  return a;
}

Json matrix_json(const Eigen::MatrixXcd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(row_json(m.row(i)));
  return a;
}

Json names(const SymbolTable& t, const std::vector<int>& cols) {
  Json a = Json::array();
  for (int c : cols) a.push_back(t.at(c).name);
  return a;
}

}  // namespace

Json to_json(const Rational& r) { return Json::array({big_to_json(numerator_of(r)), big_to_json(denominator_of(r))}); }

Rational rational_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2) {
    const BigInt d = big_from_json(j[1]);
    if (d == 0) throw LabError(ErrorCode::ConfigError, "zero denominator in " + j.dump());
    return Rational(big_from_json(j[0]), d);
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const LabError& e) {
      throw LabError(ErrorCode::ConfigError, e.what());
    }
  }
  throw LabError(ErrorCode::ConfigError, "not a rational: " + j.dump());
}

Json to_json(const RegionPolytope& region) {
  Json ineq = Json::array();
  for (const auto& h : region.halfplanes()) {
    Json row = Json::array();
    for (const Rational* r : {&h.a1, &h.a2, &h.b})
      for (const auto& x : to_json(*r)) row.push_back(x);
    ineq.push_back(row);
  }
  Json verts = Json::array();
  for (const auto& [x, y] : region.vertices()) {
    Json row = Json::array();
    for (const auto& v : to_json(x)) row.push_back(v);
    for (const auto& v : to_json(y)) row.push_back(v);
    verts.push_back(row);
  }
  Json j{{"inequalities", ineq}, {"vertices", verts}};
  if (!region.theorem.empty()) j["theorem"] = region.theorem;
  if (region.ds) j["ds"] = to_json(*region.ds);
  if (region.ds_low) j["ds_low"] = to_json(*region.ds_low);
  if (region.degenerate_ds_low) j["degenerate_ds_low"] = true;
  return j;
}

BoundedTermSystem term_system_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("variables") || !j.contains("constraints"))
    throw LabError(ErrorCode::ConfigError, "term system needs 'variables' and 'constraints'");
  for (const auto& [k, v] : j.items())
    if (k != "variables" && k != "constraints" && k != "eliminate")
      throw LabError(ErrorCode::ConfigError, "unknown key '" + k + "'");
  BoundedTermSystem s;
  for (const auto& v : j.at("variables")) {
    if (!v.is_object() || !v.contains("name") || !v.at("name").is_string())
      throw LabError(ErrorCode::ConfigError, "variable entries need a string 'name'");
    std::optional<Rational> upper;
    if (v.contains("upper") && !v.at("upper").is_null()) upper = rational_from_json(v.at("upper"));
    s.add_variable(v.at("name").get<std::string>(), upper);
  }
  for (const auto& c : j.at("constraints")) {
    if (!c.is_object() || !c.contains("coeffs") || !c.contains("rhs"))
      throw LabError(ErrorCode::ConfigError, "constraint entries need 'coeffs' and 'rhs'");
    LinearConstraint lc;
    for (const auto& [name, a] : c.at("coeffs").items()) lc.coeffs[name] = rational_from_json(a);
    lc.rhs = rational_from_json(c.at("rhs"));
    s.add_constraint(lc);
  }
  return s;
}

Json to_json(const BoundedTermSystem& system) {
  Json vars = Json::array();
  for (const auto& v : system.variables()) {
    Json e{{"name", v}};
    if (const auto u = system.upper_bound(v)) e["upper"] = to_json(*u);
    vars.push_back(e);
  }
  Json cons = Json::array();
  for (const auto& c : system.constraints()) {
    // Declared bounds are re-created by add_variable on the way back in.
    if (c.coeffs.size() == 1) {
      const auto& [v, a] = *c.coeffs.begin();
      if (system.has_variable(v) && ((a == -1 && c.rhs == 0) || (a == 1 && system.upper_bound(v) == c.rhs))) continue;
    }
    Json coeffs = Json::object();
    for (const auto& [v, a] : c.coeffs) coeffs[v] = to_json(a);
    cons.push_back({{"coeffs", coeffs}, {"rhs", to_json(c.rhs)}, {"text", to_string(c)}});
  }
  return {{"variables", vars}, {"constraints", cons}};
}

Json to_json(const ChannelRealization& r) {
  Json slots = Json::array();
  for (int t = 0; t < r.n_slots; ++t) {
    Json s = Json::object();
    for (Node n : r.topology.nodes()) s[to_string(n)] = row_json(r.row(n, t));
    slots.push_back(s);
  }
  return {{"topology", to_string(r.topology.kind)}, {"n_slots", r.n_slots}, {"seed", r.seed}, {"slots", slots}};
}

Json to_json(const TransmissionTrace& trace) {
  Json symbols = Json::array();
  for (int i = 0; i < trace.symbols.size(); ++i) {
    const auto& s = trace.symbols.at(i);
    symbols.push_back({{"name", s.name},
                       {"kind", s.kind == SymbolKind::Message ? "message" : "noise"},
                       {"value", complex_json(trace.symbol_values(i))}});
  }
  Json slots = Json::array();
  for (int t = 0; t < trace.executed_slots; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    Json obs = Json::object();
    for (const auto& [n, v] : trace.observations) obs[to_string(n)] = complex_json(v.at(ut));
    Json x = Json::array();
    for (Eigen::Index i = 0; i < trace.x[ut].size(); ++i) x.push_back(complex_json(trace.x[ut](i)));
    slots.push_back({{"gain", matrix_json(trace.slot_gain[ut])}, {"x", x}, {"observations", obs},
                     {"power", trace.slot_power(t)}});
  }
  return {{"power", trace.power},
          {"mode", trace.mode == RunMode::Noiseless ? "noiseless" : "noisy"},
          {"seed", trace.seed},
          {"planned_slots", trace.planned_slots},
          {"executed_slots", trace.executed_slots},
          {"symbols", symbols},
          {"slots", slots},
          {"realization", to_json(trace.realization)}};
}

Json to_json(const EffectiveLinearSystem& system) {
  Json nodes = Json::object();
  for (const auto& [n, ns] : system.nodes) {
    nodes[to_string(n)] = {{"gain", matrix_json(ns.gain)},
                           {"slot_of_row", ns.slot_of_row},
                           {"protected", names(system.symbols, ns.a_cols)},
                           {"other_messages", names(system.symbols, ns.b_cols)},
                           {"noise", names(system.symbols, ns.c_cols)}};
  }
  Json cols = Json::array();
  for (const auto& s : system.symbols.all()) cols.push_back(s.name);
  return {{"n_slots", system.n_slots},
          {"columns", cols},
          {"nodes", nodes},
          {"reconstruction_residual", system.reconstruction_residual}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sdof
