#pragma once

#include "sdof/fm.hpp"
#include "sdof/model.hpp"
#include "sdof/precoding.hpp"
#include "sdof/rational.hpp"
#include "sdof/regions.hpp"

#include <json.hpp>

namespace sdof {

using Json = nlohmann::json;

/// [num, den]; integers that overflow int64 are written as decimal strings.
Json to_json(const Rational& r);
/// Accepts [num, den], an integer, or "n/d". Throws ConfigError.
Rational rational_from_json(const Json& j);

/// {"inequalities": [[a1n,a1d,a2n,a2d,bn,bd],...], "vertices": [[n,d,n,d],...], ...}
Json to_json(const RegionPolytope& region);

/// {"variables": [{"name": "a", "upper": [1,1]}, {"name": "f"}],
///  "constraints": [{"coeffs": {"d1": [1,1], "a": [-1,1]}, "rhs": [0,1]}],
///  "eliminate": ["a", ...]}   ("eliminate" is read by the CLI, not here)
BoundedTermSystem term_system_from_json(const Json& j);
Json to_json(const BoundedTermSystem& system);

Json to_json(const ChannelRealization& realization);
Json to_json(const TransmissionTrace& trace);
Json to_json(const EffectiveLinearSystem& system);

/// Fixed-precision text for CSV cells: 17 significant digits.
std::string format_double(double v);

}  // namespace sdof
