#include "sdof/rational.hpp"

#include "sdof/error.hpp"


#include <cctype>

namespace sdof {

std::string to_string(const Rational& r) {
  const BigInt n = numerator_of(r);
  const BigInt d = denominator_of(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

namespace {

BigInt parse_int(const std::string& s, const std::string& whole) {
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) throw LabError(ErrorCode::BadArgument, "malformed rational '" + whole + "'");
  for (std::size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k])))
      throw LabError(ErrorCode::BadArgument, "malformed rational '" + whole + "'");
  BigInt v(s.substr(i));
  return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text, text));
  const BigInt n = parse_int(text.substr(0, slash), text);
  const BigInt d = parse_int(text.substr(slash + 1), text);
  if (d == 0) throw LabError(ErrorCode::BadArgument, "zero denominator in '" + text + "'");
  return Rational(n, d);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace sdof
