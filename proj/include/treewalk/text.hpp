#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "treewalk/group.hpp"

namespace treewalk {

using Rational = boost::rational<std::int64_t>;

// Mixed comparisons between rational<int64_t> and a plain int recurse forever
// in some Boost releases; compare against Rational(k) instead.
bool operator==(const Rational &, int) = delete;
bool operator!=(const Rational &, int) = delete;
bool operator<(const Rational &, int) = delete;
bool operator<=(const Rational &, int) = delete;
bool operator>(const Rational &, int) = delete;
bool operator>=(const Rational &, int) = delete;

class ParseError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Parsers for the text forms produced by to_string. Whitespace between
// tokens is ignored.
Digits parse_digits(std::string_view text);
Vertex parse_vertex(std::string_view text);
End parse_end(std::string_view text);
AffineElem parse_affine(std::string_view text);
/// `[a1, a2, ...]`; a bare affine element parses as a one-factor product.
ProductElem parse_product(std::string_view text);
/// `p/q`, an integer, or a terminating decimal such as `0.35`.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational &r);

} // namespace treewalk
