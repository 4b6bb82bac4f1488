#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace geomodel {

/// Exact rational scalar used throughout the geometric core.
using Rational = boost::multiprecision::mpq_rational;
using RationalVector = std::vector<Rational>;

/// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when integral) text form.
std::string format_rational(const Rational& value);

/// Decimal approximation, used only for human-readable output.
double to_double(const Rational& value);

/// Exact conversion of a finite double.
Rational from_double(double value);

}  // namespace geomodel
