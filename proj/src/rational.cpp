#include "geomodel/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace geomodel {

namespace {

bool is_integer_literal(std::string_view text) {
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    if (i == text.size()) return false;
    for (; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9') return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    if (!is_integer_literal(num))
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    using Int = boost::multiprecision::mpz_int;
    Int n(std::string(num[0] == '+' ? num.substr(1) : num));
    if (slash == std::string_view::npos) return Rational(n);
    const auto den = text.substr(slash + 1);
    if (!is_integer_literal(den))
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    Int d(std::string(den[0] == '+' ? den.substr(1) : den));
    if (d == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    return Rational(n, d);
}

std::string format_rational(const Rational& value) {
    if (denominator(value) == 1) return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational from_double(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
    // mpq assignment from double is exact.
    return Rational(value);
}

}  // namespace geomodel
