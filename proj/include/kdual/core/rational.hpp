#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "kdual/core/error.hpp"

namespace kdual {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RationalPoint = std::vector<Rational>;

/// Parses "p/q", an integer, or a finite decimal ("0.25") into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { fail(ErrorCode::NonRationalVertex, "cannot parse rational '" + std::string(text) + "'"); };
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) bad();

    auto parse_decimal = [&](const std::string& part) -> Rational {
        if (part.empty()) bad();
        std::size_t pos = 0;
        bool negative = false;
        if (part[pos] == '+' || part[pos] == '-') negative = part[pos++] == '-';
        BigInt numerator = 0;
        BigInt denominator = 1;
        bool seen_digit = false;
        bool seen_point = false;
        for (; pos < part.size(); ++pos) {
            char ch = part[pos];
            if (ch == '.') {
                if (seen_point) bad();
                seen_point = true;
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                numerator = numerator * 10 + (ch - '0');
                if (seen_point) denominator *= 10;
                seen_digit = true;
            } else {
                bad();
            }
        }
        if (!seen_digit) bad();
        Rational value(numerator, denominator);
        return negative ? Rational(-value) : value;
    };

    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_decimal(s);
    Rational num = parse_decimal(s.substr(0, slash));
    Rational den = parse_decimal(s.substr(slash + 1));
    if (den == 0) bad();
    return num / den;
}

inline std::string to_string(const Rational& value) {
    auto num = boost::multiprecision::numerator(value);
    auto den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

inline std::vector<double> to_double(const RationalPoint& point) {
    std::vector<double> out;
    out.reserve(point.size());
    for (const auto& v : point) out.push_back(to_double(v));
    return out;
}

inline bool is_integer(const Rational& value) { return boost::multiprecision::denominator(value) == 1; }

inline std::int64_t to_int64(const Rational& value) {
    require(is_integer(value), ErrorCode::InvariantViolation, "expected an integer, got " + to_string(value));
    return boost::multiprecision::numerator(value).convert_to<std::int64_t>();
}

/// Lowest common denominator of a collection of rationals.
inline BigInt common_denominator(const RationalPoint& values) {
    BigInt lcm = 1;
    for (const auto& v : values) {
        BigInt d = boost::multiprecision::denominator(v);
        lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    return lcm;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline Rational floor(const Rational& value) {
    BigInt num = boost::multiprecision::numerator(value);
    BigInt den = boost::multiprecision::denominator(value);
    BigInt q = num / den;
    if (num % den != 0 && num < 0) q -= 1;
    return Rational(q);
}

}  // namespace kdual
