#pragma once

// Exact rational number type plus string conversion.  All quantities in the
// library are rationals; no floating point appears on any verdict path.

#include <boost/multiprecision/gmp.hpp>

#include <string>

#include "conehedge/errors.hpp"

namespace conehedge {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// Canonical "p" or "p/q" form, q > 0, gcd(p, q) = 1.
inline std::string format_rational(const Rational& r) {
    Integer num = numerator(r);
    Integer den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Accepts integers ("-3"), ratios ("5/7", "-4/6"), and finite decimals
// ("0.25", "-1.5").  Always returns a canonical rational.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw SpecParseError("empty number literal");

    auto parse_int = [](const std::string& t) -> Integer {
        std::string body = t;
        bool neg = false;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            neg = body[0] == '-';
            body.erase(body.begin());
        }
        if (body.empty()) throw SpecParseError("bad integer literal");
        for (char ch : body)
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw SpecParseError("bad digit in number literal");
        Integer v(body);
        return neg ? Integer(-v) : v;
    };

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Integer num = parse_int(s.substr(0, slash));
        Integer den = parse_int(s.substr(slash + 1));
        if (den == 0) throw SpecParseError("zero denominator in '" + text + "'");
        return Rational(num, den);  // two-argument ctor canonicalizes
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string head = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (frac.empty()) throw SpecParseError("bad decimal literal '" + text + "'");
        bool neg = !head.empty() && head[0] == '-';
        if (head == "-" || head == "+" || head.empty()) head += "0";
        Integer ipart = parse_int(head);
        Integer fpart = parse_int(frac);
        if (fpart < 0) throw SpecParseError("bad decimal literal '" + text + "'");
        Integer scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Integer num = abs(ipart) * scale + fpart;
        if (neg || ipart < 0) num = -num;
        return Rational(num, scale);
    }
    return Rational(parse_int(s), Integer(1));
}

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a > b ? a : b; }

}  // namespace conehedge
