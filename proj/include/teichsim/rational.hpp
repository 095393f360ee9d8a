#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace teichsim {

/// Exact rational scalar used throughout the geometry kernel.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite coordinate");
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    auto num = BigInt(static_cast<std::int64_t>(std::ldexp(m, 53)));
    exp -= 53;
    Rat r(num);
    if (exp > 0)
        r *= Rat(BigInt(1) << exp);
    else if (exp < 0)
        r /= Rat(BigInt(1) << (-exp));
    return r;
}

/// Parses "n/d", "n", or falls back to exact dyadic conversion for "1.25e-3"-style input.
inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt n(s.substr(0, slash));
        BigInt d(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("rational with zero denominator: " + s);
        return Rat(n, d);
    }
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos) {
        return rat_from_double(std::stod(s));
    }
    return Rat(BigInt(s));
}

inline std::string rat_to_string(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline int sign(const Rat& r) { return r == 0 ? 0 : (r > 0 ? 1 : -1); }

inline Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }

}  // namespace teichsim
