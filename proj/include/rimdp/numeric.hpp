#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace rimdp {

/// Exact rational scalar (arbitrary precision). Probabilities parsed from
/// decimal text are represented exactly, e.g. "0.1" becomes 1/10.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Per-scalar-type policy: tolerances, parsing and formatting.
///
/// The required instantiation is `double`; `float` and `Rational` are also
/// provided. All probability text produced by the writers round-trips
/// exactly through `to_string`/`parse` for the same scalar type.
template <typename T>
struct NumericTraits;

namespace detail {

template <typename T>
std::string float_to_string(T v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template <typename T>
std::optional<T> float_parse(std::string_view s) {
    T out{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
    return out;
}

// Parses an optionally signed decimal with optional fraction and exponent
// ("0.25", "-1", "2.5e-3") or a ratio ("1/3") into an exact rational.
std::optional<Rational> rational_parse(std::string_view s);

} // namespace detail

template <>
struct NumericTraits<double> {
    static constexpr bool is_exact = false;
    static constexpr const char* name = "f64";

    static double feasibility_tolerance() { return 1e-9; }
    static bool is_finite(double v) { return std::isfinite(v); }
    static double abs(double v) { return std::fabs(v); }
    static double from_double(double v) { return v; }
    static double to_double(double v) { return v; }
    static std::string to_string(double v) { return detail::float_to_string(v); }
    static std::optional<double> parse(std::string_view s) { return detail::float_parse<double>(s); }
};

template <>
struct NumericTraits<float> {
    static constexpr bool is_exact = false;
    static constexpr const char* name = "f32";

    // Single precision cannot resolve 1e-9 around 1.0, so the column-sum
    // check uses a tolerance scaled to the type's epsilon.
    static float feasibility_tolerance() { return 1e-5f; }
    static bool is_finite(float v) { return std::isfinite(v); }
    static float abs(float v) { return std::fabs(v); }
    static float from_double(double v) { return static_cast<float>(v); }
    static double to_double(float v) { return static_cast<double>(v); }
    static std::string to_string(float v) { return detail::float_to_string(v); }
    static std::optional<float> parse(std::string_view s) { return detail::float_parse<float>(s); }
};

template <>
struct NumericTraits<Rational> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "rational";

    static Rational feasibility_tolerance() { return Rational(0); }
    static bool is_finite(const Rational&) { return true; }
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
    static Rational from_double(double v) { return Rational(v); }
    static double to_double(const Rational& v) { return v.template convert_to<double>(); }

    // Integers print without a denominator; everything else as "p/q".
    static std::string to_string(const Rational& v) {
        if (denominator(v) == 1) return numerator(v).str();
        return numerator(v).str() + "/" + denominator(v).str();
    }

    static std::optional<Rational> parse(std::string_view s) { return detail::rational_parse(s); }
};

namespace detail {

inline std::optional<Rational> rational_parse(std::string_view s) {
    if (s.empty()) return std::nullopt;

    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        auto num = rational_parse(s.substr(0, slash));
        auto den = rational_parse(s.substr(slash + 1));
        if (!num || !den || *den == 0) return std::nullopt;
        if (denominator(*num) != 1 || denominator(*den) != 1) return std::nullopt;
        return Rational(numerator(*num), numerator(*den));
    }

    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
        negative = (s[i] == '-');
        ++i;
    }

    BigInt mantissa = 0;
    std::int64_t frac_digits = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) ++frac_digits;
            any_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return std::nullopt;

    std::int64_t exponent = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool exp_neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_neg = (s[i] == '-');
            ++i;
        }
        if (i == s.size()) return std::nullopt;
        std::int64_t e = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            e = e * 10 + (s[i] - '0');
            if (e > 100000) return std::nullopt;
        }
        exponent = exp_neg ? -e : e;
    }
    if (i != s.size()) return std::nullopt;

    std::int64_t power = exponent - frac_digits;
    Rational value(mantissa);
    if (power > 0) {
        value *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(power)));
    } else if (power < 0) {
        value /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-power)));
    }
    if (negative) value = -value;
    return value;
}

} // namespace detail

} // namespace rimdp
