#ifndef NMFID_SCALAR_HPP
#define NMFID_SCALAR_HPP

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace nmfid {

// Exact scalar used for all certification paths.  GMP-backed, so
// elimination on the desk-scale instances never overflows.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <typename T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

// Relative tolerance used by float-mode rank / support tests.
inline constexpr double kDefaultTol = 1e-10;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }
inline double abs_value(double x) { return std::fabs(x); }

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace detail

// Accepts integer ("-3"), fraction ("5/12") and finite decimal ("0.25")
// literals.  Everything else (exponents, inf/nan) is rejected so that the
// caller can fall back to float mode.  Results are canonical.
inline std::optional<Rational> parse_rational(std::string_view tok) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
        tok.remove_suffix(1);
    if (tok.empty()) return std::nullopt;

    bool negative = false;
    if (tok.front() == '+' || tok.front() == '-') {
        negative = tok.front() == '-';
        tok.remove_prefix(1);
    }

    auto slash = tok.find('/');
    auto dot = tok.find('.');
    try {
        if (slash != std::string_view::npos) {
            std::string_view num = tok.substr(0, slash);
            std::string_view den = tok.substr(slash + 1);
            if (!detail::all_digits(num) || !detail::all_digits(den)) return std::nullopt;
            BigInt p{std::string(num)};
            BigInt q{std::string(den)};
            if (q == 0) return std::nullopt;
            if (negative) p = -p;
            return Rational(p, q);
        }
        if (dot != std::string_view::npos) {
            std::string_view whole = tok.substr(0, dot);
            std::string_view frac = tok.substr(dot + 1);
            if (whole.empty() && frac.empty()) return std::nullopt;
            if (!whole.empty() && !detail::all_digits(whole)) return std::nullopt;
            if (!frac.empty() && !detail::all_digits(frac)) return std::nullopt;
            BigInt p = whole.empty() ? BigInt(0) : BigInt{std::string(whole)};
            BigInt q(1);
            for (char c : frac) {
                p = p * 10 + (c - '0');
                q *= 10;
            }
            if (negative) p = -p;
            return Rational(p, q);
        }
        if (!detail::all_digits(tok)) return std::nullopt;
        BigInt p{std::string(tok)};
        if (negative) p = -p;
        return Rational(p, 1);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::optional<double> parse_double(std::string_view tok) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
        tok.remove_suffix(1);
    if (tok.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

template <typename T>
std::optional<T> parse_scalar(std::string_view tok);

template <>
inline std::optional<Rational> parse_scalar<Rational>(std::string_view tok) {
    return parse_rational(tok);
}

template <>
inline std::optional<double> parse_scalar<double>(std::string_view tok) {
    // A rational literal in a float-mode file is still meaningful.
    if (auto r = parse_rational(tok)) return to_double(*r);
    return parse_double(tok);
}

// "p/q" (or "p" for integers); canonical because Rational stays canonical.
inline std::string format_scalar(const Rational& x) {
    std::ostringstream os;
    if (denominator(x) == 1)
        os << numerator(x);
    else
        os << numerator(x) << '/' << denominator(x);
    return os.str();
}

// Shortest round-trip decimal form.
inline std::string format_scalar(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace nmfid

#endif  // NMFID_SCALAR_HPP
