#pragma once

// Exact scalars: arbitrary-precision integers and rationals (GMP), plus the
// small set of combinatorial helpers every other module leans on.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/float128.hpp>

namespace stieltjesk {

using BigInt = mpz_class;
/// Always canonical: lowest terms, positive denominator.
using Rational = mpq_class;
/// Working precision for irrational coefficients (113-bit mantissa).
using HighReal = boost::multiprecision::float128;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational make_rational(long num, long den = 1) {
    return make_rational(BigInt(num), BigInt(den));
}

inline BigInt binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return BigInt(0);
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

inline BigInt factorial(long n) {
    if (n < 0) throw std::domain_error("factorial of a negative integer");
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

/// Integer power of a rational, negative exponents allowed for nonzero bases.
inline Rational rpow(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("zero to a negative power");
        return rpow(Rational(1) / base, -e);
    }
    Rational r(1);
    Rational b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline int sign(const Rational& q) { return sgn(q); }

/// Unsigned magnitude of an integer converted limb by limb (exact up to the
/// target mantissa width).
template <class T>
T integer_to_real(const BigInt& z) {
    using std::ldexp;
    const mpz_srcptr p = z.get_mpz_t();
    const std::size_t n = mpz_size(p);
    T r = 0;
    const T limb_base = ldexp(T(1), 64);
    for (std::size_t i = n; i-- > 0;) {
        r = r * limb_base + T(static_cast<std::uint64_t>(mpz_getlimbn(p, static_cast<mp_size_t>(i))));
    }
    return sgn(z) < 0 ? T(-r) : r;
}

/// Rational to floating point with ~120 significant bits before rounding to T,
/// so huge numerators/denominators never overflow the intermediate.
template <class T>
T to_real(const Rational& q) {
    using std::ldexp;
    if (q == 0) return T(0);
    const BigInt& a = q.get_num();
    const BigInt& b = q.get_den();
    const long bits_a = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
    const long bits_b = static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
    const long shift = 120 - (bits_a - bits_b);
    BigInt m;
    if (shift >= 0) {
        BigInt scaled = a;
        mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
        mpz_tdiv_q(m.get_mpz_t(), scaled.get_mpz_t(), b.get_mpz_t());
    } else {
        BigInt scaled = b;
        mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
        mpz_tdiv_q(m.get_mpz_t(), a.get_mpz_t(), scaled.get_mpz_t());
    }
    return ldexp(integer_to_real<T>(m), static_cast<int>(-shift));
}

/// Parses "p", "p/q", or a finite decimal "1.25", "-3e-2" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const Rational n = parse_rational(s.substr(0, slash));
        const Rational d = parse_rational(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return n / d;
    }
    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string::npos) {
        exponent = std::stol(s.substr(e + 1));
        s = s.substr(0, e);
    }
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s = s.substr(1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_point) ++frac_digits;
        } else {
            throw std::invalid_argument("malformed number '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    Rational r(BigInt(digits, 10));
    r *= rpow(Rational(10), exponent - frac_digits);
    return negative ? Rational(-r) : r;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Rational agreeing with v to 36 significant digits.
inline Rational rational_from_real(const HighReal& v) {
    if (!boost::multiprecision::isfinite(v)) throw std::domain_error("rational_from_real: value is not finite");
    if (v == 0) return Rational(0);
    return parse_rational(v.str(36, std::ios_base::scientific));
}

}  // namespace stieltjesk
