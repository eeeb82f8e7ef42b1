#pragma once

// Exact scalars. Integers and rationals are GMP-backed; everything downstream
// (forms, points, composed degrees, absorption probabilities) builds on these.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "randdyn/errors.hpp"

namespace randdyn {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

// Number of bits of |v|; 0 for v == 0.
inline std::size_t bit_length(const Int& v) {
    if (v == 0) return 0;
    return mpz_sizeinbase(v.backend().data(), 2);
}

// Natural log of |v| for v != 0. mpz_get_d_2exp gives |v| = m * 2^e with
// m in [0.5, 1), so the relative error is a few ulps even for gigantic v.
inline double log_abs(const Int& v) {
    signed long int exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, v.backend().data());
    return std::log(std::fabs(mant)) + static_cast<double>(exp2) * M_LN2;
}

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

inline std::size_t hash_int(const Int& v) {
    const mpz_srcptr z = v.backend().data();
    const std::size_t n = mpz_size(z);
    std::size_t h = (mpz_sgn(z) < 0) ? 0x9e3779b97f4a7c15ULL : 0;
    h = hash_combine(h, n);
    // First, last and middle limbs identify big values well enough; equality
    // checks stay exact.
    if (n > 0) {
        h = hash_combine(h, mpz_getlimbn(z, 0));
        h = hash_combine(h, mpz_getlimbn(z, n - 1));
        h = hash_combine(h, mpz_getlimbn(z, n / 2));
    }
    return h;
}

// Accepts "p", "p/q" and decimal "a.b" (converted exactly), with optional sign.
Rat parse_rational(const std::string& text);

} // namespace randdyn
