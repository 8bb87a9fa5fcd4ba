#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace spi {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Arbitrary-precision signed integer. mpz_class at interfaces; hot loops drop
// to raw limbs (see modular.hpp).
using Int = mpz_class;

// sigma(x): number of bits of |x|, i.e. min{s : |x| < 2^s}. sigma(0) = 0.
inline u64 bit_size(const Int& x) {
    if (mpz_sgn(x.get_mpz_t()) == 0) return 0;
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline u64 bit_size_u64(u64 x) {
    if (x == 0) return 0;
    return 64u - static_cast<u64>(__builtin_clzll(x));
}

inline Int int_from_u64(u64 x) {
    Int r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(u64), 0, 0, &x);
    return r;
}

// Requires 0 <= x < 2^64.
inline u64 u64_from_int(const Int& x) {
    if (mpz_sgn(x.get_mpz_t()) < 0 || mpz_sizeinbase(x.get_mpz_t(), 2) > 64)
        throw std::invalid_argument("u64_from_int: out of range");
    u64 out = 0;
    mpz_export(&out, nullptr, 1, sizeof(u64), 0, 0, x.get_mpz_t());
    return out;
}

inline Int pow2(u64 e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

inline Int ipow(const Int& base, u64 e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// Least nonnegative remainder, any k >= 1.
inline Int floor_mod(const Int& x, const Int& k) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), k.get_mpz_t());
    return r;
}

// Centered remainder: unique value in N_k - floor((k-1)/2) congruent to x mod k.
// For odd k this is the symmetric range [-(k-1)/2, (k-1)/2].
inline Int centered_rem(const Int& x, const Int& k) {
    Int r = floor_mod(x, k);
    Int upper = (k - 1) - (k - 1) / 2;  // ceil((k-1)/2)
    if (r > upper) r -= k;
    return r;
}

inline Int abs_int(const Int& x) {
    Int r;
    mpz_abs(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

// floor(sqrt(x)), x >= 0.
inline Int isqrt(const Int& x) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

inline Int gcd_int(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Inverse of a mod m; throws if gcd(a, m) != 1.
inline Int inv_mod(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::invalid_argument("inv_mod: not invertible");
    return r;
}

inline bool divisible(const Int& a, const Int& d) {
    return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

// Exact quotient a/d; caller guarantees d | a.
inline Int divexact(const Int& a, const Int& d) {
    Int r;
    mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t());
    return r;
}

}  // namespace spi
