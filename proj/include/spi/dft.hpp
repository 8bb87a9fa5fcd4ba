#pragma once

#include <vector>

#include "spi/ints.hpp"
#include "spi/modular.hpp"

namespace spi {

namespace ntt {

// Word-size primes of the form k * 2^24 + 1 with a known generator, so
// power-of-two transforms up to length 2^24 exist. Their product exceeds
// 2^185, far above any convolution value this library forms (below
// r * q^2 < 2^146 for r < 2^22, q < 2^62). A unit test re-verifies
// primality, the power-of-two valuation, and the generator orders.
struct NttPrime {
    u64 p;
    u64 g;
};
inline constexpr NttPrime kPrimes[3] = {
    {4611686018326724609ULL, 3},
    {4611686018309947393ULL, 5},
    {4611686018058289153ULL, 5},
};
inline constexpr u64 kMaxLogLen = 24;

// In-place power-of-two transform, Montgomery form, decimation in time.
inline void transform(std::vector<u64>& a, const Mont64& mont, u64 root_mont,
                      bool inverse) {
    const size_t L = a.size();
    for (size_t i = 1, j = 0; i < L; ++i) {
        size_t bit = L >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // root_mont has order exactly L; the inverse transform runs on its inverse
    u64 w_order = root_mont;
    if (inverse) w_order = mont.pow(root_mont, mont.modulus() - 2);  // modulus prime
    for (size_t len = 2; len <= L; len <<= 1) {
        u64 wlen = w_order;
        for (size_t rest = L; rest > len; rest >>= 1) wlen = mont.mul(wlen, wlen);
        for (size_t i = 0; i < L; i += len) {
            u64 w = mont.one();
            for (size_t j = 0; j < len / 2; ++j) {
                u64 u = a[i + j];
                u64 v = mont.mul(a[i + j + len / 2], w);
                a[i + j] = mont.add(u, v);
                a[i + j + len / 2] = mont.sub(u, v);
                w = mont.mul(w, wlen);
            }
        }
    }
    if (inverse) {
        u64 linv = mont.pow(mont.to_mont(L % mont.modulus()), mont.modulus() - 2);
        for (auto& x : a) x = mont.mul(x, linv);
    }
}

// Exact linear convolution of nonnegative integer sequences, reduced
// mod `out_mod`. Entries may be any u64; each transform reduces them
// mod its own prime, and the reconstruction is exact as long as the
// true convolution values stay below the three-prime product.
inline std::vector<u64> convolve_mod(const std::vector<u64>& x, const std::vector<u64>& y,
                                     u64 out_mod) {
    if (x.empty() || y.empty()) return {};
    size_t need = x.size() + y.size() - 1;
    size_t L = 1;
    u64 logL = 0;
    while (L < need) L <<= 1, ++logL;
    if (logL > kMaxLogLen) throw std::invalid_argument("convolve_mod: length over 2^24");

    std::vector<u64> c[3];
    for (int t = 0; t < 3; ++t) {
        const u64 p = kPrimes[t].p;
        Mont64 mont(p);
        u64 root = powmod_u64(kPrimes[t].g, (p - 1) >> logL, p);
        std::vector<u64> a(L, 0), b(L, 0);
        for (size_t i = 0; i < x.size(); ++i) a[i] = mont.to_mont(x[i] % p);
        for (size_t i = 0; i < y.size(); ++i) b[i] = mont.to_mont(y[i] % p);
        u64 root_mont = mont.to_mont(root);
        transform(a, mont, root_mont, false);
        transform(b, mont, root_mont, false);
        for (size_t i = 0; i < L; ++i) a[i] = mont.mul(a[i], b[i]);
        transform(a, mont, root_mont, true);
        c[t].resize(need);
        for (size_t i = 0; i < need; ++i) c[t][i] = mont.from_mont(a[i]);
    }

    // Garner reconstruction of the exact integer, reduced mod out_mod.
    const u64 p0 = kPrimes[0].p, p1 = kPrimes[1].p, p2 = kPrimes[2].p;
    const u64 p0_inv_p1 = powmod_u64(p0 % p1, p1 - 2, p1);
    const u64 p01_inv_p2 =
        powmod_u64(mulmod_u64(p0 % p2, p1 % p2, p2), p2 - 2, p2);
    const u64 p0_m = p0 % out_mod;
    const u64 p01_m = mulmod_u64(p0_m, p1 % out_mod, out_mod);
    std::vector<u64> out(need);
    for (size_t i = 0; i < need; ++i) {
        u64 x0 = c[0][i];
        u64 t1 = mulmod_u64(submod_u64(c[1][i] % p1, x0 % p1, p1), p0_inv_p1, p1);
        // partial value x0 + p0*t1 mod p2
        u64 part2 = addmod_u64(x0 % p2, mulmod_u64(p0 % p2, t1, p2), p2);
        u64 t2 = mulmod_u64(submod_u64(c[2][i] % p2, part2, p2), p01_inv_p2, p2);
        u64 r = addmod_u64(x0 % out_mod, mulmod_u64(p0_m, t1 % out_mod, out_mod), out_mod);
        r = addmod_u64(r, mulmod_u64(p01_m, t2 % out_mod, out_mod), out_mod);
        out[i] = r;
    }
    return out;
}

}  // namespace ntt

// y_k = sum_i x_i w^{ik} mod q for k = 0..r-1, where w has multiplicative
// order r mod q and r = |x| is an odd prime. Quadratic below the
// threshold; Bluestein's chirp reindexing above it, using
// ik = (i^2 + k^2 - (i-k)^2) / 2 with the half computed as (r+1)/2 mod r.
inline std::vector<u64> dft_prime_order_u64(const std::vector<u64>& x, u64 q, u64 w,
                                            size_t naive_threshold = 128) {
    const size_t r = x.size();
    if (r == 0) return {};
    if (r < naive_threshold) {
        std::vector<u64> y(r, 0);
        for (size_t k = 0; k < r; ++k) {
            u64 step = powmod_u64(w, k, q);
            u64 cur = 1 % q, acc = 0;
            for (size_t i = 0; i < r; ++i) {
                acc = addmod_u64(acc, mulmod_u64(x[i], cur, q), q);
                cur = mulmod_u64(cur, step, q);
            }
            y[k] = acc;
        }
        return y;
    }

    const u64 half = (static_cast<u64>(r) + 1) / 2;  // 1/2 mod r, r odd
    const u64 w_inv = powmod_u64(w, q - 2, q);       // q prime in every caller
    std::vector<u64> chirp(r), a(r);
    for (size_t j = 0; j < r; ++j) {
        u64 ex = mulmod_u64(mulmod_u64(j % r, j % r, r), half, r);
        chirp[j] = powmod_u64(w, ex, q);
        a[j] = mulmod_u64(x[j], chirp[j], q);
    }
    std::vector<u64> b(2 * r - 1);
    for (size_t t = 0; t < 2 * r - 1; ++t) {
        u64 j = t >= r - 1 ? t - (r - 1) : (r - 1) - t;  // |t - (r-1)|
        u64 ex = mulmod_u64(mulmod_u64(j % r, j % r, r), half, r);
        b[t] = powmod_u64(w_inv, ex, q);
    }
    std::vector<u64> conv = ntt::convolve_mod(a, b, q);
    std::vector<u64> y(r);
    for (size_t k = 0; k < r; ++k) y[k] = mulmod_u64(conv[k + r - 1], chirp[k], q);
    return y;
}

// Arbitrary-precision fallback, quadratic. Correct for any modulus q >= 2.
inline std::vector<Int> dft_prime_order_int(const std::vector<Int>& x, const Int& q,
                                            const Int& w) {
    const size_t r = x.size();
    std::vector<Int> y(r, Int(0));
    for (size_t k = 0; k < r; ++k) {
        Int step = mod_pow(w, Int(static_cast<unsigned long>(k)), q);
        Int cur = 1 % q, acc = 0;
        for (size_t i = 0; i < r; ++i) {
            acc = (acc + x[i] * cur) % q;
            cur = cur * step % q;
        }
        y[k] = acc;
    }
    return y;
}

// Coefficients a_0..a_{r-1} of the cyclic polynomial whose value at
// w^i is values[i]: a = r^{-1} * DFT_{w^{-1}}(values).
inline std::vector<Int> inverse_dft_prime_order(const std::vector<Int>& values,
                                                const Int& q, const Int& omega) {
    const size_t r = values.size();
    if (r == 0) return {};
    Int rinv = inv_mod(Int(static_cast<unsigned long>(r)), q);
    if (mpz_fits_ulong_p(q.get_mpz_t()) && mpz_get_ui(q.get_mpz_t()) < (u64{1} << 62)) {
        u64 q64 = mpz_get_ui(q.get_mpz_t());
        std::vector<u64> v64(r);
        for (size_t i = 0; i < r; ++i) v64[i] = u64_from_int(floor_mod(values[i], q));
        u64 winv = powmod_u64(u64_from_int(floor_mod(omega, q)), q64 - 2, q64);
        std::vector<u64> y = dft_prime_order_u64(v64, q64, winv);
        u64 rinv64 = u64_from_int(rinv);
        std::vector<Int> out(r);
        for (size_t k = 0; k < r; ++k) out[k] = int_from_u64(mulmod_u64(y[k], rinv64, q64));
        return out;
    }
    Int winv = inv_mod(floor_mod(omega, q), q);
    std::vector<Int> xs(r);
    for (size_t i = 0; i < r; ++i) xs[i] = floor_mod(values[i], q);
    std::vector<Int> y = dft_prime_order_int(xs, q, winv);
    for (auto& v : y) v = v * rinv % q;
    return y;
}

}  // namespace spi
