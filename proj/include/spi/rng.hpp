#pragma once

#include <array>

#include "spi/ints.hpp"

namespace spi {

namespace detail {

inline u64 splitmix64(u64& x) {
    x += 0x9e3779b97f4a7c15ULL;
    u64 z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic stream: same seed, same platform-independent draws.
// xoshiro256** seeded through splitmix64.
class Rng {
  public:
    explicit Rng(u64 seed) {
        u64 x = seed;
        for (auto& w : s_) w = detail::splitmix64(x);
    }

    u64 next() {
        u64 result = rotl(s_[1] * 5, 7) * 9;
        u64 t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound), bound >= 1. Rejection keeps the stream unbiased.
    u64 below(u64 bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound 0");
        if ((bound & (bound - 1)) == 0) return next() & (bound - 1);
        u64 limit = ~u64{0} - (~u64{0} % bound + 1) % bound;
        for (;;) {
            u64 v = next();
            if (v <= limit) return v % bound;
        }
    }

    // Uniform in [lo, hi], lo <= hi.
    u64 range(u64 lo, u64 hi) { return lo + below(hi - lo + 1); }

    bool coin() { return next() & 1; }

    // Uniform in [0, 2^nbits).
    Int bits(u64 nbits) {
        Int r = 0;
        u64 full = nbits / 64, rest = nbits % 64;
        for (u64 i = 0; i < full; ++i) {
            r <<= 64;
            r += int_from_u64(next());
        }
        if (rest) {
            r <<= rest;
            r += int_from_u64(next() >> (64 - rest));
        }
        return r;
    }

    // Uniform in [0, bound), bound >= 1, arbitrary size.
    Int below_int(const Int& bound) {
        if (mpz_sgn(bound.get_mpz_t()) <= 0)
            throw std::invalid_argument("Rng::below_int: bound <= 0");
        u64 nb = bit_size(bound);
        for (;;) {
            Int v = bits(nb);
            if (v < bound) return v;
        }
    }

    // Independent child stream; deterministic in (parent state, tag).
    Rng fork(u64 tag) {
        u64 a = next(), b = next();
        u64 x = a ^ (tag * 0x9e3779b97f4a7c15ULL);
        u64 y = detail::splitmix64(x) ^ b;
        return Rng(detail::splitmix64(y));
    }

  private:
    static u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<u64, 4> s_{};
};

}  // namespace spi
