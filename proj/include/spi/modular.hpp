#pragma once

#include <cassert>
#include <cstring>
#include <vector>

#include "spi/ints.hpp"

namespace spi {

inline u64 mulmod_u64(u64 a, u64 b, u64 m) {
    return static_cast<u64>((u128)a * b % m);
}

inline u64 addmod_u64(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

inline u64 submod_u64(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

inline u64 powmod_u64(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline Int mod_pow(const Int& base, const Int& exp, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

// Montgomery arithmetic for an odd word-size modulus. Values live in
// Montgomery form (x * 2^64 mod m); to_mont/from_mont convert.
class Mont64 {
  public:
    explicit Mont64(u64 m) : m_(m) {
        assert(m & 1);
        // Newton iteration for -m^{-1} mod 2^64.
        u64 inv = m;
        for (int i = 0; i < 5; ++i) inv *= 2 - m * inv;
        minv_ = ~inv + 1;
        r2_ = static_cast<u64>(((u128)(~u64{0} % m + 1) << 64) % m);  // 2^128 mod m
    }

    u64 modulus() const { return m_; }
    u64 to_mont(u64 x) const { return redc((u128)(x % m_) * r2_); }
    u64 from_mont(u64 x) const { return redc(x); }
    u64 one() const { return redc(r2_); }

    u64 mul(u64 a, u64 b) const { return redc((u128)a * b); }
    u64 add(u64 a, u64 b) const { return addmod_u64(a, b, m_); }
    u64 sub(u64 a, u64 b) const { return submod_u64(a, b, m_); }

    u64 pow(u64 a_mont, u64 exp) const {
        u64 r = one();
        while (exp) {
            if (exp & 1) r = mul(r, a_mont);
            a_mont = mul(a_mont, a_mont);
            exp >>= 1;
        }
        return r;
    }

  private:
    u64 redc(u128 t) const {
        // t < m * 2^64; q*m + t would overflow 128 bits for m > 2^63,
        // so accumulate the high halves by hand. Low halves sum to 0 mod 2^64.
        u64 q = static_cast<u64>(t) * minv_;
        u128 qm = (u128)q * m_;
        u64 a = static_cast<u64>(t >> 64);
        u64 b = static_cast<u64>(qm >> 64) + (static_cast<u64>(t) != 0 ? 1 : 0);
        u64 s = a + b;
        if (s < a || s >= m_) s -= m_;
        return s;
    }

    u64 m_, minv_, r2_;
};

// Montgomery arithmetic for an odd multi-limb modulus. Operands are raw
// mp_limb_t vectors of fixed length w = limb count of the modulus; the REDC
// loop is CIOS on top of mpn primitives, which is where interpolation spends
// nearly all of its time.
class MontCtx {
  public:
    explicit MontCtx(const Int& modulus) : m_int_(modulus) {
        assert(modulus > 1 && mpz_odd_p(modulus.get_mpz_t()));
        w_ = mpz_size(modulus.get_mpz_t());
        m_.assign(w_, 0);
        std::memcpy(m_.data(), mpz_limbs_read(modulus.get_mpz_t()),
                    w_ * sizeof(mp_limb_t));
        // -m^{-1} mod 2^64 from the low limb only.
        u64 inv = static_cast<u64>(m_[0]);
        for (int i = 0; i < 5; ++i) inv *= 2 - static_cast<u64>(m_[0]) * inv;
        minv_ = ~inv + 1;
        Int r2 = (Int(1) << (128 * w_)) % modulus;
        r2_ = to_limbs(r2);
        one_ = to_mont(Int(1));
    }

    using Limbs = std::vector<mp_limb_t>;

    size_t width() const { return w_; }
    const Int& modulus() const { return m_int_; }

    Limbs to_mont(const Int& x) const {
        Limbs a = to_limbs(floor_mod(x, m_int_));
        return mul(a, r2_);
    }

    Int from_mont(const Limbs& a) const {
        Limbs t(2 * w_, 0);
        std::memcpy(t.data(), a.data(), w_ * sizeof(mp_limb_t));
        Limbs r(w_);
        redc(r.data(), t.data());
        return from_limbs(r);
    }

    const Limbs& one() const { return one_; }

    // Raw variants work on caller-owned limb buffers of width w and avoid
    // allocation in inner loops. r may alias a or b; scratch (2w limbs) may not.
    void mul_raw(mp_limb_t* r, const mp_limb_t* a, const mp_limb_t* b,
                 mp_limb_t* scratch) const {
        if (w_ == 1) {
            u128 p = (u128)a[0] * b[0];
            scratch[0] = static_cast<mp_limb_t>(p);
            scratch[1] = static_cast<mp_limb_t>(p >> 64);
        } else {
            mpn_mul_n(scratch, a, b, w_);
        }
        redc(r, scratch);
    }

    void add_raw(mp_limb_t* r, const mp_limb_t* a, const mp_limb_t* b) const {
        mp_limb_t carry = mpn_add_n(r, a, b, w_);
        if (carry || mpn_cmp(r, m_.data(), w_) >= 0) mpn_sub_n(r, r, m_.data(), w_);
    }

    void sub_raw(mp_limb_t* r, const mp_limb_t* a, const mp_limb_t* b) const {
        mp_limb_t borrow = mpn_sub_n(r, a, b, w_);
        if (borrow) mpn_add_n(r, r, m_.data(), w_);
    }

    Limbs mul(const Limbs& a, const Limbs& b) const {
        Limbs t(2 * w_), r(w_);
        mul_raw(r.data(), a.data(), b.data(), t.data());
        return r;
    }

    Limbs add(const Limbs& a, const Limbs& b) const {
        Limbs r(w_);
        add_raw(r.data(), a.data(), b.data());
        return r;
    }

    Limbs sub(const Limbs& a, const Limbs& b) const {
        Limbs r(w_);
        sub_raw(r.data(), a.data(), b.data());
        return r;
    }

    Limbs pow(Limbs base, const Int& exp) const {
        assert(exp >= 0);
        Limbs r = one_;
        u64 nb = bit_size(exp);
        for (u64 i = 0; i < nb; ++i) {
            if (mpz_tstbit(exp.get_mpz_t(), i)) r = mul(r, base);
            if (i + 1 < nb) base = mul(base, base);
        }
        return r;
    }

  private:
    // t has 2w limbs; result (w limbs) = t * 2^{-64w} mod m.
    void redc(mp_limb_t* r, mp_limb_t* t) const {
        mp_limb_t cc = 0;  // pending carry out of t[i+w], always 0 or 1
        for (size_t i = 0; i < w_; ++i) {
            mp_limb_t q = static_cast<mp_limb_t>(t[i] * minv_);
            mp_limb_t hi = mpn_addmul_1(t + i, m_.data(), w_, q);
            mp_limb_t s = t[i + w_] + hi;
            mp_limb_t c1 = s < hi ? 1 : 0;
            mp_limb_t s2 = s + cc;
            mp_limb_t c2 = s2 < cc ? 1 : 0;
            t[i + w_] = s2;
            cc = c1 + c2;  // <= 1: sum is bounded below 2 * 2^64w
        }
        if (cc || mpn_cmp(t + w_, m_.data(), w_) >= 0)
            mpn_sub_n(r, t + w_, m_.data(), w_);
        else
            std::memcpy(r, t + w_, w_ * sizeof(mp_limb_t));
    }

    Limbs to_limbs(const Int& x) const {
        assert(x >= 0 && x < m_int_);
        Limbs a(w_, 0);
        size_t n = mpz_size(x.get_mpz_t());
        assert(n <= w_);
        std::memcpy(a.data(), mpz_limbs_read(x.get_mpz_t()), n * sizeof(mp_limb_t));
        return a;
    }

    Int from_limbs(const Limbs& a) const {
        Int r;
        mpz_import(r.get_mpz_t(), w_, -1, sizeof(mp_limb_t), 0, 0, a.data());
        return r;
    }

    Int m_int_;
    size_t w_;
    Limbs m_;
    u64 minv_;
    Limbs r2_, one_;
};

}  // namespace spi
