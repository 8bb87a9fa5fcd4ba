#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include "spi/ints.hpp"
#include "spi/modular.hpp"
#include "spi/slp.hpp"
#include "spi/sparse_poly.hpp"

namespace spi {

struct EvalStatsSnapshot {
    u64 eval_count = 0;
    u64 total_modulus_bits = 0;
};

// Running tally of blackbox usage: how many evaluations, and the summed
// bit-size of their moduli. Safe under concurrent evaluation.
class EvalStats {
  public:
    void note(const Int& m) {
        count_.fetch_add(1, std::memory_order_relaxed);
        bits_.fetch_add(bit_size(m), std::memory_order_relaxed);
    }
    void reset() {
        count_.store(0, std::memory_order_relaxed);
        bits_.store(0, std::memory_order_relaxed);
    }
    EvalStatsSnapshot snapshot() const {
        return {count_.load(std::memory_order_relaxed),
                bits_.load(std::memory_order_relaxed)};
    }

  private:
    std::atomic<u64> count_{0};
    std::atomic<u64> bits_{0};
};

// Evaluation oracle for a fixed but unknown polynomial: hand it a modulus
// and a point of residues, get the value back. Implementations must be
// pure (same point and modulus, same answer) and safe to call from
// several threads at once.
class Blackbox {
  public:
    virtual ~Blackbox() = default;

    size_t nvars() const { return nvars_; }

    Int eval(const std::vector<Int>& point, const Int& m) const {
        if (point.size() != nvars_)
            throw std::invalid_argument("Blackbox::eval: point arity mismatch");
        if (m < 2) throw std::invalid_argument("Blackbox::eval: modulus < 2");
        stats_.note(m);
        return eval_impl(point, m);
    }

    EvalStats& stats() const { return stats_; }

  protected:
    explicit Blackbox(size_t nvars) : nvars_(nvars) {}
    virtual Int eval_impl(const std::vector<Int>& point, const Int& m) const = 0;

  private:
    size_t nvars_;
    mutable EvalStats stats_;
};

// Evaluates a fixed sparse polynomial fast at many points and moduli.
// Strategy: per variable, a table of repeated squarings of the coordinate;
// per term, multiply the table entries picked out by the exponent's bits.
// Zero exponents cost nothing, which is what makes sparse exponent vectors
// cheap. The constructor flattens every term into a span of precomputed
// table offsets, so the inner loop is one modular multiplication per set
// exponent bit and nothing else. Specialized paths: Montgomery for odd
// word moduli, 128-bit division for even word moduli, limb-level
// Montgomery for odd wide moduli, plain bignum arithmetic for the (rare)
// even wide case.
class SparseEvaluator {
  public:
    explicit SparseEvaluator(const SparsePoly& f) : nvars_(f.nvars()) {
        var_bits_.assign(nvars_, 0);
        for (const auto& t : f.terms())
            for (size_t v = 0; v < nvars_; ++v)
                if (t.exponent[v] != 0)
                    var_bits_[v] =
                        std::max(var_bits_[v], static_cast<u32>(bit_size(t.exponent[v])));
        base_.assign(nvars_, 0);
        pool_slots_ = 0;
        for (size_t v = 0; v < nvars_; ++v) {
            base_[v] = pool_slots_;
            pool_slots_ += var_bits_[v];
        }
        for (const auto& t : f.terms()) {
            TermData td;
            td.coeff = t.coeff;
            if (mpz_size(t.coeff.get_mpz_t()) <= 1) {
                td.cfits = true;
                td.cneg = t.coeff < 0;
                td.cmag = mpz_getlimbn(t.coeff.get_mpz_t(), 0);
            }
            td.lo = static_cast<u32>(ops_.size());
            for (size_t v = 0; v < nvars_; ++v) {
                if (t.exponent[v] == 0) continue;
                for_bits(t.exponent[v],
                         [&](u32 k) { ops_.push_back(static_cast<u32>(base_[v]) + k); });
                td.factors.push_back({static_cast<u32>(v), t.exponent[v]});
            }
            td.hi = static_cast<u32>(ops_.size());
            terms_.push_back(std::move(td));
        }
    }

    size_t nvars() const { return nvars_; }

    Int eval(const std::vector<Int>& point, const Int& m) const {
        if (m < 2) throw std::invalid_argument("SparseEvaluator: modulus < 2");
        if (point.size() != nvars_)
            throw std::invalid_argument("SparseEvaluator: point arity mismatch");
        if (mpz_sizeinbase(m.get_mpz_t(), 2) <= 64 && mpz_fits_ulong_p(m.get_mpz_t())) {
            u64 m64 = mpz_get_ui(m.get_mpz_t());
            return (m64 & 1) ? int_from_u64(eval_mont64(point, m64))
                             : int_from_u64(eval_plain64(point, m64));
        }
        if (mpz_odd_p(m.get_mpz_t())) return eval_wide(point, m);
        return eval_generic(point, m);
    }

  private:
    struct Factor {
        u32 var;
        Int exp;
    };
    struct TermData {
        Int coeff;
        u64 cmag = 0;  // |coeff| when it fits one limb
        bool cfits = false;
        bool cneg = false;
        u32 lo = 0, hi = 0;             // span in ops_
        std::vector<Factor> factors;    // generic path only
    };

    // iterate set bits of e, low to high
    template <typename F>
    static void for_bits(const Int& e, F&& f) {
        mp_bitcnt_t k = mpz_scan1(e.get_mpz_t(), 0);
        while (k != ~static_cast<mp_bitcnt_t>(0)) {
            f(static_cast<u32>(k));
            k = mpz_scan1(e.get_mpz_t(), k + 1);
        }
    }

    static u64 reduce_u64(const Int& x, u64 m) {
        if (mpz_sgn(x.get_mpz_t()) >= 0 && mpz_size(x.get_mpz_t()) <= 1) {
            u64 v = mpz_getlimbn(x.get_mpz_t(), 0);
            return v < m ? v : v % m;
        }
        return u64_from_int(floor_mod(x, int_from_u64(m)));
    }

    u64 coeff_mod(const TermData& t, u64 m) const {
        if (!t.cfits) return u64_from_int(floor_mod(t.coeff, int_from_u64(m)));
        u64 c = t.cmag % m;
        return (t.cneg && c) ? m - c : c;
    }

    u64 eval_mont64(const std::vector<Int>& point, u64 m) const {
        Mont64 mont(m);
        std::vector<u64> pool(pool_slots_);
        for (size_t v = 0; v < nvars_; ++v) {
            if (!var_bits_[v]) continue;
            u64* pw = pool.data() + base_[v];
            pw[0] = mont.to_mont(reduce_u64(point[v], m));
            for (u32 k = 1; k < var_bits_[v]; ++k) pw[k] = mont.mul(pw[k - 1], pw[k - 1]);
        }
        u64 acc = 0;
        for (const auto& t : terms_) {
            u64 prod = mont.to_mont(coeff_mod(t, m));
            for (u32 i = t.lo; i < t.hi; ++i) prod = mont.mul(prod, pool[ops_[i]]);
            acc = mont.add(acc, prod);
        }
        return mont.from_mont(acc);
    }

    u64 eval_plain64(const std::vector<Int>& point, u64 m) const {
        std::vector<u64> pool(pool_slots_);
        for (size_t v = 0; v < nvars_; ++v) {
            if (!var_bits_[v]) continue;
            u64* pw = pool.data() + base_[v];
            pw[0] = reduce_u64(point[v], m);
            for (u32 k = 1; k < var_bits_[v]; ++k) pw[k] = mulmod_u64(pw[k - 1], pw[k - 1], m);
        }
        u64 acc = 0;
        for (const auto& t : terms_) {
            u64 prod = coeff_mod(t, m);
            for (u32 i = t.lo; i < t.hi; ++i) prod = mulmod_u64(prod, pool[ops_[i]], m);
            acc = addmod_u64(acc, prod, m);
        }
        return acc;
    }

    Int eval_wide(const std::vector<Int>& point, const Int& m) const {
        MontCtx ctx(m);
        const size_t w = ctx.width();
        std::vector<mp_limb_t> scratch(2 * w);
        std::vector<mp_limb_t> pool(pool_slots_ * w);
        for (size_t v = 0; v < nvars_; ++v) {
            if (!var_bits_[v]) continue;
            mp_limb_t* pw = pool.data() + base_[v] * w;
            auto first = ctx.to_mont(point[v]);
            std::copy(first.begin(), first.end(), pw);
            for (u32 k = 1; k < var_bits_[v]; ++k)
                ctx.mul_raw(pw + k * w, pw + (k - 1) * w, pw + (k - 1) * w, scratch.data());
        }
        std::vector<mp_limb_t> acc(w, 0), prod(w);
        for (const auto& t : terms_) {
            auto c = ctx.to_mont(t.coeff);
            std::copy(c.begin(), c.end(), prod.begin());
            for (u32 i = t.lo; i < t.hi; ++i)
                ctx.mul_raw(prod.data(), prod.data(),
                            pool.data() + static_cast<size_t>(ops_[i]) * w, scratch.data());
            ctx.add_raw(acc.data(), acc.data(), prod.data());
        }
        MontCtx::Limbs out(acc.begin(), acc.end());
        return ctx.from_mont(out);
    }

    Int eval_generic(const std::vector<Int>& point, const Int& m) const {
        Int acc = 0;
        for (const auto& t : terms_) {
            Int prod = floor_mod(t.coeff, m);
            for (const auto& f : t.factors) {
                Int p = mod_pow(floor_mod(point[f.var], m), f.exp, m);
                prod = prod * p % m;
            }
            acc = (acc + prod) % m;
        }
        return acc;
    }

    size_t nvars_;
    std::vector<TermData> terms_;
    std::vector<u32> var_bits_;
    std::vector<size_t> base_;  // per-variable offset into the squaring pool
    std::vector<u32> ops_;      // flattened per-term pool indices
    size_t pool_slots_ = 0;
};

// Blackbox view of an explicitly known sparse polynomial.
class SparsePolyBlackbox : public Blackbox {
  public:
    explicit SparsePolyBlackbox(SparsePoly f)
        : Blackbox(f.nvars()), poly_(std::move(f)), evaluator_(poly_) {}

    const SparsePoly& poly() const { return poly_; }

  protected:
    Int eval_impl(const std::vector<Int>& point, const Int& m) const override {
        return evaluator_.eval(point, m);
    }

  private:
    SparsePoly poly_;
    SparseEvaluator evaluator_;
};

inline std::unique_ptr<Blackbox> sparse_as_blackbox(SparsePoly f) {
    return std::make_unique<SparsePolyBlackbox>(std::move(f));
}

// Blackbox view of a straight-line program.
class SlpBlackbox : public Blackbox {
  public:
    explicit SlpBlackbox(Slp slp) : Blackbox(slp.nvars()), slp_(std::move(slp)) {}

    const Slp& slp() const { return slp_; }

  protected:
    Int eval_impl(const std::vector<Int>& point, const Int& m) const override {
        return slp_.eval_mod(point, m);
    }

  private:
    Slp slp_;
};

// base minus a known sparse correction; the interpolation rounds peel off
// already-recovered terms this way. Evaluations hit the underlying base
// blackbox, so its usage tally keeps growing.
class DifferenceBlackbox : public Blackbox {
  public:
    DifferenceBlackbox(const Blackbox& base, SparsePoly correction)
        : Blackbox(base.nvars()), base_(base), correction_(std::move(correction)) {
        if (correction_.nvars() != base.nvars())
            throw std::invalid_argument("DifferenceBlackbox: arity mismatch");
    }

  protected:
    Int eval_impl(const std::vector<Int>& point, const Int& m) const override {
        Int b = base_.eval(point, m);
        Int c = correction_.eval(point, m);
        return floor_mod(b - c, m);
    }

  private:
    const Blackbox& base_;
    SparseEvaluator correction_;
};

}  // namespace spi
