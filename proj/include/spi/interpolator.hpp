#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spi/blackbox.hpp"
#include "spi/exponent_code.hpp"
#include "spi/hensel.hpp"
#include "spi/ints.hpp"
#include "spi/modular.hpp"
#include "spi/primes.hpp"
#include "spi/projector.hpp"
#include "spi/rng.hpp"
#include "spi/sparse_poly.hpp"

namespace spi {

// Parameter regimes. `practical` is the runnable default, sized so that
// desk-scale instances finish in seconds. `provable` computes the
// unconditional worst-case parameters exactly; they are astronomically
// large on purpose and only the arithmetic is exercised (see
// derive_params), never an end-to-end run.
enum class ParamMode { practical, provable };

// One planned decoding level: code precision nu (modulus B^nu), m index
// draws per support, lambda supports.
struct LevelShape {
    Int nu;
    size_t m = 0;
    size_t lambda = 0;
};

// Everything a single interpolation pass needs. Scalars first, then the
// sampled randomness (tau and the materialized level schedule). In
// provable mode `schedule` stays empty: materializing it would require
// cached moduli with billions of bits, so only `plan` records the level
// shapes.
struct RunParams {
    size_t T = 0;  // term bound for this pass
    Int S = 0;     // bound on the total bit size of the target
    size_t n = 0;  // number of variables
    ParamMode mode = ParamMode::practical;

    u64 beta = 0;     // size-to-capacity multiplier
    Int Sigma = 0;    // per-row bit-size cutoff (exponents and coefficients)
    Int R = 0;        // lower bound for the cycle length r
    PrimeTriple triple;
    u64 mu = 0;       // B = q^mu
    Int B = 0;        // code base
    Int P = 0;        // encoding primes drawn from (P, 2P)
    double gamma = 0; // support oversampling factor

    std::vector<LevelShape> plan;  // intended level shapes
    std::vector<Int> tau;          // projection directions, each in {1..r-1}
    LevelSchedule schedule;        // materialized levels (practical mode only)
};

struct RunRandomness {
    std::vector<Int> tau;
    LevelSchedule schedule;
};

namespace detail {

// ceil(log2 n) for n >= 1
inline u64 ceil_log2_u64(u64 n) { return n <= 1 ? 0 : bit_size_u64(n - 1); }

// Smallest mu >= 1 with q^mu >= max((2*(2 n bits(q) mu) + 1)^2, 2^20).
// The square keeps the prime pool (P, 2P) dense enough to draw n distinct
// encoding primes per level with room to spare; the 2^20 floor keeps
// singleton decoding capacity comfortably above desk-scale exponents.
inline u64 practical_mu(size_t n, const Int& q) {
    const u64 L = bit_size(q);
    const Int floor20 = Int(1) << 20;
    Int power = q;
    for (u64 mu = 1;; ++mu) {
        Int inner = 2 * int_from_u64(n) * int_from_u64(L) * int_from_u64(mu);
        Int rhs = (2 * inner + 1) * (2 * inner + 1);
        if (rhs < floor20) rhs = floor20;
        if (power >= rhs) return mu;
        power *= q;
        if (mu > 64) throw std::logic_error("practical_mu: no feasible mu");
    }
}

// Eight random evaluations of bb - current modulo a fresh ~62-bit prime;
// true means the residual vanished on all of them (almost certainly zero).
inline bool residual_probably_zero(const Blackbox& bb, const SparsePoly& current, Rng& rng) {
    Int p = sample_prime_in(Int(1) << 61, Int(1) << 62, 512, rng);
    DifferenceBlackbox diff(bb, current);
    std::vector<Int> point(bb.nvars());
    for (int k = 0; k < 8; ++k) {
        for (auto& x : point) x = rng.below_int(p);
        if (diff.eval(point, p) != 0) return false;
    }
    return true;
}

}  // namespace detail

// Draws the per-pass randomness for already-derived scalar parameters:
// tau uniform in {1..r-1}^n and, in practical mode, one set of encoding
// primes and supports per planned level (failure budget 1/(S U + 1) per
// prime batch). Provable schedules are deliberately not materialized;
// the returned schedule is empty in that mode.
inline RunRandomness sample_run_randomness(const RunParams& params, Rng& rng) {
    RunRandomness out;
    Int span = params.triple.r - 1;
    out.tau.reserve(params.n);
    for (size_t i = 0; i < params.n; ++i) out.tau.push_back(1 + rng.below_int(span));
    if (params.mode != ParamMode::practical) return out;

    const size_t U = params.plan.size();
    double S_d = params.S.get_d();
    double eps = 1.0 / (S_d * static_cast<double>(U) + 1.0);
    eps = std::max(eps, 1e-12);

    out.schedule.Sigma = u64_from_int(params.Sigma);
    out.schedule.gamma = params.gamma;
    for (const LevelShape& shape : params.plan) {
        CodeParams cp;
        cp.n = params.n;
        cp.B = params.B;
        cp.nu = static_cast<u32>(u64_from_int(shape.nu));
        cp.P = params.P;
        cp.gamma = params.gamma;
        cp.m = shape.m;
        cp.lambda = shape.lambda;
        cp.cache_modulus();
        cp.primes = random_distinct_primes(params.n, params.P, eps, rng);
        cp.supports.reserve(cp.lambda);
        for (size_t k = 0; k < cp.lambda; ++k) {
            std::vector<u32> I;
            for (size_t d = 0; d < cp.m; ++d) I.push_back(static_cast<u32>(rng.below(params.n)));
            std::sort(I.begin(), I.end());
            I.erase(std::unique(I.begin(), I.end()), I.end());
            cp.supports.push_back(std::move(I));
        }
        validate_code_params(cp);
        out.schedule.levels.push_back(std::move(cp));
    }
    return out;
}

// Computes all parameters for one interpolation pass.
//
// Practical mode (the default, and the only runnable one): beta = 16,
// Sigma = clamp(floor(beta S / T), 128, 192), R = max(4T, 64, min(S, 2^20)),
// gamma = max(2, ceil(log2 n) + 7), mu per practical_mu (redrawing the
// prime triple a few times when the first draw would force mu > 1),
// P = floor(sqrt(B)/2). The decoding plan is five identical peeling
// levels with code precision nu = 2, supports of m = max(1, ceil(n/6))
// index draws, and ceil(gamma) supports per level: across levels,
// variables recovered earlier drop out of the residual, so the chance
// that a support isolates a still-unknown variable rises level by level.
//
// Provable mode: beta = 2^6 sigma_S^2, Sigma = floor(beta S / T),
// R = max(S, 2^58) beta^2, mu minimal with q^mu >= 2^52 n^4 S^6,
// P = floor(sqrt(B)/2), gamma = ceil(6 e log2 S), and the plan has
// U = ceil(log2 min(Sigma, n)) + 2 levels with nu_u = ceil(5 Sigma /
// 2^(U-u)), m_u = ceil(n / 2^(U-u)), lambda_u = ceil(gamma n / m_u).
// All of it exact integer arithmetic; the schedule stays empty.
//
// Both modes: B = q^mu is odd and (2P)^2 < B by construction.
inline RunParams derive_params(size_t T, const Int& S, size_t n, ParamMode mode, Rng& rng) {
    if (T < 1 || n < 1) throw std::invalid_argument("derive_params: need T >= 1 and n >= 1");
    if (S < int_from_u64(T) || S < int_from_u64(n))
        throw std::invalid_argument("derive_params: need S >= T and S >= n");

    RunParams p;
    p.T = T;
    p.S = S;
    p.n = n;
    p.mode = mode;

    if (mode == ParamMode::practical) {
        p.beta = 16;
        Int sigma = int_from_u64(p.beta) * S / int_from_u64(T);
        if (sigma < 128) sigma = 128;
        if (sigma > 192) sigma = 192;
        p.Sigma = sigma;
        p.gamma = std::max(
            2.0, static_cast<double>(detail::ceil_log2_u64(static_cast<u64>(n))) + 7.0);
        p.R = int_from_u64(std::max<u64>(4 * static_cast<u64>(T), 64));
        Int cap = Int(1) << 20;
        Int s_part = S < cap ? S : cap;
        if (p.R < s_part) p.R = s_part;
        // prefer mu = 1: a one-word base halves every decoding modulus
        for (int attempt = 0;; ++attempt) {
            p.triple = generate_prime_triple(p.R, 1e-9, rng);
            p.mu = detail::practical_mu(n, p.triple.q);
            if (p.mu == 1 || attempt == 7) break;
        }
        p.B = ipow(p.triple.q, p.mu);
        p.P = sqrt(p.B) / 2;

        const size_t m = std::max<size_t>(1, (n + 5) / 6);
        const size_t lambda = static_cast<size_t>(p.gamma);
        for (int u = 0; u < 5; ++u) p.plan.push_back({Int(2), m, lambda});
    } else {
        if (S < (Int(1) << 16))
            throw std::invalid_argument("derive_params: provable mode requires S >= 2^16");
        const u64 sigma_S = bit_size(S);
        p.beta = u64{64} * sigma_S * sigma_S;
        p.Sigma = int_from_u64(p.beta) * S / int_from_u64(T);
        Int floor_r = S > (Int(1) << 58) ? S : (Int(1) << 58);
        p.R = floor_r * int_from_u64(p.beta) * int_from_u64(p.beta);
        p.triple = generate_prime_triple(p.R, 1e-9, rng);
        Int bound = (Int(1) << 52) * ipow(int_from_u64(n), 4) * ipow(S, 6);
        p.mu = 1;
        p.B = p.triple.q;
        while (p.B < bound) {
            p.B *= p.triple.q;
            ++p.mu;
        }
        p.P = sqrt(p.B) / 2;
        // log2 S without overflowing double for huge S
        long exp2;
        double mant = mpz_get_d_2exp(&exp2, S.get_mpz_t());
        double log2_S = std::log2(mant) + static_cast<double>(exp2);
        p.gamma = std::ceil(6.0 * 2.718281828459045 * log2_S);

        Int floor_dim = int_from_u64(n) < p.Sigma ? int_from_u64(n) : p.Sigma;
        const u64 U = detail::ceil_log2_u64(u64_from_int(floor_dim)) + 2;
        for (u64 u = 1; u <= U; ++u) {
            Int denom = Int(1) << (U - u);
            Int nu = (5 * p.Sigma + denom - 1) / denom;
            size_t m = static_cast<size_t>((n + u64_from_int(denom) - 1) / u64_from_int(denom));
            size_t lam = static_cast<size_t>(
                ceil_count(p.gamma * static_cast<double>(n) / static_cast<double>(m)));
            p.plan.push_back({nu, m, lam});
        }
    }

    RunRandomness rr = sample_run_randomness(p, rng);
    p.tau = std::move(rr.tau);
    p.schedule = std::move(rr.schedule);
    return p;
}

// One approximation pass against the residual bb - current: recovers most
// of its terms and returns them as a correction polynomial. Pipeline:
// fresh parameters and randomness; dense cyclic projection (term count
// T'); per-level code extraction; hierarchical exponent decoding;
// coefficient transport at precision q^nu_c with q^nu_c >= 2^(Sigma+1),
// coefficients mapped to centered representatives. Rows that are
// malformed (zero or oversized coefficient, negative exponent entry, or
// inconsistent with their projected slot modulo r) are dropped.
//
// Never aborts a run: an empty projection or an unlucky randomness draw
// (prime budget exhausted, colliding projection nodes) yields delta = 0
// and the caller's later rounds retry with fresh randomness.
inline SparsePoly t_approximation(const Blackbox& bb, const SparsePoly& current, size_t T_j,
                                  const Int& S, size_t n, Rng& rng, ParamMode mode) {
    if (mode != ParamMode::practical)
        throw std::invalid_argument("t_approximation: only practical mode is runnable");
    if (bb.nvars() != n || current.nvars() != n)
        throw std::invalid_argument("t_approximation: arity mismatch");

    SparsePoly zero(n, {});
    try {
        RunParams par = derive_params(T_j, S, n, mode, rng);
        const u64 r = u64_from_int(par.triple.r);
        std::vector<u64> tau(n);
        for (size_t i = 0; i < n; ++i) tau[i] = u64_from_int(par.tau[i]);
        DifferenceBlackbox diff(bb, current);

        CyclicPoly proj = project_dense(diff, tau, r, par.triple.q, par.triple.omega);
        if (proj.entries.empty()) return zero;
        std::vector<u64> slots;
        slots.reserve(proj.entries.size());
        for (const auto& [k, v] : proj.entries) slots.push_back(k);

        FaithfulCodeTable table =
            extract_code_table(diff, slots, tau, r, par.schedule, par.triple, par.mu);
        std::vector<std::vector<Int>> rows = hierarchical_decode(table.psi, par.schedule);

        // coefficient precision: smallest power of q holding centered Sigma-bit values
        const u64 Sigma = u64_from_int(par.Sigma);
        Int need = Int(1) << (Sigma + 1);
        u64 nu_c = 1;
        Int M = par.triple.q;
        while (M < need) {
            M *= par.triple.q;
            ++nu_c;
        }
        Int root = hensel_lift_root(par.triple.omega, par.triple.r, par.triple.q, nu_c);
        std::vector<Int> coeffs =
            project_sparse(diff, slots, tau, r, M, root, std::vector<Int>(n, Int(1)));

        std::vector<Term> kept;
        for (size_t j = 0; j < slots.size(); ++j) {
            Int c = centered_rem(coeffs[j], M);
            if (c == 0 || bit_size(c) >= Sigma) continue;
            const std::vector<Int>& e = rows[j];
            bool ok = true;
            Int slot_check = 0;
            for (size_t i = 0; i < n; ++i) {
                if (e[i] < 0) {
                    ok = false;
                    break;
                }
                slot_check += floor_mod(e[i], par.triple.r) * int_from_u64(tau[i]);
            }
            // a decoded row must reproduce the projected slot it came from
            if (!ok || floor_mod(slot_check, par.triple.r) != int_from_u64(slots[j])) continue;
            kept.push_back({e, c});
        }
        return SparsePoly(n, std::move(kept));
    } catch (const vandermonde_error&) {
        return zero;
    } catch (const draw_budget_exceeded&) {
        return zero;
    }
}

// Interpolates the sparse polynomial behind bb, promised to have at most
// T terms and total bit size at most S. Runs ceil(log2 T) + 1 rounds,
// each adding a correction for the current residual with a halved term
// bound; before every round an eight-point probe checks whether the
// residual already vanished. Monte Carlo: the result can be wrong with
// small probability, see verify. Reproducible for a fixed seed.
inline SparsePoly interpolate(const Blackbox& bb, size_t n, size_t T, const Int& S, Rng& rng,
                              ParamMode mode = ParamMode::practical) {
    if (mode != ParamMode::practical)
        throw std::invalid_argument("interpolate: only practical mode is runnable");
    if (bb.nvars() != n) throw std::invalid_argument("interpolate: arity mismatch");
    if (T < 1) throw std::invalid_argument("interpolate: term bound must be >= 1");

    SparsePoly f(n, {});
    const u64 J = detail::ceil_log2_u64(static_cast<u64>(T)) + 1;
    for (u64 j = 0; j < J; ++j) {
        if (detail::residual_probably_zero(bb, f, rng)) return f;
        size_t T_j = (T + (size_t{1} << j) - 1) >> j;
        SparsePoly delta = t_approximation(bb, f, T_j, S, n, rng, mode);
        f = f.add(delta);
    }

    if (f.term_count() > T) {
        // keep the T smallest coefficients: surviving garbage is huge
        std::vector<Term> ts = f.terms();
        std::stable_sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) {
            u64 ba = bit_size(a.coeff), bb2 = bit_size(b.coeff);
            if (ba != bb2) return ba < bb2;
            return lex_less(a.exponent, b.exponent);
        });
        ts.resize(T);
        f = SparsePoly(n, std::move(ts));
    }
    return f;
}

// Probabilistic identity test: evaluates bb and candidate at `trials`
// random points, each modulo a fresh random ~62-bit prime. True means no
// mismatch found; false is a certain mismatch.
inline bool verify(const SparsePoly& candidate, const Blackbox& bb, size_t trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("verify: trials must be >= 1");
    if (candidate.nvars() != bb.nvars())
        throw std::invalid_argument("verify: arity mismatch");
    std::vector<Int> point(bb.nvars());
    for (size_t t = 0; t < trials; ++t) {
        Int p = detail::sample_prime_in(Int(1) << 61, Int(1) << 62, 512, rng);
        for (auto& x : point) x = rng.below_int(p);
        if (bb.eval(point, p) != candidate.eval_mod(point, p)) return false;
    }
    return true;
}

}  // namespace spi
