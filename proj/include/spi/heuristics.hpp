#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spi/divisors.hpp"
#include "spi/exponent_code.hpp"
#include "spi/ints.hpp"
#include "spi/primes.hpp"
#include "spi/rng.hpp"

namespace spi {

// Codes over the plain naturals, no modulus: psi_k(e) = sum over i in I_k
// of primes[i] * e[i]. The greedy peel-off decoder below recovers e from
// psi when the supports are sparse enough.
struct SimpleCodeParams {
    size_t n = 0;
    size_t V = 1;    // assumed max occupied variables per vector
    size_t m = 0;    // ceil(n / V), the expected occupied count
    size_t lambda = 0;
    Int P = 0;       // primes drawn from (P, 2P)
    std::vector<Int> primes;
    std::vector<std::vector<u32>> supports;
};

// Draws the n encoding primes from (P, 2P) with P = max(22, ceil(eta n
// log2 n)) and adopts the given supports. eta >= 2 keeps the pool dense
// enough that distinct primes exist for every n.
inline SimpleCodeParams make_simple_params(size_t n, size_t V, double eta,
                                           std::vector<std::vector<u32>> supports, Rng& rng) {
    if (n < 1 || V < 1) throw std::invalid_argument("make_simple_params: empty");
    if (eta < 2.0) throw std::invalid_argument("make_simple_params: eta < 2");
    SimpleCodeParams p;
    p.n = n;
    p.V = V;
    p.m = (n + V - 1) / V;
    p.lambda = supports.size();
    double bits = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
    u64 pf = ceil_count(eta * static_cast<double>(n) * bits);
    p.P = int_from_u64(std::max<u64>(22, pf));
    p.primes = random_distinct_primes(n, p.P, 1e-9, rng);
    p.supports = std::move(supports);
    for (const auto& I : p.supports) {
        for (size_t j = 0; j < I.size(); ++j) {
            if (I[j] >= n) throw std::invalid_argument("make_simple_params: index range");
            if (j > 0 && I[j] <= I[j - 1])
                throw std::invalid_argument("make_simple_params: support not sorted unique");
        }
    }
    return p;
}

inline std::vector<Int> encode(const std::vector<Int>& e, const SimpleCodeParams& p) {
    if (e.size() != p.n) throw std::invalid_argument("encode: arity mismatch");
    std::vector<Int> psi(p.lambda, Int(0));
    for (size_t k = 0; k < p.lambda; ++k)
        for (u32 i : p.supports[k]) psi[k] += p.primes[i] * e[i];
    return psi;
}

// Greedy peel-off decoder: repeatedly pick the first pair (k, i), in
// ascending order, with i in I_k, psi_k != 0, p_i dividing psi_k, and the
// pair not blacklisted; tentatively attribute q = psi_k / p_i units to
// variable i. If subtracting its contribution would drive some slot
// negative, or would not strictly reduce the number of nonzero slots, the
// pair is blacklisted; otherwise the attribution is accepted and the
// blacklist cleared. Succeeds exactly when psi is peeled to all zeros; a
// success always re-encodes to the original input.
//
// `steps` (optional) receives the number of pairs processed; it is
// bounded by lambda * (n * lambda + 1).
inline std::optional<std::vector<Int>> mystery_decode(std::vector<Int> psi,
                                                      const SimpleCodeParams& p,
                                                      size_t* steps = nullptr) {
    if (psi.size() != p.lambda) throw std::invalid_argument("mystery_decode: word length");
    if (steps) *steps = 0;
    for (const Int& w : psi)
        if (w < 0) return std::nullopt;

    // supports containing each variable
    std::vector<std::vector<u32>> member(p.n);
    for (size_t k = 0; k < p.lambda; ++k)
        for (u32 i : p.supports[k]) member[i].push_back(static_cast<u32>(k));

    // blacklist with O(1) clear: a pair is listed iff its stamp == epoch
    std::vector<u64> stamp(p.lambda * p.n, 0);
    u64 epoch = 1;

    std::vector<Int> e(p.n, Int(0));
    for (;;) {
        bool found = false;
        for (size_t k = 0; k < p.lambda && !found; ++k) {
            if (psi[k] == 0) continue;
            for (u32 i : p.supports[k]) {
                if (stamp[k * p.n + i] == epoch) continue;
                if (!divisible(psi[k], p.primes[i])) continue;
                found = true;
                if (steps) ++*steps;
                Int q = divexact(psi[k], p.primes[i]);
                // contribution of q units at i: p_i q on every support with i
                bool negative = false;
                size_t newly_zero = 0;
                for (u32 j : member[i]) {
                    Int d = p.primes[i] * q;
                    if (psi[j] < d) {
                        negative = true;
                        break;
                    }
                    if (psi[j] == d) ++newly_zero;
                }
                if (negative || newly_zero == 0) {
                    stamp[k * p.n + i] = epoch;
                } else {
                    e[i] += q;
                    for (u32 j : member[i]) psi[j] -= p.primes[i] * q;
                    ++epoch;
                }
                break;
            }
        }
        if (!found) break;
    }
    for (const Int& w : psi)
        if (w != 0) return std::nullopt;
    return e;
}

// Three independent uniform maps from the n variables onto chi =
// ceil(gamma n / 3) cells; the supports are the 3 chi fibers. Every
// variable lands in exactly three supports, one per map, and each map's
// fibers partition the variables.
inline std::vector<std::vector<u32>> zeta_supports(size_t n, double gamma, Rng& rng) {
    if (n < 1 || !(gamma > 0)) throw std::invalid_argument("zeta_supports: bad shape");
    size_t chi = static_cast<size_t>(ceil_count(gamma * static_cast<double>(n) / 3.0));
    std::vector<std::vector<u32>> supports(3 * chi);
    for (size_t j = 0; j < 3; ++j)
        for (size_t i = 0; i < n; ++i)
            supports[j * chi + rng.below(chi)].push_back(static_cast<u32>(i));
    return supports;
}

struct PhaseRow {
    double gamma = 0;
    double success_rate = 0;
    size_t trials = 0;
    size_t n = 0;
};

// Success-rate sweep of the peel-off decoder over a gamma grid. Ball
// model: every variable holds exactly one ball (e_i = 1 for all i), so
// a trial peels n balls out of 3 * ceil(gamma n / 3) fiber slots. With
// three slots per ball this puts the 50% crossing near gamma 1.222,
// the 2-core threshold of random 3-uniform hypergraphs. The encoding
// primes are drawn once per gamma point; the fiber maps are fresh per
// trial (seed-split, so trials are order-independent). A trial
// succeeds only on exact recovery.
inline std::vector<PhaseRow> phase_experiment(size_t n, const std::vector<double>& gamma_grid,
                                              size_t trials, Rng& rng) {
    if (n < 1 || trials < 1) throw std::invalid_argument("phase_experiment: empty");
    std::vector<PhaseRow> rows;
    rows.reserve(gamma_grid.size());
    for (size_t gi = 0; gi < gamma_grid.size(); ++gi) {
        double gamma = gamma_grid[gi];
        Rng prime_rng = rng.fork((u64{1} << 32) + gi);
        SimpleCodeParams shared =
            make_simple_params(n, 3, 2.0, {{}}, prime_rng);  // primes only; supports per trial
        size_t wins = 0;
        for (size_t t = 0; t < trials; ++t) {
            Rng trial_rng = rng.fork(gi * trials + t);
            SimpleCodeParams p = shared;
            p.supports = zeta_supports(n, gamma, trial_rng);
            p.lambda = p.supports.size();
            std::vector<Int> e(n, Int(1));
            auto got = mystery_decode(encode(e, p), p);
            if (got && *got == e) ++wins;
        }
        rows.push_back({gamma, static_cast<double>(wins) / static_cast<double>(trials),
                        trials, n});
    }
    return rows;
}

inline std::string phase_csv_header() { return "gamma,success_rate,trials,n"; }

inline std::string phase_csv_row(const PhaseRow& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%g,%g,%zu,%zu", r.gamma, r.success_rate, r.trials, r.n);
    return buf;
}

// Exponent vector as one natural: the product of primes[i]^e[i].
inline Int bt_encode(const std::vector<Int>& e, const std::vector<Int>& primes) {
    if (e.size() != primes.size()) throw std::invalid_argument("bt_encode: arity mismatch");
    Int out = 1;
    for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0) throw std::invalid_argument("bt_encode: negative exponent");
        if (e[i] == 0) continue;
        Int pw;
        mpz_pow_ui(pw.get_mpz_t(), primes[i].get_mpz_t(), u64_from_int(e[i]));
        out *= pw;
    }
    return out;
}

// Bulk inverse of bt_encode: e[i] is the multiplicity of primes[i].
// Divisibility hits come from one batched divisors() pass, then each hit
// is peeled off by repeated exact division. A row whose leftover cofactor
// is not 1 (a foreign factor, or a value below 1) fails; failure is a
// value, not an error.
inline std::vector<std::optional<std::vector<Int>>> bt_decode_bulk(
    const std::vector<Int>& values, const std::vector<Int>& primes) {
    std::vector<std::optional<std::vector<Int>>> rows(values.size());
    std::vector<Int> good;
    std::vector<size_t> origin;
    for (size_t k = 0; k < values.size(); ++k)
        if (values[k] >= 1) {
            good.push_back(values[k]);
            origin.push_back(k);
        }
    DivisorPairs hits = divisors(primes, good);
    std::vector<std::vector<size_t>> per_value(good.size());
    for (const auto& [i, k] : hits) per_value[k].push_back(i);

    for (size_t g = 0; g < good.size(); ++g) {
        Int cof = good[g];
        std::vector<Int> e(primes.size(), Int(0));
        for (size_t i : per_value[g]) {
            mp_bitcnt_t cnt =
                mpz_remove(cof.get_mpz_t(), cof.get_mpz_t(), primes[i].get_mpz_t());
            e[i] = int_from_u64(cnt);
        }
        if (cof == 1) rows[origin[g]] = std::move(e);
    }
    return rows;
}

// First n primes, the conventional node set for bt_encode.
inline std::vector<Int> bt_primelist(size_t n) {
    std::vector<Int> out;
    out.reserve(n);
    Int c = 2;
    while (out.size() < n) {
        out.push_back(c);
        mpz_nextprime(c.get_mpz_t(), c.get_mpz_t());
    }
    return out;
}

}  // namespace spi
