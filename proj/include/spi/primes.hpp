#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "spi/ints.hpp"
#include "spi/modular.hpp"
#include "spi/rng.hpp"

namespace spi {

// Raised when a randomized search runs out of its candidate budget.
struct draw_budget_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probabilistic primality test. Always true for primes; a composite slips
// through with probability at most 4^-rounds.
inline bool is_probable_prime(const Int& n, int rounds = 40) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), rounds) != 0;
}

inline bool is_probable_prime_u64(u64 n, int rounds = 40) {
    return is_probable_prime(int_from_u64(n), rounds);
}

// Natural log of a positive Int, good to double precision even far beyond
// the double range.
inline double log_int(const Int& n) {
    if (n <= 0) throw std::invalid_argument("log_int: n <= 0");
    long exp2;
    double mant = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

// Upper bound on the number of distinct prime divisors of N.
inline double rho_bound(const Int& N) {
    if (N < 1) throw std::invalid_argument("rho_bound: N < 1");
    const double e = std::exp(1.0);
    double ln = N == 1 ? 0.0 : log_int(N);
    if (ln < e) return 1.538 * e;  // N below e^e
    return 1.538 * ln / std::log(ln);
}

// Per-slot draw budget that makes a batch of n prime searches in (P, 2P)
// fail with probability at most eps.
inline u64 prime_draw_budget(size_t n, const Int& P, double eps) {
    return static_cast<u64>(std::ceil(
        (20.0 / 7.0) * (std::log(2.0 * static_cast<double>(n)) + std::log(1.0 / eps)) *
        log_int(P)));
}

// n pairwise-distinct primes uniform in the open interval (P, 2P).
// Each slot gets a budget of k uniform draws, sized so the whole batch
// fails with probability at most eps; exhausting a slot raises.
inline std::vector<Int> random_distinct_primes(size_t n, const Int& P, double eps,
                                               Rng& rng) {
    if (P < 22) throw std::invalid_argument("random_distinct_primes: P < 22");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("random_distinct_primes: eps out of (0,1)");
    // The eps guarantee additionally assumes P / log P > 4n; that is the
    // caller's obligation. Enforcing it here would reject interval sizes
    // that still succeed in practice, so a too-dense request just risks
    // exhausting its draw budget.
    u64 k = prime_draw_budget(n, P, eps);
    Int span = P - 1;  // candidates P+1 .. 2P-1
    std::vector<Int> out;
    std::set<Int> seen;
    for (size_t slot = 0; slot < n; ++slot) {
        bool found = false;
        for (u64 draw = 0; draw < k; ++draw) {
            Int cand = P + 1 + rng.below_int(span);
            if (seen.count(cand)) continue;
            if (is_probable_prime(cand)) {
                seen.insert(cand);
                out.push_back(cand);
                found = true;
                break;
            }
        }
        if (!found)
            throw draw_budget_exceeded("random_distinct_primes: slot exhausted its draws");
    }
    return out;
}

// A prime r, a prime q = kr + 1, and an element of multiplicative order
// exactly r in the integers mod q.
struct PrimeTriple {
    Int r;
    Int q;
    Int omega;
};

namespace detail {

inline Int sample_prime_in(const Int& lo_excl, const Int& hi_excl, u64 budget, Rng& rng) {
    Int span = hi_excl - lo_excl - 1;
    if (span <= 0) throw std::invalid_argument("sample_prime_in: empty interval");
    for (u64 i = 0; i < budget; ++i) {
        Int cand = lo_excl + 1 + rng.below_int(span);
        if (is_probable_prime(cand)) return cand;
    }
    throw draw_budget_exceeded("sample_prime_in: no prime found within budget");
}

// Prime q = k*r + 1 in (2R, window); k sampled uniformly.
inline Int sample_q(const Int& r, const Int& R, const Int& window, u64 budget, Rng& rng) {
    Int k_lo = 2 * R / r + 1;  // smallest k with k*r + 1 > 2R
    while (k_lo * r + 1 <= 2 * R) ++k_lo;
    Int k_hi = (window - 2) / r;  // largest k with k*r + 1 < window
    if (k_hi < k_lo) throw std::invalid_argument("sample_q: empty window");
    Int span = k_hi - k_lo + 1;
    for (u64 i = 0; i < budget; ++i) {
        Int k = k_lo + rng.below_int(span);
        Int q = k * r + 1;
        if (is_probable_prime(q)) return q;
    }
    throw draw_budget_exceeded("sample_q: no prime found within budget");
}

}  // namespace detail

// Draws r uniformly among primes of (R, 2R), then a prime q = 1 mod r,
// then an order-r element mod q. The q search starts in a small window
// just above 2R and widens toward R^6 if unlucky.
inline PrimeTriple generate_prime_triple(const Int& R, double eps, Rng& rng) {
    if (R < 4) throw std::invalid_argument("generate_prime_triple: R < 4");
    double lnR = log_int(R);
    u64 budget = 64 * static_cast<u64>(std::ceil(lnR));
    int attempts = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / eps))));

    std::exception_ptr last;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        try {
            Int r = detail::sample_prime_in(R, 2 * R, budget, rng);

            Int qmax_final = R * R * R;
            qmax_final = qmax_final * qmax_final;  // R^6
            Int window =
                2 * R * std::max<long>(32, static_cast<long>(32.0 * lnR * lnR)) + 2;
            Int q;
            for (;;) {
                if (window > qmax_final) window = qmax_final;
                try {
                    q = detail::sample_q(r, R, window, budget, rng);
                    break;
                } catch (const draw_budget_exceeded&) {
                    if (window == qmax_final) throw;
                    window = window * window;  // widen toward R^6
                }
            }

            Int exp = (q - 1) / r;
            for (u64 i = 0; i < budget; ++i) {
                Int a = 2 + rng.below_int(q - 3);
                Int omega = mod_pow(a, exp, q);
                if (omega != 1) return PrimeTriple{r, q, omega};
            }
            throw draw_budget_exceeded("generate_prime_triple: no order-r element found");
        } catch (const draw_budget_exceeded&) {
            last = std::current_exception();
        }
    }
    std::rethrow_exception(last);
}

}  // namespace spi
