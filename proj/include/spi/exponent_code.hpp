#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "spi/divisors.hpp"
#include "spi/ints.hpp"
#include "spi/primes.hpp"
#include "spi/rng.hpp"

namespace spi {

// ceil that tolerates doubles sitting a hair above an exact integer
inline u64 ceil_count(double x) {
    if (x <= 0) return 0;
    return static_cast<u64>(std::ceil(x - 1e-9));
}

// Sentinel: no code entry was accepted for this variable.
inline constexpr size_t k_none = ~static_cast<size_t>(0);

// Parameters of one randomized exponent code: an odd base B and precision
// nu fix the residue ring Z_{B^nu}; each of the lambda supports holds up
// to m variable indices; one prime per variable, all in (P, 2P).
struct CodeParams {
    size_t n = 0;
    Int B;
    u32 nu = 1;
    Int P;
    double gamma = 1.0;
    size_t m = 1;
    size_t lambda = 0;
    std::vector<std::vector<u32>> supports;  // sorted, deduplicated
    std::vector<Int> primes;
    Int B_nu;  // cached B^nu

    void cache_modulus() { B_nu = ipow(B, nu); }
};

// One code word: centered residues mod B^nu, one per support.
using Code = std::vector<Int>;

// Checks what is cheap and structural; the size chain
// 2n log B < P and (2P)^2 < B is the caller's analytical obligation
// (mode-specific parameter derivation guarantees it).
inline void validate_code_params(const CodeParams& p) {
    if (p.n == 0) throw std::invalid_argument("CodeParams: n = 0");
    if (p.B < 3 || mpz_even_p(p.B.get_mpz_t()))
        throw std::invalid_argument("CodeParams: B must be odd and >= 3");
    if (p.nu == 0) throw std::invalid_argument("CodeParams: nu = 0");
    if (p.m == 0 || p.m > p.n) throw std::invalid_argument("CodeParams: m out of range");
    if (p.supports.size() != p.lambda)
        throw std::invalid_argument("CodeParams: support count != lambda");
    if (p.primes.size() != p.n) throw std::invalid_argument("CodeParams: prime count != n");
    for (const auto& I : p.supports) {
        if (I.size() > p.m) throw std::invalid_argument("CodeParams: oversized support");
        for (size_t j = 0; j < I.size(); ++j) {
            if (I[j] >= p.n) throw std::invalid_argument("CodeParams: support index range");
            if (j > 0 && I[j] <= I[j - 1])
                throw std::invalid_argument("CodeParams: support not sorted unique");
        }
    }
    if (p.B_nu != ipow(p.B, p.nu)) throw std::invalid_argument("CodeParams: stale B_nu");
}

// Draws the lambda = ceil(gamma n / m) supports (m uniform indices each,
// duplicates collapsed) and the n distinct primes.
inline CodeParams sample_code_params(size_t n, size_t m, u32 nu, double gamma, const Int& P,
                                     const Int& B, Rng& rng) {
    CodeParams p;
    p.n = n;
    p.B = B;
    p.nu = nu;
    p.P = P;
    p.gamma = gamma;
    p.m = m;
    p.lambda = static_cast<size_t>(ceil_count(gamma * static_cast<double>(n) /
                                              static_cast<double>(m)));
    p.cache_modulus();
    p.primes = random_distinct_primes(n, P, 1e-9, rng);
    p.supports.reserve(p.lambda);
    for (size_t k = 0; k < p.lambda; ++k) {
        std::vector<u32> I;
        for (size_t d = 0; d < m; ++d) I.push_back(static_cast<u32>(rng.below(n)));
        std::sort(I.begin(), I.end());
        I.erase(std::unique(I.begin(), I.end()), I.end());
        p.supports.push_back(std::move(I));
    }
    validate_code_params(p);
    return p;
}

// phi_k(e) = centered (sum over i in I_k of p_i e_i) mod B^nu, for every support.
inline Code encode(const std::vector<Int>& e, const CodeParams& p) {
    if (e.size() != p.n) throw std::invalid_argument("encode: arity mismatch");
    Code code(p.lambda);
    for (size_t k = 0; k < p.lambda; ++k) {
        Int s = 0;
        for (u32 i : p.supports[k]) s += p.primes[i] * e[i];
        code[k] = centered_rem(s, p.B_nu);
    }
    return code;
}

// For each code word and each variable i: the smallest k such that
// p_i | psi_k, psi_k != 0, and 4 P |psi_k| < B^nu p_i; k_none when no
// entry qualifies. One shared divisors call finds all divisibility
// triples, then the smallest qualifying k wins per (word, i).
inline std::vector<std::vector<size_t>> recover_k_indices(const std::vector<Code>& batch,
                                                          const CodeParams& p) {
    std::vector<Int> values;              // |psi_k| over all words, zeros skipped
    std::vector<std::pair<size_t, size_t>> origin;  // flat -> (word j, entry k)
    for (size_t j = 0; j < batch.size(); ++j) {
        if (batch[j].size() != p.lambda)
            throw std::invalid_argument("recover_k_indices: code length mismatch");
        for (size_t k = 0; k < p.lambda; ++k)
            if (batch[j][k] != 0) {
                values.push_back(abs_int(batch[j][k]));
                origin.emplace_back(j, k);
            }
    }
    std::vector<std::vector<size_t>> out(batch.size(),
                                         std::vector<size_t>(p.n, k_none));
    if (values.empty()) return out;
    DivisorPairs pairs = divisors(p.primes, values);
    for (const auto& [i, flat] : pairs) {
        auto [j, k] = origin[flat];
        // size filter: 4 P |psi_k| / p_i < B^nu, compared exactly
        if (4 * p.P * values[flat] >= p.B_nu * p.primes[i]) continue;
        if (k < out[j][i]) out[j][i] = k;
    }
    return out;
}

// Single-level bulk decode: e~_i = psi_{k_i} / p_i where k_i is the index
// recover_k_indices picked, 0 where none. Every output satisfies
// 2 p_i |e~_i| < B^nu, garbage included.
inline std::vector<std::vector<Int>> bulk_decode_level(const std::vector<Code>& batch,
                                                       const CodeParams& p) {
    auto kidx = recover_k_indices(batch, p);
    std::vector<std::vector<Int>> out(batch.size(), std::vector<Int>(p.n, Int(0)));
    for (size_t j = 0; j < batch.size(); ++j)
        for (size_t i = 0; i < p.n; ++i)
            if (kidx[j][i] != k_none)
                out[j][i] = divexact(batch[j][kidx[j][i]], p.primes[i]);
    return out;
}

// Geometric ladder of codes: precision nu doubles toward the top while
// support size m doubles too, so early levels pin down coarse digits of
// few-variable slices and later levels refine everything.
struct LevelSchedule {
    u64 Sigma = 0;
    double gamma = 1.0;
    std::vector<CodeParams> levels;  // levels[u-1] holds level u

    size_t depth() const { return levels.size(); }
};

// Levels u = 1..U with U = ceil(log2 min(Sigma, n)) + 2,
// nu_u = ceil(5 Sigma / 2^{U-u}), m_u = ceil(n / 2^{U-u}),
// lambda_u = ceil(gamma n / m_u); fresh primes and supports per level.
inline LevelSchedule make_level_schedule(u64 Sigma, size_t n, double gamma, const Int& P,
                                         const Int& B, Rng& rng) {
    if (Sigma < 1 || n < 1) throw std::invalid_argument("make_level_schedule: empty");
    LevelSchedule s;
    s.Sigma = Sigma;
    s.gamma = gamma;
    u64 floor_dim = std::min<u64>(Sigma, n);
    size_t U = static_cast<size_t>(bit_size_u64(floor_dim - 1)) + 2;  // ceil(log2) + 2
    for (size_t u = 1; u <= U; ++u) {
        u64 denom = u64{1} << (U - u);
        u32 nu = static_cast<u32>((5 * Sigma + denom - 1) / denom);
        size_t m = static_cast<size_t>((n + denom - 1) / denom);
        s.levels.push_back(sample_code_params(n, m, nu, gamma, P, B, rng));
    }
    return s;
}

// Observer for instrumented runs: called after each level with the level
// index (0-based) and the accumulated approximations.
using DecodeObserver =
    std::function<void(size_t level, const std::vector<std::vector<Int>>& partial)>;

// Multi-level successive approximation (one batch entry per unknown
// exponent vector): at each level, subtract the code of the current
// approximation, centered-reduce, bulk-decode the residual digits, and
// accumulate. Rows whose final size exceeds Sigma are cleared; the
// caller's verification loop treats them as misses.
inline std::vector<std::vector<Int>> hierarchical_decode(
    const std::vector<std::vector<Code>>& code_batches, const LevelSchedule& s,
    const DecodeObserver& observer = nullptr) {
    size_t U = s.depth();
    if (code_batches.size() != U)
        throw std::invalid_argument("hierarchical_decode: level count mismatch");
    size_t T = U ? code_batches[0].size() : 0;
    for (const auto& b : code_batches)
        if (b.size() != T)
            throw std::invalid_argument("hierarchical_decode: ragged batches");

    size_t n = U ? s.levels[0].n : 0;
    std::vector<std::vector<Int>> e(T, std::vector<Int>(n, Int(0)));
    for (size_t u = 0; u < U; ++u) {
        const CodeParams& p = s.levels[u];
        std::vector<Code> residual(T);
        for (size_t j = 0; j < T; ++j) {
            Code own = encode(e[j], p);
            Code dot(p.lambda);
            for (size_t k = 0; k < p.lambda; ++k)
                dot[k] = centered_rem(code_batches[u][j][k] - own[k], p.B_nu);
            residual[j] = std::move(dot);
        }
        auto inc = bulk_decode_level(residual, p);
        for (size_t j = 0; j < T; ++j)
            for (size_t i = 0; i < n; ++i) e[j][i] += inc[j][i];
        if (observer) observer(u, e);
    }
    for (auto& row : e) {
        u64 sz = 0;
        for (const auto& x : row) sz += bit_size(x);
        if (sz > s.Sigma) std::fill(row.begin(), row.end(), Int(0));
    }
    return e;
}

}  // namespace spi
