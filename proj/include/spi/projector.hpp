#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "spi/blackbox.hpp"
#include "spi/dft.hpp"
#include "spi/exponent_code.hpp"
#include "spi/hensel.hpp"
#include "spi/primes.hpp"
#include "spi/sparse_poly.hpp"
#include "spi/vandermonde.hpp"

namespace spi {

namespace detail {

inline void check_tau(const std::vector<u64>& tau, size_t nvars, u64 r) {
    if (tau.size() != nvars) throw std::invalid_argument("projector: tau arity mismatch");
    for (u64 t : tau)
        if (t == 0 || t >= r) throw std::invalid_argument("projector: tau out of range");
}

// v[i] = bb(start_0 * step_0^i, ..., start_{n-1} * step_{n-1}^i) mod m
// for i = 0..count-1, one multiplication per coordinate per step.
inline std::vector<Int> eval_geometric(const Blackbox& bb, std::vector<Int> cur,
                                       const std::vector<Int>& step, const Int& m,
                                       size_t count) {
    std::vector<Int> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        out.push_back(bb.eval(cur, m));
        if (i + 1 < count)
            for (size_t j = 0; j < cur.size(); ++j) cur[j] = cur[j] * step[j] % m;
    }
    return out;
}

// Shared core of the sparse projections: `solver` was prepared on the
// nodes wt^{known_exps[j]} and `step` holds wt^{tau_j}, both mod the
// solver's modulus. Exactly solver.size() blackbox calls.
inline std::vector<Int> project_prepared(const Blackbox& bb,
                                         const TransposedVandermondeSolver& solver,
                                         const std::vector<Int>& step,
                                         const std::vector<Int>& alpha) {
    const Int& M = solver.modulus();
    std::vector<Int> cur(alpha.size());
    for (size_t j = 0; j < alpha.size(); ++j) cur[j] = floor_mod(alpha[j], M);
    std::vector<Int> values = eval_geometric(bb, std::move(cur), step, M, solver.size());
    return solver.solve(values);
}

}  // namespace detail

// Cyclic projection of the blackbox along tau, recovered from values on
// the full orbit: evaluates bb at (omega^{i tau_0}, ..., omega^{i tau_{n-1}})
// mod q for i = 0..r-1 (exactly r blackbox calls), then one inverse DFT of
// prime order r. Entries are residues in [0, q); zeros are dropped.
inline CyclicPoly project_dense(const Blackbox& bb, const std::vector<u64>& tau, u64 r,
                                const Int& q, const Int& omega) {
    detail::check_tau(tau, bb.nvars(), r);
    const size_t n = bb.nvars();
    std::vector<Int> step(n), cur(n, 1 % q);
    for (size_t j = 0; j < n; ++j)
        step[j] = mod_pow(omega, int_from_u64(tau[j]), q);
    std::vector<Int> values =
        detail::eval_geometric(bb, std::move(cur), step, q, static_cast<size_t>(r));
    std::vector<Int> coeff = inverse_dft_prime_order(values, q, omega);
    CyclicPoly out;
    out.r = r;
    for (u64 k = 0; k < r; ++k)
        if (coeff[k] != 0) out.entries[k] = coeff[k];
    return out;
}

// Coefficient transport for a known projected support: with T' = |known_exps|
// evaluates v_i = bb(alpha_0 wt^{i tau_0}, ..., alpha_{n-1} wt^{i tau_{n-1}})
// mod M for i = 0..T'-1 (exactly T' blackbox calls), where wt is an order-r
// root mod M, then solves the transposed Vandermonde system with nodes
// wt^{known_exps[j]}. Throws vandermonde_error when the exponents are not
// separated mod r (reported, not absorbed: it falsifies the support).
inline std::vector<Int> project_sparse(const Blackbox& bb, const std::vector<u64>& known_exps,
                                       const std::vector<u64>& tau, u64 r, const Int& M,
                                       const Int& omega_lifted,
                                       const std::vector<Int>& alpha) {
    detail::check_tau(tau, bb.nvars(), r);
    const size_t n = bb.nvars();
    const size_t tp = known_exps.size();
    if (alpha.size() != n) throw std::invalid_argument("projector: alpha arity mismatch");
    for (u64 e : known_exps)
        if (e >= r) throw std::invalid_argument("projector: exponent outside Z_r");
    if (tp == 0) return {};

    std::vector<Int> nodes(tp);
    for (size_t j = 0; j < tp; ++j)
        nodes[j] = mod_pow(omega_lifted, int_from_u64(known_exps[j]), M);
    TransposedVandermondeSolver solver(nodes, M);

    std::vector<Int> step(n);
    for (size_t j = 0; j < n; ++j)
        step[j] = mod_pow(omega_lifted, int_from_u64(tau[j]), M);
    return detail::project_prepared(bb, solver, step, alpha);
}

// Per-level code words for every projected term, extracted from coefficient
// ratios. psi[u][j] is the level-(u+1) word of known_exps[j].
struct FaithfulCodeTable {
    std::vector<std::vector<Code>> psi;
};

// Runs the whole code-extraction tour against one blackbox. For each level
// u (modulus B^{2 nu_u}, B = q^mu) it lifts omega to an order-r root at
// that precision, transports coefficients once with all scales 1 and once
// per support k with alpha_i = 1 + p_i B^{nu_u} on I_k, then reads the
// code entry out of the ratio:
//
//   c_k / c = 1 + phi B^{nu_u}  (mod B^{2 nu_u})   for a faithful term,
//
// so psi = centered((ratio - 1) / B^{nu_u}). Slots where the ratio does
// not have this shape (base coefficient divisible by q, or the difference
// not divisible by B^{nu_u}) are recorded as 0; the decoder treats zeros
// as garbage. Costs exactly sum_u (lambda_u + 1) * T' blackbox calls;
// T' = 0 short-circuits to an empty table with no calls at all.
inline FaithfulCodeTable extract_code_table(const Blackbox& bb,
                                            const std::vector<u64>& known_exps,
                                            const std::vector<u64>& tau, u64 r,
                                            const LevelSchedule& schedule,
                                            const PrimeTriple& triple, u64 mu) {
    const size_t tp = known_exps.size();
    const size_t n = bb.nvars();
    detail::check_tau(tau, n, r);
    for (u64 e : known_exps)
        if (e >= r) throw std::invalid_argument("projector: exponent outside Z_r");
    const Int B = ipow(triple.q, mu);
    FaithfulCodeTable table;
    table.psi.assign(schedule.depth(), std::vector<Code>(tp));
    if (tp == 0) {
        for (size_t u = 0; u < schedule.depth(); ++u)
            for (auto& w : table.psi[u]) w.assign(schedule.levels[u].lambda, Int(0));
        return table;
    }

    std::map<u64, Int> lifted;  // q-adic precision -> order-r root
    for (size_t u = 0; u < schedule.depth(); ++u) {
        const CodeParams& p = schedule.levels[u];
        if (p.B != B) throw std::invalid_argument("extract_code_table: schedule base != q^mu");
        if (p.n != n) throw std::invalid_argument("extract_code_table: schedule arity mismatch");
        const Int B_nu = p.B_nu;
        const Int M = B_nu * B_nu;
        const u64 prec = 2 * mu * static_cast<u64>(p.nu);
        auto it = lifted.find(prec);
        if (it == lifted.end())
            it = lifted.emplace(prec, hensel_lift_root(triple.omega, triple.r, triple.q, prec))
                     .first;
        const Int& wt = it->second;

        std::vector<Int> nodes(tp), step(n);
        for (size_t j = 0; j < tp; ++j)
            nodes[j] = mod_pow(wt, int_from_u64(known_exps[j]), M);
        for (size_t j = 0; j < n; ++j) step[j] = mod_pow(wt, int_from_u64(tau[j]), M);
        TransposedVandermondeSolver solver(std::move(nodes), M);

        std::vector<Int> ones(n, Int(1));
        std::vector<Int> base = detail::project_prepared(bb, solver, step, ones);
        std::vector<Int> base_inv(tp, Int(0));
        std::vector<bool> usable(tp, false);
        for (size_t j = 0; j < tp; ++j) {
            if (base[j] % triple.q == 0) continue;  // not invertible mod q^*
            base_inv[j] = inv_mod(base[j], M);
            usable[j] = true;
        }
        for (size_t j = 0; j < tp; ++j) table.psi[u][j].assign(p.lambda, Int(0));

        for (size_t k = 0; k < p.lambda; ++k) {
            std::vector<Int> alpha(n, Int(1));
            for (u32 i : p.supports[k]) alpha[i] = 1 + p.primes[i] * B_nu;
            std::vector<Int> scaled = detail::project_prepared(bb, solver, step, alpha);
            for (size_t j = 0; j < tp; ++j) {
                if (!usable[j]) continue;
                Int ratio = scaled[j] * base_inv[j] % M;
                Int dm1 = ratio - 1;
                if (!divisible(dm1, B_nu)) continue;
                table.psi[u][j][k] = centered_rem(divexact(dm1, B_nu), B_nu);
            }
        }
    }
    return table;
}

}  // namespace spi
