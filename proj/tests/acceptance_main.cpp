// End-to-end acceptance harness. Each criterion prints exactly one
// "criterion N: PASS/FAIL ..." line; the process exits 0 only if every
// requested criterion passed.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "spi/blackbox.hpp"
#include "spi/dft.hpp"
#include "spi/divisors.hpp"
#include "spi/exponent_code.hpp"
#include "spi/hensel.hpp"
#include "spi/heuristics.hpp"
#include "spi/interpolator.hpp"
#include "spi/primes.hpp"
#include "spi/rng.hpp"
#include "spi/slp.hpp"
#include "spi/sparse_poly.hpp"
#include "spi/vandermonde.hpp"

namespace {

using namespace spi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Random target in the advertised envelope: signed coefficients up to
// 2^63, entries up to 2^20, at most min(n, 6) nonzero entries per vector.
SparsePoly random_target(size_t n, size_t T, Rng& rng) {
    std::set<std::vector<Int>> seen;
    std::vector<Term> terms;
    size_t max_active = std::min<size_t>(n, 6);
    while (terms.size() < T) {
        std::vector<Int> e(n, Int(0));
        size_t active = rng.below(max_active + 1);
        for (size_t d = 0; d < active; ++d)
            e[rng.below(n)] = int_from_u64(rng.below((u64{1} << 20) + 1));
        if (!seen.insert(e).second) continue;
        Int c = rng.bits(63);
        if (c == 0) c = 1;
        if (rng.below(2)) c = -c;
        terms.push_back({std::move(e), c});
    }
    return SparsePoly(n, std::move(terms));
}

bool criterion_round_trip(std::string& detail) {
    const std::vector<std::pair<size_t, size_t>> shapes = {{2, 4}, {8, 32}, {32, 256}};
    char buf[160];
    std::string rates;
    double worst = 0;
    bool ok = true;
    for (const auto& [n, T] : shapes) {
        size_t hits = 0;
        for (u64 seed = 0; seed < 50; ++seed) {
            Rng gen(10000 * n + seed);
            SparsePoly f = random_target(n, T, gen);
            Int S = int_from_u64(std::max<u64>({f.bit_size_total(), T, n}));
            SparsePolyBlackbox bb(f);
            Rng rng(seed);
            auto t0 = Clock::now();
            try {
                SparsePoly got = interpolate(bb, n, T, S, rng);
                if (got == f) ++hits;
            } catch (const std::exception&) {
                // counts as a miss
            }
            double dt = seconds_since(t0);
            worst = std::max(worst, dt);
            if (dt > 60.0) ok = false;
        }
        if (hits < 45) ok = false;  // hold the harness to the 90% target, not the 50% floor
        std::snprintf(buf, sizeof buf, "%s(%zu,%zu)=%zu/50", rates.empty() ? "" : " ", n, T,
                      hits);
        rates += buf;
    }
    std::snprintf(buf, sizeof buf, "%s, max %.1fs per instance", rates.c_str(), worst);
    detail = buf;
    return ok;
}

bool criterion_oracles(std::string& detail) {
    size_t bad = 0;

    {
        Rng rng(201);
        std::vector<Int> pool = bt_primelist(10);
        for (size_t iter = 0; iter < 200; ++iter) {
            std::vector<Int> primes(pool.begin(), pool.begin() + 1 + rng.below(10));
            std::vector<Int> values(1 + rng.below(10));
            for (auto& v : values) v = int_from_u64(1 + rng.below(1000000000));
            size_t threshold = iter % 2 ? 256 : 1;
            if (divisors(primes, values, threshold) != divisors_naive(primes, values)) ++bad;
        }
    }

    {
        Rng rng(202);
        PrimeTriple t = generate_prime_triple(Int(100), 0.01, rng);
        u64 r = u64_from_int(t.r);
        for (size_t iter = 0; iter < 100; ++iter) {
            size_t n = 1 + rng.below(4);
            SparsePoly f = [&] {
                std::vector<Term> terms;
                std::set<std::vector<Int>> seen;
                size_t T = 1 + rng.below(6);
                while (terms.size() < T) {
                    std::vector<Int> e(n);
                    for (auto& x : e) x = int_from_u64(rng.below(50));
                    if (!seen.insert(e).second) continue;
                    Int c = 1 + rng.bits(20);
                    if (rng.below(2)) c = -c;
                    terms.push_back({std::move(e), c});
                }
                return SparsePoly(n, std::move(terms));
            }();
            std::vector<u64> tau(n);
            for (auto& x : tau) x = 1 + rng.below(r - 1);
            SparsePolyBlackbox bb(f);
            if (project_dense(bb, tau, r, t.q, t.omega) != project_direct(f, tau, r, &t.q))
                ++bad;
        }
    }

    {
        Rng rng(203);
        PrimeTriple t = generate_prime_triple(Int(100), 0.01, rng);
        size_t r = static_cast<size_t>(u64_from_int(t.r));
        for (size_t iter = 0; iter < 100; ++iter) {
            std::vector<Int> a(r);
            for (auto& x : a) x = rng.below_int(t.q);
            auto y = dft_prime_order_int(a, t.q, t.omega);
            if (inverse_dft_prime_order(y, t.q, t.omega) != a) ++bad;
        }
    }

    {
        Rng rng(204);
        const Int q("4611686018427388039");  // prime just above 2^62
        for (size_t iter = 0; iter < 100; ++iter) {
            size_t dim = 1 + rng.below(12);
            std::vector<Int> nodes;
            std::set<std::string> used;
            while (nodes.size() < dim) {
                Int x = 1 + rng.below_int(q - 1);
                if (used.insert(x.get_str()).second) nodes.push_back(x);
            }
            std::vector<Int> coeffs(dim);
            for (auto& c : coeffs) c = rng.below_int(q);
            std::vector<Int> values(dim, Int(0));
            for (size_t i = 0; i < dim; ++i)
                for (size_t j = 0; j < dim; ++j)
                    values[i] =
                        (values[i] + coeffs[j] * mod_pow(nodes[j], int_from_u64(i), q)) % q;
            auto got = solve_transposed_vandermonde(nodes, values, q);
            std::vector<Int> back(dim, Int(0));
            for (size_t i = 0; i < dim; ++i)
                for (size_t j = 0; j < dim; ++j)
                    back[i] = (back[i] + got[j] * mod_pow(nodes[j], int_from_u64(i), q)) % q;
            if (back != values) ++bad;
        }
    }

    {
        Rng rng(205);
        std::vector<Int> pool = bt_primelist(10);
        for (size_t iter = 0; iter < 200; ++iter) {
            size_t n = 1 + rng.below(10);
            std::vector<Int> primes(pool.begin(), pool.begin() + n);
            std::vector<Int> e(n, Int(0));
            for (auto& x : e)
                if (rng.below(2)) x = int_from_u64(rng.below(25));
            auto rows = bt_decode_bulk({bt_encode(e, primes)}, primes);
            if (!rows[0] || *rows[0] != e) ++bad;
        }
    }

    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu mismatches over 700 cases", bad);
    detail = buf;
    return bad == 0;
}

bool criterion_code_round_trip(std::string& detail) {
    const size_t n = 12;
    const u64 Sigma = 48;
    const double gamma = 4 + 7;  // ceil(log2 12) + 7
    const Int P(400), B("4100625001");

    size_t post_violations = 0;
    double rate_sum = 0;
    for (u64 seed = 0; seed < 50; ++seed) {
        Rng rng(3000 + seed);
        LevelSchedule s = make_level_schedule(Sigma, n, gamma, P, B, rng);
        size_t recovered = 0;
        for (size_t batch = 0; batch < 200; ++batch) {
            std::vector<std::vector<Int>> rows(4, std::vector<Int>(n, Int(0)));
            for (auto& e : rows) {
                for (size_t d = 0; d < 3; ++d) {
                    Int v = 1 + rng.bits(8);
                    e[rng.below(n)] = rng.below(2) ? v : -v;
                }
                u64 sz = 0;
                for (const auto& x : e) sz += bit_size(x);
                if (sz > Sigma) ++post_violations;  // generator bound, not the decoder's
            }
            std::vector<std::vector<Code>> batches(s.depth());
            for (size_t u = 0; u < s.depth(); ++u) {
                batches[u].reserve(rows.size());
                for (const auto& e : rows) batches[u].push_back(encode(e, s.levels[u]));
            }
            auto observer = [&](size_t u, const std::vector<std::vector<Int>>& partial) {
                const CodeParams& p = s.levels[u];
                for (const auto& row : partial)
                    for (const auto& x : row)
                        if (2 * p.P * abs_int(x) >= p.B_nu) ++post_violations;
            };
            auto out = hierarchical_decode(batches, s, observer);
            for (const auto& row : out) {
                u64 sz = 0;
                for (const auto& x : row) sz += bit_size(x);
                if (sz > Sigma) ++post_violations;
            }
            if (out == rows) ++recovered;
        }
        rate_sum += static_cast<double>(recovered) / 200.0;
    }
    double avg = rate_sum / 50.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "avg batch recovery %.1f%%, %zu post violations",
                  100.0 * avg, post_violations);
    detail = buf;
    return avg >= 0.95 && post_violations == 0;
}

bool criterion_decoder_soundness(std::string& detail) {
    Rng rng(400);
    static const std::vector<Int> pool = {23, 29, 31, 37, 41, 43, 47, 53};
    size_t violations = 0, decoded = 0;
    for (size_t iter = 0; iter < 10000; ++iter) {
        SimpleCodeParams p;
        p.n = 1 + rng.below(6);
        p.V = 1 + rng.below(p.n);
        p.m = (p.n + p.V - 1) / p.V;
        p.lambda = 1 + rng.below(8);
        p.P = 22;
        for (size_t i = 0; i < p.n; ++i) p.primes.push_back(pool[i]);
        for (size_t k = 0; k < p.lambda; ++k) {
            std::vector<u32> I;
            for (size_t d = 0; d < 1 + rng.below(p.n); ++d)
                I.push_back(static_cast<u32>(rng.below(p.n)));
            std::sort(I.begin(), I.end());
            I.erase(std::unique(I.begin(), I.end()), I.end());
            p.supports.push_back(std::move(I));
        }
        std::vector<Int> psi(p.lambda);
        switch (rng.below(3)) {
            case 0: {
                std::vector<Int> e(p.n, Int(0));
                for (auto& x : e)
                    if (rng.below(2)) x = int_from_u64(rng.below(50));
                psi = encode(e, p);
                break;
            }
            case 1:
                for (auto& w : psi) w = int_from_u64(rng.below(5000));
                break;
            default: {
                std::vector<Int> e(p.n, Int(0));
                for (auto& x : e)
                    if (rng.below(2)) x = int_from_u64(rng.below(50));
                psi = encode(e, p);
                psi[rng.below(p.lambda)] += int_from_u64(1 + rng.below(100));
                break;
            }
        }
        auto got = mystery_decode(psi, p);
        if (got) {
            ++decoded;
            if (encode(*got, p) != psi) ++violations;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu violations, %zu/10000 decoded", violations, decoded);
    detail = buf;
    return violations == 0 && decoded > 0;
}

bool criterion_phase_transition(std::string& detail) {
    auto t0 = Clock::now();
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(1.0 + 0.05 * k);
    Rng rng(42);
    auto rows = phase_experiment(1000, grid, 200, rng);
    double crossing = -1;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        double a = rows[i].success_rate, b = rows[i + 1].success_rate;
        if (a < 0.5 && b >= 0.5) {
            crossing = rows[i].gamma + 0.05 * (0.5 - a) / (b - a);
            break;
        }
    }
    double dt = seconds_since(t0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "50%% crossing at gamma %.3f, %.0fs", crossing, dt);
    detail = buf;
    return crossing >= 1.07 && crossing <= 1.37 && dt <= 600.0;
}

bool criterion_prime_machinery(std::string& detail) {
    size_t bad = 0, lifts = 0;
    for (const Int& R : {Int(100), Int(10000), Int(1000000)}) {
        Int R6 = R * R * R;
        R6 *= R6;
        for (u64 seed = 0; seed < 100; ++seed) {
            Rng rng(seed);
            PrimeTriple t = generate_prime_triple(R, 0.01, rng);
            bool ok = is_probable_prime(t.r) && t.r > R && t.r < 2 * R &&
                      is_probable_prime(t.q) && t.q > 2 * R && t.q < R6 &&
                      t.q % t.r == 1 && t.omega != 1 && mod_pow(t.omega, t.r, t.q) == 1;
            if (!ok) {
                ++bad;
                continue;
            }
            if (seed % 10 == 0) {
                for (u64 v = 2; v <= 8; ++v) {
                    Int qv = ipow(t.q, v);
                    Int w = hensel_lift_root(t.omega, t.r, t.q, v);
                    ++lifts;
                    if (mod_pow(w, t.r, qv) != 1 || w % t.q != t.omega) ++bad;
                }
            }
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu failures over 300 triples, %zu lifts", bad, lifts);
    detail = buf;
    return bad == 0;
}

bool criterion_provable_arithmetic(std::string& detail) {
    Rng rng(7);
    RunParams par = derive_params(256, Int(1) << 16, 2, ParamMode::provable, rng);
    size_t bad = 0;
    if (par.beta != 64 * 17 * 17) ++bad;          // sigma(2^16) = 17
    if (par.Sigma != Int(4734976)) ++bad;         // floor(beta S / T)
    Int S = Int(1) << 16;
    Int bound = (Int(1) << 52) * 16 * S * S * S * S * S * S;  // 2^52 n^4 S^6
    if (!(bound <= par.B && par.B < bound * par.triple.q)) ++bad;
    if (!(4 * par.P * par.P < par.B)) ++bad;      // squared pair bound below B
    if (par.B != ipow(par.triple.q, par.mu)) ++bad;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu mismatches", bad);
    detail = buf;
    return bad == 0;
}

bool criterion_eval_accounting(std::string& detail) {
    Rng rng(8);
    RunParams par = derive_params(4, Int(64), 2, ParamMode::practical, rng);
    u64 r = u64_from_int(par.triple.r);

    std::vector<Term> fterms = {{{Int(2), Int(1)}, Int(3)}, {{Int(0), Int(5)}, Int(-7)}};
    SparsePoly f(2, std::move(fterms));
    SparsePolyBlackbox bb(f);
    std::vector<u64> tau = {1, 2};

    u64 before = bb.stats().snapshot().eval_count;
    project_dense(bb, tau, r, par.triple.q, par.triple.omega);
    u64 dense_calls = bb.stats().snapshot().eval_count - before;

    Int M = ipow(par.triple.q, par.mu);
    Int wlift = hensel_lift_root(par.triple.omega, par.triple.r, par.triple.q, par.mu);
    std::vector<Int> alpha(2, Int(1));

    before = bb.stats().snapshot().eval_count;
    project_sparse(bb, {0, 1, 2}, tau, r, M, wlift, alpha);
    u64 sparse_calls = bb.stats().snapshot().eval_count - before;

    before = bb.stats().snapshot().eval_count;
    project_sparse(bb, {}, tau, r, M, wlift, alpha);
    u64 empty_calls = bb.stats().snapshot().eval_count - before;

    char buf[96];
    std::snprintf(buf, sizeof buf, "dense %llu/%llu, sparse %llu/3, empty %llu/0",
                  static_cast<unsigned long long>(dense_calls),
                  static_cast<unsigned long long>(r),
                  static_cast<unsigned long long>(sparse_calls),
                  static_cast<unsigned long long>(empty_calls));
    detail = buf;
    return dense_calls == r && sparse_calls == 3 && empty_calls == 0;
}

bool run_criterion(int which, std::string& detail) {
    switch (which) {
        case 1: return criterion_round_trip(detail);
        case 2: return criterion_oracles(detail);
        case 3: return criterion_code_round_trip(detail);
        case 4: return criterion_decoder_soundness(detail);
        case 5: return criterion_phase_transition(detail);
        case 6: return criterion_prime_machinery(detail);
        case 7: return criterion_provable_arithmetic(detail);
        case 8: return criterion_eval_accounting(detail);
        default: detail = "unknown criterion"; return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            wanted.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
            return 2;
        }
    }
    if (wanted.empty())
        for (int c = 1; c <= 8; ++c) wanted.push_back(c);

    bool all_ok = true;
    for (int c : wanted) {
        std::string detail;
        bool ok = false;
        try {
            ok = run_criterion(c, detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d: %s (%s)\n", c, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
