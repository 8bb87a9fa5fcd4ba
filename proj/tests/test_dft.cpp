#include <catch2/catch_amalgamated.hpp>

#include <utility>
#include <vector>

#include "spi/dft.hpp"
#include "spi/primes.hpp"
#include "spi/rng.hpp"

using namespace spi;

namespace {

// Deterministic search for a prime q = k r + 1 above q_min together with
// an element of order exactly r. Independent of the generator machinery
// in primes.hpp on purpose.
std::pair<Int, Int> order_r_setup(u64 r, const Int& q_min) {
    Int k = (q_min - 2) / int_from_u64(r) + 1;
    for (;; ++k) {
        Int q = k * int_from_u64(r) + 1;
        if (!is_probable_prime(q)) continue;
        for (Int a = 2; a < q; ++a) {
            Int w = mod_pow(a, k, q);
            if (w == 1) continue;
            REQUIRE(mod_pow(w, int_from_u64(r), q) == 1);
            return {q, w};
        }
    }
}

std::vector<u64> naive_convolution_mod(const std::vector<u64>& x, const std::vector<u64>& y,
                                       u64 m) {
    if (x.empty() || y.empty()) return {};
    std::vector<Int> acc(x.size() + y.size() - 1, Int(0));
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j) acc[i + j] += int_from_u64(x[i]) * int_from_u64(y[j]);
    std::vector<u64> out(acc.size());
    for (size_t i = 0; i < acc.size(); ++i)
        out[i] = u64_from_int(acc[i] % int_from_u64(m));
    return out;
}

}  // namespace

TEST_CASE("transform primes are prime with high two-adic valuation and working generator") {
    for (const auto& np : ntt::kPrimes) {
        Int p = int_from_u64(np.p);
        REQUIRE(is_probable_prime(p));
        REQUIRE((np.p - 1) % (u64{1} << ntt::kMaxLogLen) == 0);
        // g^{(p-1)/2} = -1 makes g^{(p-1)/2^j} an exact order-2^j element
        REQUIRE(powmod_u64(np.g, (np.p - 1) / 2, np.p) == np.p - 1);
    }
    Int prod = 1;
    for (const auto& np : ntt::kPrimes) prod *= int_from_u64(np.p);
    REQUIRE(bit_size(prod) >= 185);
}

TEST_CASE("convolution matches schoolbook with exact integer accumulation") {
    Rng rng(0xd1f7c01dULL);
    for (int iter = 0; iter < 60; ++iter) {
        size_t nx = 1 + rng.below(40);
        size_t ny = 1 + rng.below(40);
        u64 m = rng.range(2, u64{1} << 62);
        std::vector<u64> x(nx), y(ny);
        for (auto& v : x) v = rng.below(u64{1} << 62);
        for (auto& v : y) v = rng.below(u64{1} << 62);
        REQUIRE(ntt::convolve_mod(x, y, m) == naive_convolution_mod(x, y, m));
    }
}

TEST_CASE("convolution stays exact at maximal operand magnitude") {
    const u64 big = (u64{1} << 62) - 1;
    std::vector<u64> x(64, big), y(64, big);
    u64 m = 0xffffffffffffffc5ULL;  // largest 64-bit prime
    REQUIRE(ntt::convolve_mod(x, y, m) == naive_convolution_mod(x, y, m));
}

TEST_CASE("chirp transform agrees with the quadratic one across the threshold") {
    Rng rng(0xb1e57e1ULL);
    for (u64 r : {131ULL, 257ULL, 521ULL}) {
        auto [q, w] = order_r_setup(r, Int(1) << 40);
        u64 q64 = u64_from_int(q);
        u64 w64 = u64_from_int(w);
        std::vector<u64> x(r);
        for (auto& v : x) v = rng.below(q64);
        auto naive = dft_prime_order_u64(x, q64, w64, /*naive_threshold=*/u64{1} << 20);
        auto chirp = dft_prime_order_u64(x, q64, w64, /*naive_threshold=*/2);
        REQUIRE(naive == chirp);

        // triangle check against the arbitrary-precision path
        std::vector<Int> xi(r);
        for (size_t i = 0; i < r; ++i) xi[i] = int_from_u64(x[i]);
        auto wide = dft_prime_order_int(xi, q, w);
        for (size_t i = 0; i < r; ++i) REQUIRE(u64_from_int(wide[i]) == naive[i]);
    }
}

TEST_CASE("inverse transform recovers coefficients from power-sum values") {
    Rng rng(0x1df7ULL);
    for (u64 r : {31ULL, 131ULL, 257ULL}) {
        auto [q, w] = order_r_setup(r, Int(1) << 45);
        std::vector<Int> coeff(r, Int(0));
        size_t nonzero = 1 + rng.below(8);
        for (size_t t = 0; t < nonzero; ++t)
            coeff[rng.below(r)] = int_from_u64(rng.below(u64_from_int(q)));
        // forward values by direct power sums, independently of any FFT
        std::vector<Int> values(r);
        for (u64 i = 0; i < r; ++i) {
            Int point = mod_pow(w, int_from_u64(i), q);
            Int acc = 0, cur = 1;
            for (u64 k = 0; k < r; ++k) {
                acc = (acc + coeff[k] * cur) % q;
                cur = cur * point % q;
            }
            values[i] = acc;
        }
        REQUIRE(inverse_dft_prime_order(values, q, w) == coeff);
    }
}

TEST_CASE("inverse transform works beyond word-size moduli") {
    Rng rng(0x91deULL);
    const u64 r = 31;
    auto [q, w] = order_r_setup(r, (Int(1) << 66) + 5);
    REQUIRE(bit_size(q) > 64);
    std::vector<Int> coeff(r, Int(0));
    coeff[3] = 7;
    coeff[17] = rng.bits(60);
    coeff[30] = q - 1;
    std::vector<Int> values(r);
    for (u64 i = 0; i < r; ++i) {
        Int point = mod_pow(w, int_from_u64(i), q);
        Int acc = 0, cur = 1;
        for (u64 k = 0; k < r; ++k) {
            acc = (acc + coeff[k] * cur) % q;
            cur = cur * point % q;
        }
        values[i] = acc;
    }
    REQUIRE(inverse_dft_prime_order(values, q, w) == coeff);
}
