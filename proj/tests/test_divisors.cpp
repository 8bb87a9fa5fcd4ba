#include <catch2/catch_amalgamated.hpp>

#include "spi/divisors.hpp"
#include "spi/primes.hpp"
#include "spi/rng.hpp"

using namespace spi;

TEST_CASE("divisor pairs on known values") {
    std::vector<Int> primes = {Int(23), Int(29)};
    std::vector<Int> values = {Int(667), Int(29)};  // 667 = 23 * 29
    DivisorPairs expect = {{0, 0}, {1, 0}, {1, 1}};
    CHECK(divisors_naive(primes, values) == expect);
    CHECK(divisors(primes, values) == expect);
    CHECK(divisors(primes, values, 1) == expect);  // force the tree path

    std::vector<Int> ones = {Int(1), Int(1), Int(1)};
    CHECK(divisors(primes, ones, 1).empty());
    CHECK(divisors_naive(primes, ones).empty());
}

TEST_CASE("divisors rejects nonpositive values") {
    std::vector<Int> primes = {Int(5)};
    CHECK_THROWS_AS(divisors(primes, {Int(0)}), std::invalid_argument);
    CHECK_THROWS_AS(divisors_naive(primes, {Int(0)}), std::invalid_argument);
    CHECK_THROWS_AS(divisors(primes, {Int(5), Int(0)}, 1), std::invalid_argument);
}

TEST_CASE("tree and naive agree on fuzzed instances") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        size_t n = 1 + rng.below(64), N = 1 + rng.below(64);
        auto primes = random_distinct_primes(n, Int(1000 + 100 * (trial % 7)), 0.001, rng);
        std::vector<Int> values;
        for (size_t k = 0; k < N; ++k) {
            // bias toward values with planted prime factors so matches exist
            Int v = 1 + rng.bits(1 + rng.below(256));
            for (size_t j = 0; j < 3; ++j)
                if (rng.coin()) v *= primes[rng.below(n)];
            values.push_back(v);
        }
        auto fast = divisors(primes, values, 1);
        auto slow = divisors_naive(primes, values);
        REQUIRE(fast == slow);
        // default threshold routes small instances through the naive path
        REQUIRE(divisors(primes, values) == slow);
    }
}

TEST_CASE("surviving primes always divide into the value subproduct") {
    Rng rng(405);
    for (int trial = 0; trial < 40; ++trial) {
        size_t n = 2 + rng.below(32), N = 2 + rng.below(32);
        auto primes = random_distinct_primes(n, Int(500), 0.001, rng);
        std::vector<Int> values;
        for (size_t k = 0; k < N; ++k) {
            Int v = 1 + rng.bits(1 + rng.below(64));
            if (rng.coin()) v *= primes[rng.below(n)];
            values.push_back(v);
        }
        size_t nodes_seen = 0;
        auto hook = [&](const std::vector<size_t>& prime_idx, size_t lo, size_t hi) {
            ++nodes_seen;
            Int pprod = 1, vprod = 1;
            for (size_t i : prime_idx) pprod *= primes[i];
            for (size_t k = lo; k < hi; ++k) vprod *= values[k];
            REQUIRE(pprod <= vprod);
        };
        divisors(primes, values, 1, hook);
        REQUIRE(nodes_seen > 0);
    }
}
