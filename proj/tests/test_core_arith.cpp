#include <catch2/catch_amalgamated.hpp>

#include "spi/ints.hpp"
#include "spi/modular.hpp"
#include "spi/product_tree.hpp"
#include "spi/rng.hpp"

using namespace spi;

TEST_CASE("bit_size counts binary digits") {
    CHECK(bit_size(Int(0)) == 0);
    CHECK(bit_size(Int(1)) == 1);
    CHECK(bit_size(Int(2)) == 2);
    CHECK(bit_size(Int(3)) == 2);
    CHECK(bit_size(Int(4)) == 3);
    CHECK(bit_size(Int(255)) == 8);
    CHECK(bit_size(Int(256)) == 9);
    CHECK(bit_size(Int(1) << 16) == 17);
    CHECK(bit_size(Int(-5)) == 3);
    CHECK(bit_size_u64(0) == 0);
    CHECK(bit_size_u64(1) == 1);
    CHECK(bit_size_u64(~u64{0}) == 64);
}

TEST_CASE("floor_mod is always nonnegative") {
    CHECK(floor_mod(Int(7), Int(5)) == 2);
    CHECK(floor_mod(Int(-7), Int(5)) == 3);
    CHECK(floor_mod(Int(-10), Int(5)) == 0);
    CHECK(floor_mod(Int(0), Int(5)) == 0);
}

TEST_CASE("centered remainder lands in the balanced range") {
    // modulus 5: representatives -2..2
    CHECK(centered_rem(Int(0), Int(5)) == 0);
    CHECK(centered_rem(Int(1), Int(5)) == 1);
    CHECK(centered_rem(Int(2), Int(5)) == 2);
    CHECK(centered_rem(Int(3), Int(5)) == -2);
    CHECK(centered_rem(Int(4), Int(5)) == -1);
    CHECK(centered_rem(Int(7), Int(5)) == 2);
    CHECK(centered_rem(Int(-1), Int(5)) == -1);
    // modulus 4: representatives -1..2
    CHECK(centered_rem(Int(2), Int(4)) == 2);
    CHECK(centered_rem(Int(3), Int(4)) == -1);

    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        Int k = Int(2) + rng.below_int(Int(1) << 40);
        Int x = rng.bits(60) - (Int(1) << 59);
        Int c = centered_rem(x, k);
        Int lo = -((k - 1) / 2), hi = k - 1 - (k - 1) / 2;
        REQUIRE(c >= lo);
        REQUIRE(c <= hi);
        REQUIRE(floor_mod(c - x, k) == 0);
    }
}

TEST_CASE("u64 round trip and overflow detection") {
    CHECK(u64_from_int(int_from_u64(~u64{0})) == ~u64{0});
    CHECK(u64_from_int(Int(0)) == 0);
    CHECK_THROWS_AS(u64_from_int(Int(-1)), std::invalid_argument);
    CHECK_THROWS_AS(u64_from_int(Int(1) << 64), std::invalid_argument);
}

TEST_CASE("isqrt and ipow") {
    CHECK(isqrt(Int(0)) == 0);
    CHECK(isqrt(Int(15)) == 3);
    CHECK(isqrt(Int(16)) == 4);
    CHECK(isqrt(Int(17)) == 4);
    CHECK(ipow(Int(3), 15) == Int("14348907"));
    CHECK(ipow(Int(2), 0) == 1);
}

TEST_CASE("inv_mod and divexact") {
    CHECK(inv_mod(Int(3), Int(7)) == 5);
    CHECK(inv_mod(Int(10), Int(17)) * 10 % 17 == 1);
    CHECK_THROWS_AS(inv_mod(Int(6), Int(9)), std::invalid_argument);
    CHECK(divexact(Int(715), Int(13)) == 55);
    CHECK(divisible(Int(715), Int(13)));
    CHECK_FALSE(divisible(Int(716), Int(13)));
}

TEST_CASE("mod_pow matches small powers") {
    CHECK(mod_pow(Int(3), Int(6), Int(607)) == 122);
    CHECK(mod_pow(Int(2), Int(10), Int(1025)) == 1024);
    CHECK(mod_pow(Int(5), Int(0), Int(7)) == 1);
    CHECK(powmod_u64(3, 6, 607) == 122);
    CHECK(powmod_u64(2, 64, ~u64{0}) == 1);
}

TEST_CASE("word Montgomery agrees with plain modular arithmetic") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        u64 m = rng.next() | 1;
        if (m < 3) m = 3;
        Mont64 mont(m);
        for (int i = 0; i < 40; ++i) {
            u64 a = rng.below(m), b = rng.below(m);
            u64 am = mont.to_mont(a), bm = mont.to_mont(b);
            REQUIRE(mont.from_mont(mont.mul(am, bm)) == mulmod_u64(a, b, m));
            REQUIRE(mont.from_mont(mont.add(am, bm)) == addmod_u64(a, b, m));
            REQUIRE(mont.from_mont(mont.sub(am, bm)) == submod_u64(a, b, m));
            REQUIRE(mont.from_mont(am) == a);
        }
        u64 e = rng.next() % 1000;
        u64 a = rng.below(m);
        REQUIRE(mont.from_mont(mont.pow(mont.to_mont(a), e)) == powmod_u64(a, e, m));
    }
}

TEST_CASE("wide Montgomery agrees with mpz arithmetic") {
    Rng rng(43);
    for (u64 limbs : {1, 2, 3, 5, 20}) {
        for (int trial = 0; trial < 6; ++trial) {
            Int m = rng.bits(64 * limbs) | 1;
            if (m <= 1) m = 3;
            MontCtx ctx(m);
            REQUIRE(ctx.modulus() == m);
            for (int i = 0; i < 25; ++i) {
                Int a = rng.below_int(m), b = rng.below_int(m);
                auto am = ctx.to_mont(a), bm = ctx.to_mont(b);
                REQUIRE(ctx.from_mont(ctx.mul(am, bm)) == a * b % m);
                REQUIRE(ctx.from_mont(ctx.add(am, bm)) == (a + b) % m);
                REQUIRE(ctx.from_mont(ctx.sub(am, bm)) == floor_mod(a - b, m));
                REQUIRE(ctx.from_mont(am) == a);
            }
            Int a = rng.below_int(m), e = rng.bits(70);
            REQUIRE(ctx.from_mont(ctx.pow(ctx.to_mont(a), e)) == mod_pow(a, e, m));
            REQUIRE(ctx.from_mont(ctx.one()) == 1 % m);
        }
    }
}

TEST_CASE("wide Montgomery handles negative and oversized inputs") {
    MontCtx ctx(Int("340282366920938463463374607431768211507"));  // odd, 2 limbs
    Int m = ctx.modulus();
    CHECK(ctx.from_mont(ctx.to_mont(Int(-5))) == m - 5);
    CHECK(ctx.from_mont(ctx.to_mont(m + 7)) == 7);
}

TEST_CASE("rng streams are deterministic and in range") {
    Rng a(7), b(7), c(8);
    CHECK(a.next() == b.next());
    CHECK(a.next() == b.next());
    bool differs = false;
    for (int i = 0; i < 8; ++i) {
        u64 x = a.next(), y = c.next();
        b.next();
        if (x != y) differs = true;
    }
    CHECK(differs);

    Rng r(123);
    for (int i = 0; i < 2000; ++i) {
        u64 bound = 1 + r.next() % 1000;
        REQUIRE(r.below(bound) < bound);
    }
    for (int i = 0; i < 200; ++i) {
        Int v = r.bits(100);
        REQUIRE(v >= 0);
        REQUIRE(v < Int(1) << 100);
        Int bound = 1 + r.bits(90);
        Int w = r.below_int(bound);
        REQUIRE(w >= 0);
        REQUIRE(w < bound);
    }
    CHECK(r.range(5, 5) == 5);

    // Forked streams diverge from the parent and from each other.
    Rng p(9), p2(9);
    Rng f1 = p.fork(1);
    p2.next();
    p2.next();
    Rng f2 = p2.fork(2);
    CHECK(f1.next() != f2.next());
}

TEST_CASE("rng below covers small ranges") {
    Rng r(5);
    std::array<int, 5> hits{};
    for (int i = 0; i < 5000; ++i) ++hits[r.below(5)];
    for (int h : hits) CHECK(h > 800);
}

TEST_CASE("product tree computes root and remainders") {
    std::vector<Int> leaves = {Int(23), Int(29), Int(31)};
    ProductTree tree(leaves);
    CHECK(tree.root() == 23 * 29 * 31);
    auto rem = tree.remainders(Int(667));
    REQUIRE(rem.size() == 3);
    CHECK(rem[0] == 0);  // 667 = 23 * 29
    CHECK(rem[1] == 0);
    CHECK(rem[2] == 16);

    auto rem2 = multi_remainder(Int(667), leaves);
    CHECK(rem2 == rem);

    CHECK(tree.range_product(0, 2) == 23 * 29);
    CHECK(tree.range_product(1, 3) == 29 * 31);
    CHECK(tree.range_product(2, 2) == 1);
}

TEST_CASE("product tree matches direct computation on random input") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        size_t count = 1 + rng.below(40);
        std::vector<Int> leaves;
        for (size_t i = 0; i < count; ++i) leaves.push_back(1 + rng.bits(50));
        ProductTree tree(leaves);
        Int prod = 1;
        for (auto& l : leaves) prod *= l;
        REQUIRE(tree.root() == prod);
        Int x = rng.bits(300);
        auto rem = tree.remainders(x);
        for (size_t i = 0; i < count; ++i) REQUIRE(rem[i] == x % leaves[i]);
        size_t lo = rng.below(count), hi = lo + rng.below(count - lo + 1);
        Int expect = 1;
        for (size_t i = lo; i < hi; ++i) expect *= leaves[i];
        REQUIRE(tree.range_product(lo, hi) == expect);
    }
}
