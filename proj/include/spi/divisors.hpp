#pragma once

#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "spi/ints.hpp"
#include "spi/product_tree.hpp"

namespace spi {

// (prime index, value index) pairs: (i, k) present exactly when
// primes[i] divides values[k].
using DivisorPairs = std::set<std::pair<size_t, size_t>>;

// Reference implementation and small-size fast path: test every pair.
inline DivisorPairs divisors_naive(const std::vector<Int>& primes,
                                   const std::vector<Int>& values) {
    DivisorPairs out;
    for (size_t k = 0; k < values.size(); ++k) {
        if (values[k] < 1) throw std::invalid_argument("divisors: value < 1");
        for (size_t i = 0; i < primes.size(); ++i)
            if (divisible(values[k], primes[i])) out.emplace(i, k);
    }
    return out;
}

namespace detail {

// Called at every recursion node entered from a parent split, with the
// node's surviving prime indices and its value range. Tests use it to
// check the subproduct bound.
using DivisorsNodeHook =
    std::function<void(const std::vector<size_t>& prime_idx, size_t value_lo, size_t value_hi)>;

inline void divisors_recurse(const std::vector<Int>& primes,
                             const std::vector<Int>& values, const ProductTree& vtree,
                             std::vector<size_t> prime_idx, size_t lo, size_t hi,
                             DivisorPairs& out, const DivisorsNodeHook& hook,
                             bool is_root) {
    if (prime_idx.empty() || lo >= hi) return;
    if (!is_root && hook) hook(prime_idx, lo, hi);
    if (hi - lo == 1) {
        for (size_t i : prime_idx)
            if (divisible(values[lo], primes[i])) out.emplace(i, lo);
        return;
    }
    size_t mid = lo + (hi - lo) / 2;  // matches the product tree's split
    std::vector<Int> psub;
    psub.reserve(prime_idx.size());
    for (size_t i : prime_idx) psub.push_back(primes[i]);
    for (int half = 0; half < 2; ++half) {
        size_t a = half == 0 ? lo : mid;
        size_t b = half == 0 ? mid : hi;
        Int prod = vtree.range_product(a, b);
        std::vector<Int> rem = multi_remainder(prod, psub);
        std::vector<size_t> survivors;
        for (size_t j = 0; j < prime_idx.size(); ++j)
            if (rem[j] == 0) survivors.push_back(prime_idx[j]);
        divisors_recurse(primes, values, vtree, std::move(survivors), a, b, out, hook,
                         false);
    }
}

}  // namespace detail

// All (i, k) with primes[i] | values[k], by halving the value list and
// discarding primes that do not divide the half's product. Amortizes the
// divisibility tests through product and remainder trees; falls back to
// the pairwise test below naive_threshold, where tree overhead loses.
inline DivisorPairs divisors(const std::vector<Int>& primes, const std::vector<Int>& values,
                             size_t naive_threshold = 256,
                             detail::DivisorsNodeHook hook = nullptr) {
    for (const auto& v : values)
        if (v < 1) throw std::invalid_argument("divisors: value < 1");
    if (primes.empty() || values.empty()) return {};
    if (std::min(primes.size(), values.size()) < naive_threshold && !hook)
        return divisors_naive(primes, values);
    ProductTree vtree(values);
    std::vector<size_t> all(primes.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    DivisorPairs out;
    detail::divisors_recurse(primes, values, vtree, std::move(all), 0, values.size(), out,
                             hook, true);
    return out;
}

}  // namespace spi
