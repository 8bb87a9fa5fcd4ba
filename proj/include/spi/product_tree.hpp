#pragma once

#include <vector>

#include "spi/ints.hpp"

namespace spi {

// Binary product tree over a list of integers. Node 1 is the root; node v
// has children 2v and 2v+1. Leaves in left-to-right order are the inputs.
// Splits are at mid = size/2 so a recursion that halves its list the same
// way walks the tree exactly.
class ProductTree {
  public:
    explicit ProductTree(const std::vector<Int>& leaves) : count_(leaves.size()) {
        if (leaves.empty()) throw std::invalid_argument("ProductTree: empty input");
        nodes_.assign(2 * next_pow2(count_), Int(0));
        build(1, 0, count_, leaves);
    }

    const Int& root() const { return nodes_[1]; }
    size_t leaf_count() const { return count_; }
    const Int& node(size_t v) const { return nodes_[v]; }

    // Product of leaves[lo, hi). Descends only as far as node boundaries need.
    Int range_product(size_t lo, size_t hi) const {
        if (lo >= hi) return Int(1);
        return range_product(1, 0, count_, lo, hi);
    }

    // x mod each leaf, via a remainder tree: one big division per node
    // instead of one per leaf.
    std::vector<Int> remainders(const Int& x) const {
        std::vector<Int> out(count_);
        descend(1, 0, count_, floor_mod(x, nodes_[1]), out);
        return out;
    }

  private:
    static size_t next_pow2(size_t n) {
        size_t p = 1;
        while (p < n) p <<= 1;
        return p;
    }

    void build(size_t v, size_t lo, size_t hi, const std::vector<Int>& leaves) {
        if (hi - lo == 1) {
            nodes_[v] = leaves[lo];
            return;
        }
        size_t mid = lo + (hi - lo) / 2;
        build(2 * v, lo, mid, leaves);
        build(2 * v + 1, mid, hi, leaves);
        nodes_[v] = nodes_[2 * v] * nodes_[2 * v + 1];
    }

    Int range_product(size_t v, size_t lo, size_t hi, size_t qlo, size_t qhi) const {
        if (qlo <= lo && hi <= qhi) return nodes_[v];
        size_t mid = lo + (hi - lo) / 2;
        Int r = 1;
        if (qlo < mid) r *= range_product(2 * v, lo, mid, qlo, std::min(qhi, mid));
        if (qhi > mid) r *= range_product(2 * v + 1, mid, hi, std::max(qlo, mid), qhi);
        return r;
    }

    void descend(size_t v, size_t lo, size_t hi, Int x, std::vector<Int>& out) const {
        if (hi - lo == 1) {
            out[lo] = std::move(x);
            return;
        }
        size_t mid = lo + (hi - lo) / 2;
        descend(2 * v, lo, mid, floor_mod(x, nodes_[2 * v]), out);
        descend(2 * v + 1, mid, hi, floor_mod(x, nodes_[2 * v + 1]), out);
    }

    size_t count_;
    std::vector<Int> nodes_;
};

// x mod each of ms, sharing work through a remainder tree.
inline std::vector<Int> multi_remainder(const Int& x, const std::vector<Int>& ms) {
    return ProductTree(ms).remainders(x);
}

}  // namespace spi
