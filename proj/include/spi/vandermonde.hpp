#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spi/ints.hpp"

namespace spi {

// Signals a transposed Vandermonde system whose nodes are not pairwise
// invertible differences mod the modulus. In the interpolation pipeline
// this means the term exponents were not actually distinct mod r, so the
// caller treats it as a failed round rather than a fatal error.
struct vandermonde_error : std::runtime_error {
    explicit vandermonde_error(const std::string& what) : std::runtime_error(what) {}
};

// Solves V^T c = v where V_{ij} = x_j^i, for pairwise distinct nodes x_j.
// Preparation builds the master polynomial A(X) = prod_j (X - x_j), the
// quotient rows Q_j = A / (X - x_j) by synthetic division, and the
// inverses of A'(x_j) = Q_j(x_j). A single solve is then one dot product
// per node: c_j = (sum_i Q_j[i] * v_i) / A'(x_j).
//
// Preparation costs O(T^2) modular multiplications and each solve costs
// O(T^2) more, so callers solving many right-hand sides against the same
// nodes should construct once and reuse.
class TransposedVandermondeSolver {
  public:
    TransposedVandermondeSolver(std::vector<Int> nodes, Int modulus)
        : nodes_(std::move(nodes)), m_(std::move(modulus)) {
        if (m_ < 2) throw std::invalid_argument("vandermonde: modulus must be >= 2");
        const size_t t = nodes_.size();
        for (auto& x : nodes_) x = floor_mod(x, m_);

        // master[] holds A(X) coefficients, degree t, monic
        std::vector<Int> master(t + 1, Int(0));
        master[0] = 1 % m_;
        size_t deg = 0;
        for (size_t j = 0; j < t; ++j) {
            // multiply by (X - x_j)
            ++deg;
            master[deg] = master[deg - 1];
            for (size_t i = deg - 1; i > 0; --i)
                master[i] = floor_mod(master[i - 1] - nodes_[j] * master[i], m_);
            master[0] = floor_mod(-nodes_[j] * master[0], m_);
        }

        qrows_.resize(t);
        dinv_.resize(t);
        for (size_t j = 0; j < t; ++j) {
            // synthetic division of A by (X - x_j); remainder is 0 by construction
            std::vector<Int>& qr = qrows_[j];
            qr.assign(t, Int(0));
            Int carry = master[t];
            for (size_t i = t; i-- > 0;) {
                qr[i] = carry;
                carry = floor_mod(master[i] + nodes_[j] * carry, m_);
            }
            // A'(x_j) = Q_j(x_j), Horner
            Int d = 0;
            for (size_t i = t; i-- > 0;) d = floor_mod(d * nodes_[j] + qr[i], m_);
            if (gcd_int(d, m_) != 1)
                throw vandermonde_error("vandermonde: nodes not separated mod modulus");
            dinv_[j] = inv_mod(d, m_);
        }
    }

    size_t size() const { return nodes_.size(); }
    const Int& modulus() const { return m_; }
    const std::vector<Int>& nodes() const { return nodes_; }

    // values[i] = sum_j c_j x_j^i, i = 0..t-1; returns the c_j mod modulus.
    std::vector<Int> solve(const std::vector<Int>& values) const {
        const size_t t = nodes_.size();
        if (values.size() != t)
            throw std::invalid_argument("vandermonde: value count mismatch");
        std::vector<Int> c(t, Int(0));
        for (size_t j = 0; j < t; ++j) {
            Int acc = 0;
            for (size_t i = 0; i < t; ++i) acc += qrows_[j][i] * values[i];
            c[j] = floor_mod(acc, m_) * dinv_[j] % m_;
        }
        return c;
    }

  private:
    std::vector<Int> nodes_;
    Int m_;
    std::vector<std::vector<Int>> qrows_;
    std::vector<Int> dinv_;
};

// One-shot convenience wrapper.
inline std::vector<Int> solve_transposed_vandermonde(const std::vector<Int>& nodes,
                                                     const std::vector<Int>& values,
                                                     const Int& modulus) {
    return TransposedVandermondeSolver(nodes, modulus).solve(values);
}

}  // namespace spi
