#pragma once

#include <stdexcept>

#include "spi/ints.hpp"
#include "spi/modular.hpp"

namespace spi {

// Lift a root of X^r - 1 from mod q to mod q^v by Newton iteration,
// doubling the precision each step. Requires gcd(r, q) = 1 (true for
// distinct primes r, q) so the derivative r * x^{r-1} stays invertible.
// The result is the unique root congruent to omega mod q.
inline Int hensel_lift_root(const Int& omega, const Int& r, const Int& q, u64 v) {
    if (v == 0) throw std::invalid_argument("hensel_lift_root: v must be positive");
    Int x = floor_mod(omega, q);
    if (mod_pow(x, r, q) != 1 % q)
        throw std::invalid_argument("hensel_lift_root: omega^r != 1 mod q");
    u64 prec = 1;
    while (prec < v) {
        prec = std::min(prec * 2, v);
        Int m = ipow(q, prec);
        Int xr1 = mod_pow(x, r - 1, m);
        Int deriv = r * xr1 % m;
        Int f = (xr1 * x - 1) % m;
        x = floor_mod(x - f * inv_mod(deriv, m), m);
    }
    return x;
}

}  // namespace spi
