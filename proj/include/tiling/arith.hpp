#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiling/error.hpp"

namespace tiling {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Elements of GF(2) are stored as 0/1 bytes.
using F2 = std::uint8_t;

namespace arith {

// Place code for the real place; finite places are given by the prime itself.
inline constexpr i64 kInfinity = 0;

struct SquarefreeInteger {
    i64 value = 1;
    int sign = 1;
    bool has_two = false;
    bool has_three = false;
    std::vector<i64> odd_primes; // strictly increasing, each >= 5
    i64 eta = 1;
    i64 ntilde = 1;

    int t() const { return static_cast<int>(odd_primes.size()); }
};

SquarefreeInteger factor_squarefree(i64 n);

// Prime factorization of |n| with multiplicities, ascending.
std::vector<std::pair<u64, int>> factor(u64 n);
bool is_prime(u64 n);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
// Least nonnegative residue of a modulo m > 0.
u64 mod(i128 a, u64 m);
i128 gcd128(i128 a, i128 b);

// Multiplicative Legendre symbol (a/p) in {-1,0,1}, a any sign, p odd prime.
int legendre(i64 a, i64 p);
F2 legendre_additive(i64 a, i64 p);
// Sum of [d/p] over the given primes; the empty sum is 0.
F2 jacobi_additive(i64 d, const std::vector<i64> &primes);

// Square root of a modulo odd prime p, the one in [0, (p-1)/2].
i64 sqrt_mod(i64 a, i64 p);

// Square root of the unit u modulo p^k. For p = 2 the unit must be 1 mod 8 and
// the result is determined modulo 2^(k-1); it is returned reduced mod 2^k.
std::optional<u64> sqrt_unit_mod_pk(u64 u, u64 p, int k);

// p-adic valuation of a nonzero integer.
int valuation(i128 x, i64 p);

// Class of a nonzero element in Q_v^*/Q_v^*2.
//   real place: unit = 1 iff negative, v_odd unused
//   p odd: v_odd = v_p mod 2, unit = additive Legendre symbol of the unit part
//   p = 2: v_odd = v_2 mod 2, unit = unit part mod 8
struct SquareClass {
    int v_odd = 0;
    u64 unit = 0;
};

SquareClass square_class(i128 x, i64 place);
// Same, for a p-adic number known as (valuation, unit part mod p or mod 8).
SquareClass square_class_of(int v, u64 unit_residue, i64 place);
bool is_square_class(const SquareClass &c, i64 place);

F2 hilbert_classes(const SquareClass &a, const SquareClass &b, i64 place);
F2 hilbert_additive(i128 a, i128 b, i64 place);

// Squarefree part of a nonzero integer (sign kept).
i64 squarefree_part(i64 x);

std::string place_name(i64 place);

} // namespace arith
} // namespace tiling
