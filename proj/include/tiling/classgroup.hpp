#pragma once

#include <optional>
#include <vector>

#include "tiling/arith.hpp"
#include "tiling/gf2.hpp"

namespace tiling::classgroup {

using arith::SquarefreeInteger;
using gf2::BitMatrix;
using gf2::BitVector;

struct QuadraticFieldData {
    i64 d = 0; // squarefree, != 1
    i64 D = 0; // fundamental discriminant
    std::vector<i64> ramified_primes;

    int t_ram() const { return static_cast<int>(ramified_primes.size()); }
};

QuadraticFieldData quadratic_field(i64 d);
// Same, with the odd prime factors of |d| already known (ascending).
QuadraticFieldData quadratic_field(i64 d, const std::vector<i64> &odd_primes_of_d);

// Entry (i, j) is [p_j, d]_{p_i} over the ramified primes.
BitMatrix redei_matrix(const QuadraticFieldData &k);
BitMatrix redei_matrix(i64 d);

int r2(const QuadraticFieldData &k);
int r4(const QuadraticFieldData &k);
int r4(i64 d);

struct SplittingDivisor {
    i64 d_star = 1;
    BitVector x1; // support of d_star among the odd primes of n
};

// For eta = 1 and r4(-n) = 1: the nontrivial class of ker A modulo the all-ones vector.
SplittingDivisor splitting_divisor(const SquarefreeInteger &n);

// 1 iff A u = r_c^T is solvable.
F2 r8_decision(const SquarefreeInteger &n, i64 c);

struct TernaryTriple {
    i64 a = 0, b = 0, c = 0;
};

struct TwoRankProfile {
    int r2 = 0;
    int r4 = 0;
    std::optional<F2> r8_known;
    std::optional<i64> splitting_divisor;
    std::optional<BitVector> x1;
    std::optional<TernaryTriple> ternary;
};

// Reduced positive definite binary quadratic form a x^2 + b xy + c y^2.
struct Form {
    i64 a = 1, b = 1, c = 1;
    bool operator==(const Form &) const = default;
    auto operator<=>(const Form &) const = default;
};

Form reduce(Form f);
Form compose(const Form &f, const Form &g, i64 D);
Form identity_form(i64 D);
std::vector<Form> reduced_forms(i64 D);

struct FormsClassGroup {
    i64 D = 0;
    u64 class_number = 0;
    std::vector<u64> invariant_factors; // d1 | d2 | ... , each > 1
    int r2 = 0, r4 = 0, r8 = 0;
};

// Group of primitive reduced forms of the negative discriminant D.
FormsClassGroup forms_class_group(i64 D);

bool is_fundamental_discriminant(i64 D);

// Fundamental discriminants D with |D| <= bound of the requested sign, ascending in |D|,
// each with its squarefree kernel d and the odd primes of d.
struct Discriminant {
    i64 D;
    i64 d;
    std::vector<i64> odd_primes;
};
std::vector<Discriminant> fundamental_discriminants(i64 bound, bool negative);

} // namespace tiling::classgroup
