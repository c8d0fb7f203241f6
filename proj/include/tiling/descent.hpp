#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tiling/arith.hpp"
#include "tiling/monsky.hpp"

namespace tiling::descent {

using arith::SquarefreeInteger;
using monsky::TwoCoverClass;

// Coefficients of a diagonal quadratic form in (t, u1, u2, u3).
using DiagonalQuadric = std::array<i64, 4>;

enum Var { T = 0, U1 = 1, U2 = 2, U3 = 3 };

struct QuadricIntersection {
    SquarefreeInteger n;
    TwoCoverClass lambda;
    i64 e1 = 0, e2 = 0;
    // H[0]: b2 u2^2 - b1 b2 u3^2 = (e2 - e1) t^2
    // H[1]: b1 u1^2 - b1 b2 u3^2 = e2 t^2
    // H[2]: b1 u1^2 - b2 u2^2    = e1 t^2
    // stored as forms equal to zero, divided by their content
    std::array<DiagonalQuadric, 3> H{};
};

QuadricIntersection curve_for(const SquarefreeInteger &n, const TwoCoverClass &lambda);
i128 evaluate(const DiagonalQuadric &q, const std::array<i128, 4> &x);

// {inf, 2, 3} and the odd primes of n; kInfinity (0) stands for the real place.
std::vector<i64> place_set(const SquarefreeInteger &n);

// Decides C(Q_v) != empty. Throws Undecided if the depth guard is reached.
bool locally_solvable(const QuadricIntersection &c, i64 place);

// Direct search for Hensel-liftable points of P^3(Z/p^(2m+1)); the
// reference procedure that locally_solvable is cross-checked against.
bool hensel_point_search(const QuadricIntersection &c, i64 p);
int hensel_level_bound(const SquarefreeInteger &n, i64 p);

// A point of C over Q_v. For finite places the coordinates are known modulo
// p^precision; for the real place they are floating point.
struct LocalPoint {
    i64 place = 0;
    int precision = 0;
    u64 modulus = 0;
    std::array<u64, 4> coords{};
    std::array<long double, 4> real{};
};

// Random point of C(Q_v), or nullopt when C(Q_v) is empty.
std::optional<LocalPoint> find_local_point(const QuadricIntersection &c, i64 place, std::mt19937_64 &rng);
// q(x) reduced modulo the point's modulus.
u64 evaluate_mod(const DiagonalQuadric &q, const LocalPoint &pt);
bool on_curve(const QuadricIntersection &c, const LocalPoint &pt);

struct OracleMismatch {
    TwoCoverClass lambda;
    i64 place;
    std::string detail;
};

struct OracleResult {
    std::vector<TwoCoverClass> classes; // everywhere locally solvable classes
    int dimension = 0;
    bool closed = true;
    bool contains_torsion = true;
};

OracleResult selmer_group_oracle(const SquarefreeInteger &n);

} // namespace tiling::descent
