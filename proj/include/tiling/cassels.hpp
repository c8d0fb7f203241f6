#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiling/arith.hpp"
#include "tiling/classgroup.hpp"
#include "tiling/descent.hpp"
#include "tiling/monsky.hpp"

namespace tiling::cassels {

using arith::SquarefreeInteger;
using descent::QuadricIntersection;
using gf2::BitVector;
using monsky::Theta;
using monsky::TwoCoverClass;

enum class Family { F19, F5, F11 };
const char *family_name(Family f);

// F19: 4c^2 = d a^2 + (n/d) b^2;  F5: p a^2 - q b^2 = c^2;  F11: p a^2 + q b^2 = c^2
enum class TernaryForm { FourC2, PMinusQ, PPlusQ };
const char *form_name(TernaryForm f);

struct NormalizationFlags {
    bool a_odd = false, b_odd = false, c_even = false;
    bool a_1mod4 = false, b_1mod4 = false;
    bool three_divides_a = false;
    bool c_1mod3 = false, c_negative = false;
};

struct TernarySolution {
    i64 a = 0, b = 0, c = 0;
    TernaryForm form = TernaryForm::FourC2;
    i64 k1 = 0, k2 = 0; // the two coefficients (d, n/d) or (p, q)
    NormalizationFlags flags;
};

NormalizationFlags flags_of(i64 a, i64 b, i64 c);
bool satisfies(const TernarySolution &s);
bool is_primitive(i64 a, i64 b, i64 c);

// The pq-family transformation; the result solves the same form (not yet primitive).
std::array<i128, 3> transform(TernaryForm f, i64 p, i64 q, i64 a, i64 b, i64 c);

struct TernaryOptions {
    std::mt19937_64 *rng = nullptr; // picks among the normalized solutions found, else the first
    int schedule_levels = 15;       // |a|,|b| <= 64 * 2^k for k < schedule_levels
};

TernarySolution solve_ternary(TernaryForm f, i64 k1, i64 k2, const TernaryOptions &opt = {});

using Coords = std::array<i64, 4>; // (t, u1, u2, u3)

// Gradient of H at Q, divided by its content.
Coords tangent_line(const descent::DiagonalQuadric &h, const Coords &q);

struct PairingSetup {
    QuadricIntersection curve;
    std::array<std::optional<Coords>, 3> Q; // global point on H_i (missing if its partner is a square)
    std::array<std::optional<Coords>, 3> L;
};

PairingSetup make_setup(const QuadricIntersection &c, const std::array<std::optional<Coords>, 3> &q);

struct LocalTerm {
    i64 place = 0;
    std::array<F2, 3> symbols{};
    F2 total = 0;
    std::string point; // the local point used, as text
};

struct LocalSum {
    F2 value = 0;
    std::vector<LocalTerm> terms;
};

// The places that can contribute: inf, primes of 6n, of the line and point coefficients, and primes < 23.
std::vector<i64> pairing_places(const PairingSetup &s);

// sum over places of sum_i [L_i(P_v), b_i']_v with b3' = b1' b2'.
LocalSum raw_local_sum(const PairingSetup &s, const TwoCoverClass &partner, std::mt19937_64 &rng);

struct F19Result {
    SquarefreeInteger n;
    classgroup::SplittingDivisor split;
    TernarySolution ternary;
    TwoCoverClass lambda0, lambda1, pi0, pi1;
    BitVector y2, x2;
    F2 closed_form = 0;
    F2 solvability = 0;      // 1 iff M' v' = v_c^T has no solution
    F2 solvability_no_r6 = 0; // same with the r6^T r6 term dropped from v_c
    F2 raw = 0;
    F2 value = 0;
    F2 r8 = 0;
    LocalSum local;
    F2 torsion_pi0 = 0, torsion_pi1 = 0;
};

bool qualifies_F19(const SquarefreeInteger &n);
// All three routes, without the agreement check.
F19Result evaluate_F19(const SquarefreeInteger &n, std::mt19937_64 &rng, bool random_ternary = false);
// Same, throwing InternalDisagreement unless the routes agree.
F19Result pairing_F19(const SquarefreeInteger &n, std::mt19937_64 &rng, bool random_ternary = false);

struct PQResult {
    Family family = Family::F5;
    i64 p = 0, q = 0; // p = 1 mod 3, q = 2 mod 3
    F2 p_over_q = 0;
    TernarySolution ternary;
    i64 beta = 0;
    F2 a_over_q = 0;
    F2 closed_form = 0;
    F2 raw = 0;
    F2 value = 0;
    TwoCoverClass lambda, partner;
    LocalSum local;
};

// Splits m = pq into the (p, q) roles for the family, or nullopt if m is not of that shape.
std::optional<std::pair<i64, i64>> pq_roles(i64 m, Family f);
// The raw local sum is the value; the closed form [beta/q] is recorded next to it.
PQResult evaluate_pq(i64 p, i64 q, Family f, std::mt19937_64 &rng, bool random_ternary = false);
// Same, throwing InternalDisagreement unless closed form and local sum agree.
PQResult pairing_pq(i64 p, i64 q, Family f, std::mt19937_64 &rng, bool random_ternary = false);

enum class CertificateKind {
    ParityOnly,
    RankZero_S2eq2,
    RankZero_Cassels,
    CriterionMatch_Thm71,
    CriterionMatch_Thm72,
    Unknown
};
const char *kind_name(CertificateKind k);
bool is_non_congruence(CertificateKind k);

struct Certificate {
    i64 m = 0;
    Theta theta = Theta::Pi3;
    i64 curve_n = 0;
    CertificateKind kind = CertificateKind::Unknown;
    std::string tmpl;
    int s2 = 0;
    int r4 = 0;
    nlohmann::ordered_json evidence;
};

// Residue classes mod 24 where r4(-m) = 0 forces s2 = 2.
bool in_r4_corollary_class(i64 m, Theta th);

Certificate certify(i64 m, Theta th, u64 seed = 0);
nlohmann::ordered_json to_json(const Certificate &c);

} // namespace tiling::cassels
