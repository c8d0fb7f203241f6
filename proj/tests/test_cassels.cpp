#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tiling/cassels.hpp"

using namespace tiling;
using namespace tiling::cassels;
using arith::factor_squarefree;

namespace {

std::optional<SquarefreeInteger> sqfree(i64 v)
{
    try {
        return factor_squarefree(v);
    } catch (const Error &) {
        return std::nullopt;
    }
}

std::vector<SquarefreeInteger> f19_instances(std::size_t want)
{
    std::vector<SquarefreeInteger> out;
    for (i64 m = 19; out.size() < want && m < 200000; m += 24) {
        auto n = sqfree(m);
        if (n && qualifies_F19(*n))
            out.push_back(*n);
    }
    return out;
}

std::vector<std::pair<i64, i64>> pq_instances(Family f, std::size_t want)
{
    std::vector<std::pair<i64, i64>> out;
    for (i64 m = 5; out.size() < want && m < 200000; ++m) {
        auto r = pq_roles(m, f);
        if (r && arith::legendre_additive(r->first, r->second) == 0)
            out.push_back(*r);
    }
    return out;
}

ErrorKind kind_of(auto &&fn)
{
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Overflow;
}

} // namespace

TEST_CASE("ternary solutions for p a^2 - q b^2 = c^2")
{
    // 5 a^2 - 73 b^2 = c^2 has no primitive solution: (5, -73) is nontrivial at 5
    CHECK(arith::hilbert_additive(5, -73, 5) == 1);
    bool any = false;
    for (i64 a = 1; a <= 200; ++a)
        for (i64 b = 1; b <= 200; ++b) {
            i64 N = 5 * a * a - 73 * b * b;
            if (N <= 0)
                continue;
            i64 c = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(N))));
            if (c * c == N && is_primitive(a, b, c))
                any = true;
        }
    CHECK_FALSE(any);
    CHECK(kind_of([] { solve_ternary(TernaryForm::PMinusQ, 5, 73, {nullptr, 3}); }) == ErrorKind::NotFound);

    for (auto [p, q] : pq_instances(Family::F5, 25)) {
        auto s = solve_ternary(TernaryForm::PMinusQ, p, q);
        CHECK(satisfies(s));
        CHECK(is_primitive(s.a, s.b, s.c));
        CHECK(s.flags.c_even);
        CHECK(s.flags.a_odd);
        CHECK(s.flags.b_odd);
        CHECK(s.flags.three_divides_a);
        CHECK(s.flags.a_1mod4);
        CHECK(s.flags.c_1mod3);
    }
}

TEST_CASE("ternary solutions for the other forms")
{
    for (auto [p, q] : pq_instances(Family::F11, 25)) {
        auto s = solve_ternary(TernaryForm::PPlusQ, p, q);
        CHECK(satisfies(s));
        CHECK(is_primitive(s.a, s.b, s.c));
        CHECK(s.flags.c_even);
        CHECK(s.flags.a_odd);
        CHECK(s.flags.b_odd);
        CHECK(s.flags.a_1mod4);
        CHECK(s.flags.c_negative);
        // 3 | a is impossible here: p a^2 + q b^2 = 2 b^2 mod 3 is not a square
        CHECK_FALSE(s.flags.three_divides_a);
    }
    for (auto &n : f19_instances(10)) {
        auto split = classgroup::splitting_divisor(n);
        auto s = solve_ternary(TernaryForm::FourC2, split.d_star, n.value / split.d_star);
        CHECK(satisfies(s));
        CHECK(s.flags.a_1mod4);
        CHECK(s.flags.b_1mod4);
    }
    CHECK(kind_of([] { solve_ternary(TernaryForm::PPlusQ, 3, 3, {nullptr, 3}); }) == ErrorKind::NotFound);
}

TEST_CASE("transformation preserves the forms")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        i64 p = static_cast<i64>(rng() % 2000) + 1, q = static_cast<i64>(rng() % 2000) + 1;
        i64 a = static_cast<i64>(rng() % 20001) - 10000, b = static_cast<i64>(rng() % 20001) - 10000,
            c = static_cast<i64>(rng() % 20001) - 10000;
        i128 P = p, Q = q;
        auto m = transform(TernaryForm::PMinusQ, p, q, a, b, c);
        i128 lhs = P * m[0] * m[0] - Q * m[1] * m[1] - m[2] * m[2];
        i128 base = P * a * a - Q * b * b - static_cast<i128>(c) * c;
        CHECK(lhs == (P - Q) * (P - Q) * base);
        auto pl = transform(TernaryForm::PPlusQ, p, q, a, b, c);
        lhs = P * pl[0] * pl[0] + Q * pl[1] * pl[1] - pl[2] * pl[2];
        base = P * a * a + Q * b * b - static_cast<i128>(c) * c;
        CHECK(lhs == (P + Q) * (P + Q) * base);
    }
}

TEST_CASE("pq_roles")
{
    CHECK(pq_roles(365, Family::F5) == std::make_pair(i64(73), i64(5)));
    CHECK(pq_roles(35, Family::F11) == std::make_pair(i64(7), i64(5)));
    CHECK_FALSE(pq_roles(35, Family::F5).has_value());
    CHECK_FALSE(pq_roles(5 * 7 * 11, Family::F11).has_value());
    CHECK_FALSE(pq_roles(29, Family::F5).has_value());
    for (i64 m = 1; m < 5000; ++m)
        for (Family f : {Family::F5, Family::F11})
            if (auto r = pq_roles(m, f)) {
                CHECK(r->first * r->second == m);
                CHECK(r->first % 3 == 1);
                CHECK(r->second % 3 == 2);
            }
}

TEST_CASE("certify examples")
{
    auto c7 = certify(7, Theta::Pi3);
    CHECK(c7.kind == CertificateKind::RankZero_S2eq2);
    CHECK(c7.s2 == 2);
    CHECK(descent::selmer_group_oracle(factor_squarefree(7)).dimension == 2);

    auto c65 = certify(65, Theta::Pi3);
    CHECK(c65.kind == CertificateKind::ParityOnly);
    CHECK(c65.s2 % 2 == 1);

    auto c365 = certify(365, Theta::Pi3);
    CHECK(c365.kind == CertificateKind::CriterionMatch_Thm71);
    CHECK(c365.evidence["p"] == 73);
    CHECK(c365.evidence["q"] == 5);

    // r4 = 0 members of the 2pi/3 corollary classes are settled before the pq branch
    auto c35 = certify(35, Theta::TwoPi3);
    CHECK(c35.kind == CertificateKind::RankZero_S2eq2);
    CHECK(c35.curve_n == -35);
    int thm72 = 0;
    for (i64 m = 5; m < 5000; ++m) {
        auto roles = pq_roles(m, Family::F11);
        if (!roles || arith::legendre_additive(roles->first, roles->second) == 0)
            continue;
        auto c = certify(m, Theta::TwoPi3);
        CHECK((c.kind == CertificateKind::RankZero_S2eq2 || c.kind == CertificateKind::CriterionMatch_Thm72));
        thm72 += c.kind == CertificateKind::CriterionMatch_Thm72;
        CHECK(c.s2 == 2);
    }
    MESSAGE("Thm72-type certificates below 5000: " << thm72);

    for (i64 m : {1, 2, 3, 6})
        for (Theta th : {Theta::Pi3, Theta::TwoPi3})
            CHECK(kind_of([&] { certify(m, th); }) == ErrorKind::ExcludedSmallN);
    CHECK(kind_of([] { certify(12, Theta::Pi3); }) == ErrorKind::NotSquarefree);
    CHECK(kind_of([] { certify(0, Theta::Pi3); }) != ErrorKind::ExcludedSmallN);

    auto j = to_json(c365);
    CHECK(j["certificate_kind"] == "CriterionMatch_Thm71");
    CHECK(j["theta"] == monsky::theta_name(Theta::Pi3));
}

TEST_CASE("certificates are decided by the seed only")
{
    for (i64 m : {979, 1771, 1469, 365, 35})
        for (Theta th : {Theta::Pi3, Theta::TwoPi3}) {
            if (!sqfree(m))
                continue;
            auto a = to_json(certify(m, th, 3)).dump();
            auto b = to_json(certify(m, th, 3)).dump();
            CHECK(a == b);
        }
}

TEST_CASE("F19 torsion pairs trivially and the value is stable")
{
    auto inst = f19_instances(12);
    REQUIRE(inst.size() == 12);
    for (const auto &n : inst) {
        std::mt19937_64 rng(static_cast<u64>(n.value));
        auto r = evaluate_F19(n, rng);
        CHECK(r.torsion_pi0 == 0);
        CHECK(r.torsion_pi1 == 0);
        CHECK(satisfies(r.ternary));
        for (int k = 0; k < 4; ++k) {
            std::mt19937_64 other(1000 + k);
            auto s = evaluate_F19(n, other, true);
            CHECK_MESSAGE(s.raw == r.raw, "n=" << n.value);
            CHECK(s.torsion_pi0 == 0);
            CHECK(s.torsion_pi1 == 0);
        }
    }
    CHECK(kind_of([] {
              std::mt19937_64 rng(1);
              evaluate_F19(factor_squarefree(43), rng);
          }) == ErrorKind::HypothesisFailed);
}

TEST_CASE("pq pairing is stable and [a/q] follows the sign of a")
{
    for (Family f : {Family::F5, Family::F11}) {
        for (auto [p, q] : pq_instances(f, 15)) {
            std::mt19937_64 rng(static_cast<u64>(p * q));
            auto r = evaluate_pq(p, q, f, rng);
            CHECK(satisfies(r.ternary));
            // -q is a square mod every prime of a, so [a/q] vanishes exactly when a > 0
            if (f == Family::F5)
                CHECK(r.a_over_q == (r.ternary.a < 0 ? 1 : 0));
            CHECK((static_cast<i128>(r.ternary.c) + static_cast<i128>(r.beta) * r.ternary.a) % q == 0);
            for (int k = 0; k < 3; ++k) {
                std::mt19937_64 other(77 + k);
                auto s = evaluate_pq(p, q, f, other, true);
                CHECK_MESSAGE(s.raw == r.raw, family_name(f) << " p=" << p << " q=" << q);
            }
        }
    }
    std::mt19937_64 rng(2);
    CHECK(kind_of([&] { evaluate_pq(73, 5, Family::F5, rng); }) == ErrorKind::HypothesisFailed);
}

TEST_CASE("rank-zero claims agree with the Selmer oracle")
{
    for (i64 m = 5; m <= 400; ++m) {
        auto n = sqfree(m);
        if (!n || m == 6)
            continue;
        for (Theta th : {Theta::Pi3, Theta::TwoPi3}) {
            auto c = certify(m, th);
            auto cn = factor_squarefree(c.curve_n);
            if (cn.t() > 4)
                continue;
            int dim = descent::selmer_group_oracle(cn).dimension;
            CHECK(dim == c.s2);
            if (c.kind == CertificateKind::RankZero_S2eq2 || c.kind == CertificateKind::CriterionMatch_Thm71 ||
                c.kind == CertificateKind::CriterionMatch_Thm72)
                CHECK_MESSAGE(dim == 2, "m=" << m);
            if (c.kind == CertificateKind::RankZero_Cassels)
                CHECK_MESSAGE(dim == 4, "m=" << m);
            CHECK(is_non_congruence(c.kind) ==
                  (c.kind != CertificateKind::ParityOnly && c.kind != CertificateKind::Unknown));
        }
    }
}

TEST_CASE("Cassels evidence can be rechecked")
{
    int seen = 0;
    for (i64 m = 5; m <= 3000 && seen < 15; ++m) {
        if (!sqfree(m) || m == 6)
            continue;
        for (Theta th : {Theta::Pi3, Theta::TwoPi3}) {
            auto c = certify(m, th);
            if (c.kind != CertificateKind::RankZero_Cassels)
                continue;
            ++seen;
            const auto &ev = c.evidence;
            TernarySolution s;
            s.a = ev["ternary"]["a"];
            s.b = ev["ternary"]["b"];
            s.c = ev["ternary"]["c"];
            s.k1 = ev["ternary"]["k1"];
            s.k2 = ev["ternary"]["k2"];
            std::string form = ev["ternary"]["form"];
            for (TernaryForm f : {TernaryForm::FourC2, TernaryForm::PMinusQ, TernaryForm::PPlusQ})
                if (form == form_name(f))
                    s.form = f;
            CHECK(satisfies(s));
            int total = 0;
            for (const auto &t : ev["pairing_local_sum"]["terms"])
                total ^= t["total"].get<int>();
            CHECK(total == 1);
            CHECK(ev["pairing_local_sum"]["value"] == 1);
        }
    }
    CHECK(seen == 15);
}
