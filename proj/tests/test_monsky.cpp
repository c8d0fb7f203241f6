#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "tiling/classgroup.hpp"
#include "tiling/monsky.hpp"

using namespace tiling;
using namespace tiling::monsky;
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

BitMatrix rows_of(std::vector<std::string> rows)
{
    std::vector<std::vector<int>> r;
    for (auto &s : rows) {
        std::vector<int> row;
        for (char c : s)
            row.push_back(c == '1');
        r.push_back(row);
    }
    return BitMatrix::from_rows(r);
}

} // namespace

TEST_CASE("select_template examples")
{
    CHECK(select_template(factor_squarefree(41)) == Template::A1);
    CHECK(select_template(factor_squarefree(5)) == Template::A2);
    CHECK(select_template(factor_squarefree(-10)) == Template::B2);
    CHECK(std::string(template_name(Template::C4)) == "C4");
    CHECK(template_from_name("D2") == Template::D2);
}

TEST_CASE("every eta and residue reaches a template with the right shape")
{
    for (i64 v = -3000; v <= 3000; ++v) {
        auto n = sqfree(v);
        if (!n || v == 0)
            continue;
        auto M = build_monsky(*n);
        std::size_t t = n->odd_primes.size();
        CHECK(M.matrix.cols() == 2 * t + 6);
        std::size_t scalar = M.matrix.rows() - 2 * t;
        char fam = template_name(M.tmpl)[0];
        CHECK(scalar == (fam == 'A' || fam == 'C' ? 6u : 5u));
        CHECK(M.column_labels.size() == M.matrix.cols());
        CHECK(evaluate_layout(template_layout(M.tmpl), *n) == M.matrix);
    }
}

TEST_CASE("build_blocks examples")
{
    auto one = build_blocks(factor_squarefree(1));
    CHECK(one.t() == 0);
    CHECK(one.A.rows() == 0);
    CHECK(one.r(-1).size() == 0);

    auto b = build_blocks(factor_squarefree(65));
    CHECK(b.A.get(0, 1) == arith::legendre_additive(13, 5));
    CHECK(b.A.get(0, 1) == 1);
    CHECK(b.A.get(1, 0) == arith::legendre_additive(5, 13));
    CHECK(b.A.get(0, 0) == b.A.get(0, 1));
    CHECK(b.A.get(1, 1) == b.A.get(1, 0));
}

TEST_CASE("block identities for ntilde up to 10^5")
{
    long checked = 0;
    for (i64 v = 5; v <= 100000; v += 2) {
        if (v % 3 == 0)
            continue;
        auto n = sqfree(v);
        if (!n)
            continue;
        auto b = build_blocks(*n);
        std::size_t t = b.primes.size();
        // rows of A sum to zero
        CHECK((b.A * BitVector::ones(t)).is_zero());
        CHECK(b.A + b.A.transpose() == b.D(-1) + gf2::outer_product(b.r(-1), b.r(-1)));
        CHECK(b.D(2) == gf2::diag(b.r(2)));
        ++checked;
    }
    CHECK(checked > 20000);
}

TEST_CASE("build_monsky small cases transcribed by hand")
{
    auto m1 = build_monsky(factor_squarefree(1));
    CHECK(m1.tmpl == Template::A1);
    CHECK(m1.matrix == rows_of({"100100", "010101", "000010", "111001", "110001", "001000"}));

    // A2 at t=1 with [-3/5]=1, [-1/5]=0, [2/5]=1, [3/5]=1
    auto m5 = build_monsky(factor_squarefree(5));
    CHECK(m5.tmpl == Template::A2);
    CHECK(m5.matrix == rows_of({"10010000", "00001000", "01000000", "00010100", "11000010", "00100000", "00001110",
                                "01100000"}));

    // B1 at t=0 has five rows and six columns
    auto m2 = build_monsky(factor_squarefree(2));
    CHECK(m2.tmpl == Template::B1);
    CHECK(m2.matrix.rows() == 5);
    CHECK(m2.matrix.cols() == 6);
}

TEST_CASE("selmer_rank examples")
{
    CHECK(selmer_rank(factor_squarefree(1)) == 2);
    CHECK(gf2::rank(build_monsky(factor_squarefree(1)).matrix) == 4);
    CHECK(selmer_rank(factor_squarefree(5)) == 2);
    CHECK(gf2::rank(build_monsky(factor_squarefree(5)).matrix) == 6);
    CHECK(selmer_rank(factor_squarefree(6)) % 2 == 1);
}

TEST_CASE("encode_pair and decode_vector")
{
    auto n5 = factor_squarefree(5);
    CHECK(encode_pair(1, 1, n5).is_zero());
    auto v = encode_pair(-3, -5, n5);
    // xi (b2 at -1,2,3), gamma (b1 at -1,2,3), y (b2 at p_i), x (b1 at p_i)
    CHECK(v.to_string() == "10010110");

    for (i64 val : {1, -1, 5, -30, 65, -455, 1001, -2 * 3 * 5 * 7}) {
        auto n = factor_squarefree(val);
        if (n.t() > 2)
            continue;
        std::size_t dim = 2 * n.odd_primes.size() + 6;
        for (u64 code = 0; code < (u64(1) << dim); ++code) {
            BitVector w(dim);
            for (std::size_t i = 0; i < dim; ++i)
                w.set(i, (code >> i) & 1);
            auto c = decode_vector(w, n);
            CHECK(encode_pair(c, n) == w);
        }
    }
    std::mt19937_64 rng(8);
    auto n = factor_squarefree(5 * 7 * 11 * 13);
    std::vector<i64> gens = {-1, 2, 3, 5, 7, 11, 13};
    for (int i = 0; i < 200; ++i) {
        i64 b1 = 1, b2 = 1;
        for (i64 g : gens) {
            if (rng() & 1)
                b1 *= g;
            if (rng() & 1)
                b2 *= g;
        }
        auto c = decode_vector(encode_pair(b1, b2, n), n);
        CHECK(c.b1 == b1);
        CHECK(c.b2 == b2);
    }
}

TEST_CASE("selmer_basis examples")
{
    auto n5 = factor_squarefree(5);
    auto basis = selmer_basis(n5);
    CHECK(basis.size() == 2);
    std::set<std::string> span, torsion;
    auto M = build_monsky(n5);
    for (const auto &v : selmer_kernel(M))
        span.insert(v.to_string());
    span.insert(BitVector(8).to_string());
    auto ker = selmer_kernel(M);
    span.insert((ker[0] + ker[1]).to_string());
    for (auto c : std::vector<TwoCoverClass>{{1, 1}, {-3, -5}, {5, 1}, {-15, -5}})
        torsion.insert(encode_pair(c, n5).to_string());
    CHECK(span == torsion);

    auto n1 = factor_squarefree(1);
    auto M1 = build_monsky(n1);
    CHECK((M1.matrix * encode_pair(-3, -1, n1)).is_zero());
}

TEST_CASE("predicted_parity examples")
{
    CHECK(predicted_parity(19, Theta::Pi3) == Parity::Even);
    CHECK(predicted_parity(11, Theta::TwoPi3) == Parity::Even);
    CHECK(predicted_parity(21, Theta::Pi3) == Parity::Odd);
    CHECK(curve_parameter(7, Theta::TwoPi3) == -7);
}

TEST_CASE("parity of s2 matches the residue tables for m <= 2000")
{
    for (i64 m = 1; m <= 2000; ++m) {
        if (!sqfree(m))
            continue;
        for (Theta th : {Theta::Pi3, Theta::TwoPi3}) {
            int s2 = selmer_rank(factor_squarefree(curve_parameter(m, th)));
            CHECK_MESSAGE((s2 % 2 == 1) == (predicted_parity(m, th) == Parity::Odd), "m=" << m << " " << theta_name(th));
        }
    }
}

TEST_CASE("residue 6 rows are odd for pi/3 and even for 2pi/3")
{
    for (i64 m = 6; m <= 5000; m += 24) {
        auto n = sqfree(m);
        if (!n)
            continue;
        CHECK(selmer_rank(*n) % 2 == 1);
        CHECK(selmer_rank(factor_squarefree(-m)) % 2 == 0);
    }
}

TEST_CASE("torsion classes lie in the kernel")
{
    for (i64 v = -3000; v <= 3000; ++v) {
        auto n = sqfree(v);
        if (!n || v == 0)
            continue;
        auto M = build_monsky(*n);
        for (const auto &c : torsion_classes(*n))
            CHECK((M.matrix * encode_pair(c, *n)).is_zero());
        CHECK(selmer_rank(M) >= 2);
    }
}

TEST_CASE("s2 bounded by the 4-rank for n = 7, 19 mod 24")
{
    for (i64 m = 7; m <= 20000; ++m) {
        if (m % 24 != 7 && m % 24 != 19)
            continue;
        auto n = sqfree(m);
        if (!n)
            continue;
        CHECK(selmer_rank(*n) <= 2 + 2 * classgroup::r4(-m));
    }
}
