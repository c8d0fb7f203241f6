#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tiling/survey.hpp"

using namespace tiling;
using namespace tiling::survey;
using tiling::survey::survey;

TEST_CASE("parallel_map keeps index order and reports the first error")
{
    auto sq = parallel_map<i64>(1000, 8, [](std::size_t i) { return static_cast<i64>(i * i); });
    for (std::size_t i = 0; i < sq.size(); ++i)
        CHECK(sq[i] == static_cast<i64>(i * i));
    try {
        parallel_map<int>(100, 4, [](std::size_t i) -> int {
            if (i == 17 || i == 60)
                throw std::runtime_error(std::to_string(i));
            return 0;
        });
        FAIL("no error");
    } catch (const std::runtime_error &e) {
        CHECK(std::string(e.what()) == "17");
    }
}

TEST_CASE("csv header and rows")
{
    CHECK(csv_header() ==
          "n,theta,eta,ntilde,t,residue24,template,s2,parity_predicted,parity_ok,r4,certificate_kind,oracle_checked");
    ScanOptions opt;
    opt.oracle = OracleSampling::All;
    auto r = analyze_row(365, Theta::Pi3, opt);
    CHECK(r.n == 365);
    CHECK(r.residue24 == 365 % 24);
    CHECK(r.certificate_kind == "CriterionMatch_Thm71");
    CHECK(r.oracle_checked);
    REQUIRE(r.oracle_dim.has_value());
    CHECK(*r.oracle_dim == r.s2);
    std::string line = to_csv(r);
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
    CHECK(line.rfind("365,", 0) == 0);

    auto neg = analyze_row(7, Theta::TwoPi3, opt);
    CHECK(neg.n == -7);
    CHECK(analyze_row(6, Theta::Pi3, opt).certificate_kind == "ExcludedSmallN");
}

TEST_CASE("survey ordering and determinism")
{
    ScanOptions opt;
    opt.jobs = 1;
    auto serial = survey::survey(400, opt);
    opt.jobs = 6;
    auto parallel = survey::survey(400, opt);
    CHECK(rows_csv(serial) == rows_csv(parallel));
    CHECK(rows_json(serial, {{"max", 400}}).dump() == rows_json(parallel, {{"max", 400}}).dump());
    for (std::size_t i = 1; i < serial.size(); ++i) {
        i64 a = std::llabs(serial[i - 1].n), b = std::llabs(serial[i].n);
        CHECK(a <= b);
        if (a == b)
            CHECK(serial[i - 1].n > 0);
    }
    for (const auto &r : serial)
        CHECK(r.parity_ok);

    ScanOptions one;
    one.thetas = {Theta::TwoPi3};
    one.oracle = OracleSampling::None;
    for (const auto &r : survey::survey(100, one)) {
        CHECK(r.n < 0);
        CHECK_FALSE(r.oracle_checked);
    }
}

TEST_CASE("oracle sampling rule")
{
    CHECK(oracle_sampled(300, 3));
    CHECK(oracle_sampled(5001, 4));
    CHECK_FALSE(oracle_sampled(5001, 5));
    CHECK_FALSE(oracle_sampled(5003, 2));
    CHECK_FALSE(oracle_sampled(20001, 1));
}

TEST_CASE("density report pass rules")
{
    DensityReport r;
    finish(r);
    CHECK(r.empty);
    CHECK(r.pass);

    DensityReport at;
    at.size = 100;
    at.hits = 73;
    at.target = 0.75;
    at.tolerance = 0.03;
    at.at_least = true;
    finish(at);
    CHECK(at.pass);
    at.hits = 71;
    finish(at);
    CHECK_FALSE(at.pass);

    DensityReport two;
    two.size = 1000;
    two.hits = 300;
    two.target = 0.2887;
    two.tolerance = 0.015;
    finish(two);
    CHECK(two.pass);
    two.hits = 320;
    finish(two);
    CHECK_FALSE(two.pass);

    auto cs = scan_certification(Population::F5, 4);
    CHECK(cs.report.empty);
    CHECK(cs.report.pass);
}

TEST_CASE("small scans")
{
    auto par = scan_parity(2000, 4);
    CHECK(par.failures.empty());
    CHECK(par.report.pass);
    CHECK(scan_torsion(2000, 4).empty());
    CHECK(scan_oracle(40, 4).empty());
    CHECK(scan_class_groups(3000, 4).empty());
}

TEST_CASE("limiting densities")
{
    CHECK(std::abs(fk_density(0, true) - 0.288788) < 1e-5);
    CHECK(std::abs(fk_density(1, true) - 0.577576) < 1e-5);
    double total = 0;
    for (int k = 0; k < 10; ++k)
        total += fk_density(k, true);
    CHECK(std::abs(total - 1.0) < 1e-9);
    total = 0;
    for (int k = 0; k < 10; ++k)
        total += fk_density(k, false);
    CHECK(std::abs(total - 1.0) < 1e-9);

    auto rep = scan_r4_density(2000, true);
    u64 sum = 0;
    for (auto &[name, count] : rep.buckets)
        sum += count;
    CHECK(sum == rep.size);
    CHECK(rep.size == classgroup::fundamental_discriminants(2000, true).size());
}
