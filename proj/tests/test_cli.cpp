#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args)
{
    std::string cmd = std::string(TILING_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

TEST_CASE("analyze emits parseable json")
{
    auto r = run("analyze 365 --theta pi3 --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::ordered_json::parse(r.out);
    CHECK(j["certificate_kind"] == "CriterionMatch_Thm71");
    CHECK(j["m"] == 365);
    CHECK(j["schema"] == 1);
    CHECK(j.contains("selmer_basis"));
    CHECK(nlohmann::ordered_json::parse(j.dump()) == j);

    auto t = run("analyze 7 --theta 2pi3");
    CHECK(t.code == 0);
    CHECK(t.out.find("certificate_kind") != std::string::npos);
}

TEST_CASE("certify transcript")
{
    auto r = run("certify 7 --theta pi3 --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::ordered_json::parse(r.out);
    CHECK(j["certificate_kind"] == "RankZero_S2eq2");
    CHECK(j["evidence"].contains("selmer_basis"));
    CHECK(run("certify 6 --theta pi3").code == 64);
}

TEST_CASE("usage errors exit 64")
{
    CHECK(run("analyze 12 --theta pi3").code == 64);
    CHECK(run("analyze 35").code == 64);
    CHECK(run("analyze 35 --theta pi4").code == 64);
    CHECK(run("analyze 0 --theta pi3").code == 64);
    CHECK(run("frobnicate").code == 64);
    CHECK(run("").code == 64);
}

TEST_CASE("verification subcommands")
{
    CHECK(run("verify-parity --max 2000").code == 0);
    auto o = run("verify-oracle --max 30 --format json");
    CHECK(o.code == 0);
    CHECK(nlohmann::ordered_json::parse(o.out)["failures"].empty());
}

TEST_CASE("survey output is stable across job counts")
{
    auto a = run("survey --max 300 --jobs 1");
    auto b = run("survey --max 300 --jobs 4");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("n,theta,eta,ntilde,t,residue24,template,s2,", 0) == 0);
    auto j = run("survey --max 50 --theta pi3 --format json");
    CHECK(j.code == 0);
    auto parsed = nlohmann::ordered_json::parse(j.out);
    CHECK(parsed["schema"] == 1);
    CHECK(parsed["rows"].size() > 20);
}

TEST_CASE("density report")
{
    auto r = run("density --max 2000 --kind r4 --sign negative --format json");
    CHECK(r.code == 0);
    auto j = nlohmann::ordered_json::parse(r.out);
    CHECK(j["reports"].size() == 1);
}
