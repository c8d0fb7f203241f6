// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>

#include "tiling/cassels.hpp"
#include "tiling/survey.hpp"

using namespace tiling;
using namespace tiling::survey;

namespace {

unsigned jobs()
{
    unsigned h = std::thread::hardware_concurrency();
    return h ? h : 4;
}

int failures = 0;

void line(int id, bool pass, const std::string &what)
{
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << what << std::endl;
    if (!pass)
        ++failures;
}

std::string pct(double x)
{
    std::ostringstream o;
    o.precision(4);
    o << 100 * x << "%";
    return o.str();
}

std::string capture(const std::string &args, int &code)
{
    std::string cmd = std::string(TILING_CLI_PATH) + " " + args + " 2>/dev/null";
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        code = -1;
        return out;
    }
    std::array<char, 1 << 16> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), got);
    int st = pclose(pipe);
    code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

void parity()
{
    auto s = scan_parity(2000, jobs());
    line(1, s.failures.empty(),
         "s2 parity vs residue tables, m <= 2000 both angles: " + std::to_string(s.report.size) + " curves, " +
             std::to_string(s.failures.size()) + " mismatches");
}

void oracle()
{
    auto f = scan_oracle(300, jobs());
    std::string detail;
    if (!f.empty())
        detail = ", first n=" + std::to_string(f[0].n) + " " + f[0].detail;
    line(2, f.empty(), "local-solvability oracle = s2, 1 <= |n| <= 300: " + std::to_string(f.size()) + " failures" +
                           detail);
}

void torsion()
{
    auto bad = scan_torsion(10000, jobs());
    line(3, bad.empty(), "torsion classes in ker M_n, |n| <= 10^4: " + std::to_string(bad.size()) + " failures");
}

void redei()
{
    auto bad = scan_class_groups(50000, jobs());
    line(4, bad.empty(), "Redei r2, r4 vs reduced forms, |D| <= 5*10^4: " + std::to_string(bad.size()) +
                             " failures");
}

void density()
{
    auto neg = scan_r4_density(1000000, true);
    auto pos = scan_r4_density(1000000, false);
    line(5, neg.pass && pos.pass,
         "r4 = 0 frequency to 10^6: negative " + pct(neg.fraction) + " (target " + pct(neg.target) + " +/- " +
             pct(neg.tolerance) + "), positive " + pct(pos.fraction) + " (target " + pct(pos.target) + ")");
}

void corollary()
{
    auto a = scan_certification(Population::Cor15, 10000, jobs());
    auto b = scan_certification(Population::Cor16, 10000, jobs());
    bool ok = a.report.pass && b.report.pass;
    line(6, ok,
         "r4(-m) = 0 members certified RankZero_S2eq2, m <= 10^4: pi/3 " + std::to_string(a.report.hits) + "/" +
             std::to_string(a.report.size) + " (" + std::to_string(a.failures.size()) + " uncertified), 2pi/3 " +
             std::to_string(b.report.hits) + "/" + std::to_string(b.report.size) + " (" +
             std::to_string(b.failures.size()) + " uncertified)");
}

void pq_families()
{
    auto a = scan_certification(Population::F5, 100000, jobs());
    auto b = scan_certification(Population::F11, 100000, jobs());
    bool rate = a.report.pass && b.report.pass;
    bool agree = a.disagreements.empty() && b.disagreements.empty();
    line(7, rate && agree,
         "pq families to 10^5: certified F5 " + pct(a.report.fraction) + ", F11 " + pct(b.report.fraction) +
             " (need >= " + pct(a.report.target - a.report.tolerance) + "); closed form vs local sum disagreements " +
             std::to_string(a.disagreements.size()) + " F5, " + std::to_string(b.disagreements.size()) + " F11");
}

void f19_stability()
{
    std::vector<SquarefreeInteger> inst;
    for (i64 m = 19; inst.size() < 20 && m < 1000000; m += 24) {
        SquarefreeInteger n;
        try {
            n = arith::factor_squarefree(m);
        } catch (const Error &) {
            continue;
        }
        if (cassels::qualifies_F19(n))
            inst.push_back(n);
    }
    auto res = parallel_map<std::array<int, 3>>(inst.size(), jobs(), [&](std::size_t i) {
        const auto &n = inst[i];
        std::mt19937_64 rng(0xC0FFEEull + static_cast<u64>(n.value));
        auto base = cassels::evaluate_F19(n, rng);
        int unstable = 0, torsion_nonzero = (base.torsion_pi0 | base.torsion_pi1) ? 1 : 0;
        int routes = base.closed_form == base.raw && base.solvability == base.raw ? 0 : 1;
        for (int k = 0; k < 50; ++k) {
            std::mt19937_64 other(static_cast<u64>(n.value) * 1315423911ull + static_cast<u64>(k));
            auto r = cassels::evaluate_F19(n, other, true);
            unstable += r.raw != base.raw;
            torsion_nonzero += (r.torsion_pi0 | r.torsion_pi1) ? 1 : 0;
            routes += r.closed_form == r.raw && r.solvability == r.raw ? 0 : 1;
        }
        return std::array<int, 3>{unstable, torsion_nonzero, routes};
    });
    int unstable = 0, tors = 0, route_inst = 0;
    for (auto &r : res) {
        unstable += r[0];
        tors += r[1];
        route_inst += r[2] > 0;
    }
    bool ok = inst.size() == 20 && unstable == 0 && tors == 0 && route_inst == 0;
    line(8, ok,
         std::to_string(inst.size()) + " F19 instances x 50 re-evaluations: " + std::to_string(unstable) +
             " value changes, " + std::to_string(tors) + " nonzero torsion pairings, " +
             std::to_string(route_inst) + " instances where closed form or solvability route differs from the local sum");
}

void determinism()
{
    int c1 = 0, c2 = 0, c3 = 0;
    auto a = capture("survey --max 3000 --jobs 1", c1);
    auto b = capture("survey --max 3000 --jobs 1", c2);
    auto c = capture("survey --max 3000 --jobs 4", c3);
    bool ok = c1 == 0 && c2 == 0 && c3 == 0 && !a.empty() && a == b && a == c;
    line(9, ok, "survey --max 3000 byte-identical across two runs and jobs 1 vs 4 (" + std::to_string(a.size()) +
                    " bytes)");
}

} // namespace

int main()
{
    auto t0 = std::chrono::steady_clock::now();
    parity();
    oracle();
    torsion();
    redei();
    density();
    corollary();
    pq_families();
    f19_stability();
    determinism();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << failures << " of 9 criteria failed (" << secs << " s)" << std::endl;
    return failures ? 1 : 0;
}
