#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tiling/cassels.hpp"
#include "tiling/classgroup.hpp"
#include "tiling/descent.hpp"
#include "tiling/survey.hpp"

using namespace tiling;
using nlohmann::ordered_json;
using arith::SquarefreeInteger;
using monsky::Theta;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 2;
constexpr int kEscalation = 3;
constexpr int kUsage = 64;

int exit_code_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotSquarefree:
    case ErrorKind::ZeroArgument:
    case ErrorKind::HypothesisFailed:
    case ErrorKind::ExcludedSmallN:
    case ErrorKind::TooLarge:
        return kUsage;
    case ErrorKind::Undecided:
    case ErrorKind::NotFound:
    case ErrorKind::BetaAmbiguous:
        return kEscalation;
    default:
        return kVerifyFailed;
    }
}

Theta parse_theta(const std::string &s)
{
    return s == "pi3" ? Theta::Pi3 : Theta::TwoPi3;
}

std::vector<Theta> parse_thetas(const std::string &s)
{
    if (s == "both")
        return {Theta::Pi3, Theta::TwoPi3};
    return {parse_theta(s)};
}

void print_json(const ordered_json &j) { std::cout << j.dump(2) << "\n"; }

void print_report_text(const survey::DensityReport &r)
{
    std::cout << r.population << "\n";
    for (const auto &[k, v] : r.buckets)
        std::cout << "  " << k << ": " << v << "\n";
    std::cout << "  size " << r.size << ", hits " << r.hits << ", fraction " << r.fraction << ", target "
              << r.target << (r.at_least ? " (at least, slack " : " (+/- ") << r.tolerance << ") -> "
              << (r.pass ? "pass" : "FAIL") << (r.empty ? " (empty)" : "") << "\n";
}

ordered_json analysis_json(i64 m, Theta th, u64 seed)
{
    survey::ScanOptions opt;
    opt.seed = seed;
    opt.certify = false;
    opt.oracle = survey::OracleSampling::None;
    survey::SurveyRow row = survey::analyze_row(m, th, opt);
    ordered_json j;
    j["schema"] = 1;
    j["m"] = m;
    ordered_json rj = survey::to_json(row);
    for (auto it = rj.begin(); it != rj.end(); ++it)
        j[it.key()] = it.value();
    SquarefreeInteger n = arith::factor_squarefree(row.n);
    ordered_json basis = ordered_json::array();
    for (const auto &c : monsky::selmer_basis(n))
        basis.push_back(ordered_json::array({c.b1, c.b2}));
    j["selmer_basis"] = basis;
    if (m == 1 || m == 2 || m == 3 || m == 6) {
        j["certificate_kind"] = "ExcludedSmallN";
        return j;
    }
    auto cert = cassels::certify(m, th, seed);
    j["certificate_kind"] = cassels::kind_name(cert.kind);
    j["evidence"] = cert.evidence;
    return j;
}

void print_flat(const ordered_json &j, const std::string &prefix = "")
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object())
            print_flat(it.value(), prefix + it.key() + ".");
        else
            std::cout << prefix << it.key() << ": " << it.value().dump() << "\n";
    }
}

// ---- selfcheck probes ------------------------------------------------------

i64 imod(i64 a, i64 m) { return ((a % m) + m) % m; }

ordered_json probe_two_adic_table(i64 max_n)
{
    auto table = [](i64 b1, i64 b2) {
        if (b2 % 2 != 0) {
            i64 x = imod(b1, 8), y = imod(b2, 4);
            return (x == 1 && y == 1) || (x == 5 && y == 3);
        }
        i64 x = imod(b1, 8), y = imod(b2, 8);
        return (x == 7 && y == 6) || (x == 3 && y == 2);
    };
    u64 curves = 0, classes = 0;
    ordered_json bad = ordered_json::array();
    for (i64 v = 5; v <= max_n; ++v)
        for (int s : {1, -1}) {
            i64 nv = s * v;
            if (imod(nv, 8) != 1 || v % 2 == 0 || v % 3 == 0)
                continue;
            SquarefreeInteger n;
            try {
                n = arith::factor_squarefree(nv);
            } catch (const Error &) {
                continue;
            }
            ++curves;
            std::vector<i64> gens = {-1, 2, 3};
            for (i64 p : n.odd_primes)
                gens.push_back(p);
            std::size_t g = gens.size();
            for (u64 c1 = 0; c1 < (u64(1) << g); ++c1)
                for (u64 c2 = 0; c2 < (u64(1) << g); ++c2) {
                    i64 b1 = 1, b2 = 1;
                    for (std::size_t i = 0; i < g; ++i) {
                        if ((c1 >> i) & 1)
                            b1 *= gens[i];
                        if ((c2 >> i) & 1)
                            b2 *= gens[i];
                    }
                    bool o = descent::locally_solvable(descent::curve_for(n, {b1, b2}), 2);
                    ++classes;
                    if (o != table(b1, b2) && bad.size() < 20)
                        bad.push_back(ordered_json{{"n", nv}, {"b1", b1}, {"b2", b2}, {"oracle", o}});
                }
        }
    return {{"probe", "two-adic table for gcd(6,n)=1, n = 1 mod 8 against the oracle"},
            {"curves", curves},
            {"classes", classes},
            {"mismatches", bad.size()},
            {"examples", bad}};
}

ordered_json probe_f19(i64 max_n, u64 seed)
{
    u64 count = 0, closed_raw = 0, solv_raw = 0, solv_no_r6_raw = 0, closed_solv = 0, r6_matters = 0;
    ordered_json disagree = ordered_json::array();
    for (i64 m = 19; m <= max_n; m += 24) {
        SquarefreeInteger n;
        try {
            n = arith::factor_squarefree(m);
        } catch (const Error &) {
            continue;
        }
        if (!cassels::qualifies_F19(n))
            continue;
        std::mt19937_64 rng(seed ^ static_cast<u64>(m));
        auto r = cassels::evaluate_F19(n, rng);
        ++count;
        closed_raw += r.closed_form == r.raw;
        solv_raw += r.solvability == r.raw;
        solv_no_r6_raw += r.solvability_no_r6 == r.raw;
        closed_solv += r.closed_form == r.solvability;
        r6_matters += r.solvability != r.solvability_no_r6;
        if (r.closed_form != r.raw && disagree.size() < 20)
            disagree.push_back({{"n", m},
                                {"d", r.split.d_star},
                                {"closed", r.closed_form},
                                {"solvability", r.solvability},
                                {"raw", r.raw}});
    }
    return {{"probe", "n = 19 mod 24 pairing routes"},
            {"instances", count},
            {"closed_eq_raw", closed_raw},
            {"solvability_eq_raw", solv_raw},
            {"solvability_without_r6_eq_raw", solv_no_r6_raw},
            {"closed_eq_solvability", closed_solv},
            {"r6_term_changes_answer", r6_matters},
            {"closed_ne_raw_examples", disagree}};
}

ordered_json probe_pq(cassels::Family f, i64 max_n, u64 seed)
{
    u64 count = 0, agree = 0, partner_p_sign_outside = 0, sign_cases = 0;
    ordered_json disagree = ordered_json::array();
    for (i64 m = 5; m <= max_n; ++m) {
        auto roles = cassels::pq_roles(m, f);
        if (!roles)
            continue;
        auto [p, q] = *roles;
        if (arith::legendre_additive(p, q))
            continue;
        if (f == cassels::Family::F11) {
            // the sign taken from [-1/p] instead of [-1/q]
            SquarefreeInteger n = arith::factor_squarefree(-m);
            auto M = monsky::build_monsky(n);
            i64 b1 = arith::legendre_additive(-1, p) ? -q : q;
            ++sign_cases;
            if (!(M.matrix * monsky::encode_pair(b1, 1, n)).is_zero())
                ++partner_p_sign_outside;
        }
        std::mt19937_64 rng(seed ^ static_cast<u64>(m));
        auto r = cassels::evaluate_pq(p, q, f, rng);
        ++count;
        agree += r.closed_form == r.raw;
        if (r.closed_form != r.raw && disagree.size() < 20)
            disagree.push_back({{"m", m}, {"p", p}, {"q", q}, {"beta", r.beta}, {"closed", r.closed_form}, {"raw", r.raw}});
    }
    ordered_json j = {{"probe", std::string(cassels::family_name(f)) + " closed form [beta/q] against the local sum"},
                      {"instances", count},
                      {"agree", agree},
                      {"disagree_examples", disagree}};
    if (f == cassels::Family::F11)
        j["partner_sign_from_p_outside_selmer"] = {{"outside", partner_p_sign_outside}, {"of", sign_cases}};
    return j;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"2-Selmer ranks and non-congruence certificates for y^2 = x(x-n)(x+3n)"};
    app.require_subcommand(1);

    std::string theta = "pi3", format = "text", oracle = "sampled", kind = "r4", sign = "both";
    unsigned jobs = 1;
    u64 seed = 0;
    i64 m = 0, max_n = 0;

    if (const char *env = std::getenv("TILING_JOBS"))
        jobs = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    auto theta_check = CLI::IsMember({"pi3", "2pi3"});
    auto add_common = [&](CLI::App *c, std::vector<std::string> formats) {
        c->add_option("--format", format, "output format")->check(CLI::IsMember(formats));
        c->add_option("--seed", seed, "seed for randomized choices");
    };

    auto *analyze = app.add_subcommand("analyze", "Selmer rank, template and certificate for one m");
    analyze->add_option("m", m, "positive squarefree integer")->required();
    analyze->add_option("--theta", theta)->required()->check(theta_check);
    add_common(analyze, {"json", "text"});

    auto *certify = app.add_subcommand("certify", "full certificate transcript for one m");
    certify->add_option("m", m, "positive squarefree integer")->required();
    certify->add_option("--theta", theta)->required()->check(theta_check);
    add_common(certify, {"json", "text"});

    auto *surv = app.add_subcommand("survey", "one row per squarefree m <= max");
    surv->add_option("--max", max_n)->required()->check(CLI::Range(i64(1), i64(1000000)));
    surv->add_option("--theta", theta, "pi3, 2pi3 or both")->check(CLI::IsMember({"pi3", "2pi3", "both"}));
    surv->add_option("--oracle", oracle, "oracle sampling")->check(CLI::IsMember({"none", "sampled", "all"}));
    surv->add_option("--jobs", jobs, "worker threads (default TILING_JOBS or 1)");
    add_common(surv, {"csv", "json", "text"});

    auto *vpar = app.add_subcommand("verify-parity", "parity of s2 against the residue tables");
    vpar->add_option("--max", max_n)->required()->check(CLI::Range(i64(1), i64(1000000)));
    vpar->add_option("--jobs", jobs);
    add_common(vpar, {"json", "text"});

    auto *vorc = app.add_subcommand("verify-oracle", "local-solvability oracle against 2t+6-rank(M_n)");
    vorc->add_option("--max", max_n)->required()->check(CLI::Range(i64(1), i64(300)));
    vorc->add_option("--jobs", jobs);
    add_common(vorc, {"json", "text"});

    auto *dens = app.add_subcommand("density", "r4 densities and certification rates");
    dens->add_option("--max", max_n)->required()->check(CLI::Range(i64(1), i64(1000000)));
    dens->add_option("--kind", kind)->check(CLI::IsMember({"r4", "F5", "F11", "Cor15", "Cor16"}));
    dens->add_option("--sign", sign, "for r4: negative, positive or both")
        ->check(CLI::IsMember({"negative", "positive", "both"}));
    dens->add_option("--jobs", jobs);
    add_common(dens, {"json", "text"});

    auto *self = app.add_subcommand("selfcheck", "erratum probes; reports only");
    i64 probe_max = 5000;
    self->add_option("--max", probe_max, "range for the probes");
    add_common(self, {"json", "text"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }
    if (jobs == 0)
        jobs = 1;

    try {
        if (*analyze || *certify) {
            if (m <= 0) {
                std::cerr << "m must be positive\n";
                return kUsage;
            }
            Theta th = parse_theta(theta);
            ordered_json j;
            if (*analyze) {
                j = analysis_json(m, th, seed);
            } else {
                j = cassels::to_json(cassels::certify(m, th, seed));
            }
            if (format == "json")
                print_json(j);
            else
                print_flat(j);
            return kOk;
        }

        if (*surv) {
            survey::ScanOptions opt;
            opt.thetas = parse_thetas(theta);
            opt.jobs = jobs;
            opt.seed = seed;
            opt.oracle = oracle == "none" ? survey::OracleSampling::None
                         : oracle == "all" ? survey::OracleSampling::All
                                           : survey::OracleSampling::Sampled;
            auto rows = survey::survey(max_n, opt);
            int bad = 0;
            for (const auto &r : rows) {
                bool oracle_bad = r.oracle_dim && *r.oracle_dim != r.s2;
                if (!r.parity_ok || oracle_bad) {
                    ++bad;
                    std::cerr << "mismatch: " << survey::to_csv(r)
                              << (oracle_bad ? " oracle_dim=" + std::to_string(*r.oracle_dim) : "") << "\n";
                }
            }
            if (format == "json")
                print_json(survey::rows_json(rows, {{"command", "survey"}, {"max", max_n}, {"theta", theta},
                                                    {"oracle", oracle}, {"seed", seed}}));
            else
                std::cout << survey::rows_csv(rows);
            std::cerr << rows.size() << " rows, " << bad << " mismatches\n";
            return bad ? kVerifyFailed : kOk;
        }

        if (*vpar) {
            auto s = survey::scan_parity(max_n, jobs);
            if (format == "json") {
                ordered_json f = ordered_json::array();
                for (const auto &r : s.failures)
                    f.push_back(survey::to_json(r));
                ordered_json j = survey::to_json(s.report);
                j["failures"] = f;
                print_json(j);
            } else {
                print_report_text(s.report);
                for (const auto &r : s.failures)
                    std::cout << "failure: " << survey::to_csv(r) << "\n";
            }
            return s.failures.empty() ? kOk : kVerifyFailed;
        }

        if (*vorc) {
            auto fails = survey::scan_oracle(max_n, jobs);
            if (format == "json") {
                ordered_json f = ordered_json::array();
                for (const auto &x : fails)
                    f.push_back({{"n", x.n}, {"oracle_dim", x.oracle_dim}, {"s2", x.s2}, {"detail", x.detail}});
                print_json({{"schema", 1}, {"max", max_n}, {"failures", f}});
            } else {
                std::cout << "oracle check, 1 <= |n| <= " << max_n << ": " << fails.size() << " failures\n";
                for (const auto &x : fails)
                    std::cout << "n=" << x.n << " oracle=" << x.oracle_dim << " s2=" << x.s2 << " " << x.detail
                              << "\n";
            }
            return fails.empty() ? kOk : kVerifyFailed;
        }

        if (*dens) {
            std::vector<survey::DensityReport> reps;
            ordered_json extra = ordered_json::object();
            if (kind == "r4") {
                if (sign != "positive")
                    reps.push_back(survey::scan_r4_density(max_n, true));
                if (sign != "negative")
                    reps.push_back(survey::scan_r4_density(max_n, false));
                extra["formula_k0_negative"] = survey::fk_density(0, true);
                extra["formula_k1_negative"] = survey::fk_density(1, true);
                extra["formula_k0_positive"] = survey::fk_density(0, false);
            } else {
                survey::Population pop = kind == "F5"    ? survey::Population::F5
                                         : kind == "F11" ? survey::Population::F11
                                         : kind == "Cor15" ? survey::Population::Cor15
                                                           : survey::Population::Cor16;
                auto s = survey::scan_certification(pop, max_n, jobs, seed);
                reps.push_back(s.report);
                extra["closed_form_disagreements"] = s.disagreements.size();
                extra["failures"] = s.failures;
            }
            if (format == "json") {
                ordered_json arr = ordered_json::array();
                for (const auto &r : reps)
                    arr.push_back(survey::to_json(r));
                print_json({{"schema", 1}, {"reports", arr}, {"extra", extra}});
            } else {
                for (const auto &r : reps)
                    print_report_text(r);
                print_flat(extra);
            }
            return kOk;
        }

        if (*self) {
            ordered_json probes = ordered_json::array();
            probes.push_back(probe_two_adic_table(std::min<i64>(probe_max, 400)));
            probes.push_back(probe_f19(probe_max, seed));
            probes.push_back(probe_pq(cassels::Family::F5, probe_max * 4, seed));
            probes.push_back(probe_pq(cassels::Family::F11, probe_max * 4, seed));
            if (format == "json") {
                print_json({{"schema", 1}, {"probes", probes}});
            } else {
                for (const auto &p : probes) {
                    std::cout << "== " << p["probe"].get<std::string>() << "\n";
                    for (auto it = p.begin(); it != p.end(); ++it)
                        if (it.key() != "probe")
                            std::cout << "  " << it.key() << ": " << it.value().dump() << "\n";
                }
            }
            return kOk;
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerifyFailed;
    }
    return kUsage;
}
