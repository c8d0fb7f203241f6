#include "tiling/survey.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tiling/classgroup.hpp"
#include "tiling/descent.hpp"

namespace tiling::survey {

namespace {

std::vector<i64> squarefree_upto(i64 max_n)
{
    std::vector<i64> out;
    if (max_n < 1)
        return out;
    std::vector<char> bad(static_cast<std::size_t>(max_n) + 1, 0);
    for (i64 p = 2; p * p <= max_n; ++p)
        for (i64 j = p * p; j <= max_n; j += p * p)
            bad[static_cast<std::size_t>(j)] = 1;
    for (i64 m = 1; m <= max_n; ++m)
        if (!bad[static_cast<std::size_t>(m)])
            out.push_back(m);
    return out;
}

i64 imod(i64 a, i64 m) { return ((a % m) + m) % m; }

// every element of the span of the Selmer basis, as encoded vectors
std::set<std::string> kernel_span(const SquarefreeInteger &n)
{
    auto M = monsky::build_monsky(n);
    auto basis = monsky::selmer_kernel(M);
    std::set<std::string> out;
    std::size_t k = basis.size();
    for (u64 code = 0; code < (u64(1) << k); ++code) {
        gf2::BitVector v(M.matrix.cols());
        for (std::size_t i = 0; i < k; ++i)
            if ((code >> i) & 1)
                v ^= basis[i];
        out.insert(v.to_string());
    }
    return out;
}

std::string class_text(const monsky::TwoCoverClass &c)
{
    return "(" + std::to_string(c.b1) + "," + std::to_string(c.b2) + ")";
}

} // namespace

bool oracle_sampled(i64 m, int t)
{
    if (m <= 300)
        return true;
    return m <= 10000 && t <= 4 && m % 50 == 1;
}

SurveyRow analyze_row(i64 m, Theta th, const ScanOptions &opt)
{
    SurveyRow r;
    r.n = monsky::curve_parameter(m, th);
    r.theta = th;
    SquarefreeInteger n = arith::factor_squarefree(r.n);
    r.eta = n.eta;
    r.ntilde = n.ntilde;
    r.t = n.t();
    r.residue24 = static_cast<int>(imod(m, 24));
    auto M = monsky::build_monsky(n);
    r.tmpl = monsky::template_name(M.tmpl);
    r.s2 = monsky::selmer_rank(M);
    r.parity_predicted = monsky::predicted_parity(m, th);
    r.parity_ok = (r.s2 % 2 == 1) == (r.parity_predicted == Parity::Odd);
    r.r4 = classgroup::r4(-m);
    if (!opt.certify)
        r.certificate_kind = "-";
    else if (m == 1 || m == 2 || m == 3 || m == 6)
        r.certificate_kind = "ExcludedSmallN";
    else
        r.certificate_kind = cassels::kind_name(cassels::certify(m, th, opt.seed).kind);
    bool check = opt.oracle == OracleSampling::All || (opt.oracle == OracleSampling::Sampled && oracle_sampled(m, r.t));
    if (check && r.t <= 4) {
        r.oracle_checked = true;
        r.oracle_dim = descent::selmer_group_oracle(n).dimension;
    }
    return r;
}

std::vector<SurveyRow> survey(i64 max_m, const ScanOptions &opt)
{
    std::vector<std::pair<i64, Theta>> work;
    for (i64 m : squarefree_upto(max_m))
        for (Theta th : {Theta::Pi3, Theta::TwoPi3})
            if (std::find(opt.thetas.begin(), opt.thetas.end(), th) != opt.thetas.end())
                work.push_back({m, th});
    // pi/3 gives n = m > 0, so this order is ascending |n|, positive first
    return parallel_map<SurveyRow>(work.size(), opt.jobs,
                                   [&](std::size_t i) { return analyze_row(work[i].first, work[i].second, opt); });
}

std::string csv_header()
{
    return "n,theta,eta,ntilde,t,residue24,template,s2,parity_predicted,parity_ok,r4,certificate_kind,oracle_checked";
}

std::string to_csv(const SurveyRow &r)
{
    std::ostringstream o;
    o << r.n << ',' << monsky::theta_name(r.theta) << ',' << r.eta << ',' << r.ntilde << ',' << r.t << ','
      << r.residue24 << ',' << r.tmpl << ',' << r.s2 << ',' << monsky::parity_name(r.parity_predicted) << ','
      << (r.parity_ok ? "true" : "false") << ',' << r.r4 << ',' << r.certificate_kind << ','
      << (r.oracle_checked ? "true" : "false");
    return o.str();
}

ordered_json to_json(const SurveyRow &r)
{
    ordered_json j;
    j["n"] = r.n;
    j["theta"] = monsky::theta_name(r.theta);
    j["eta"] = r.eta;
    j["ntilde"] = r.ntilde;
    j["t"] = r.t;
    j["residue24"] = r.residue24;
    j["template"] = r.tmpl;
    j["s2"] = r.s2;
    j["parity_predicted"] = monsky::parity_name(r.parity_predicted);
    j["parity_ok"] = r.parity_ok;
    j["r4"] = r.r4;
    j["certificate_kind"] = r.certificate_kind;
    j["oracle_checked"] = r.oracle_checked;
    if (r.oracle_dim)
        j["oracle_dim"] = *r.oracle_dim;
    return j;
}

std::string rows_csv(const std::vector<SurveyRow> &rows)
{
    std::string s = csv_header() + "\n";
    for (const auto &r : rows)
        s += to_csv(r) + "\n";
    return s;
}

ordered_json rows_json(const std::vector<SurveyRow> &rows, const ordered_json &meta)
{
    ordered_json j;
    j["schema"] = 1;
    for (auto it = meta.begin(); it != meta.end(); ++it)
        j[it.key()] = it.value();
    ordered_json arr = ordered_json::array();
    for (const auto &r : rows)
        arr.push_back(to_json(r));
    j["rows"] = arr;
    return j;
}

void finish(DensityReport &r)
{
    r.empty = r.size == 0;
    r.fraction = r.empty ? 0.0 : static_cast<double>(r.hits) / static_cast<double>(r.size);
    if (r.empty)
        r.pass = true;
    else if (r.at_least)
        r.pass = r.fraction >= r.target - r.tolerance;
    else
        r.pass = std::fabs(r.fraction - r.target) <= r.tolerance;
}

ordered_json to_json(const DensityReport &r)
{
    ordered_json b = ordered_json::object();
    for (const auto &[k, v] : r.buckets)
        b[k] = v;
    return {{"schema", 1},
            {"population", r.population},
            {"size", r.size},
            {"hits", r.hits},
            {"buckets", b},
            {"fraction", r.fraction},
            {"target", r.target},
            {"tolerance", r.tolerance},
            {"comparison", r.at_least ? "at_least" : "within"},
            {"pass", r.pass},
            {"empty", r.empty}};
}

ParityScan scan_parity(i64 max_n, unsigned jobs)
{
    ScanOptions opt;
    opt.jobs = jobs;
    opt.certify = false;
    opt.oracle = OracleSampling::None;
    auto rows = survey(max_n, opt);
    ParityScan s;
    s.report.population = "squarefree 1 <= m <= " + std::to_string(max_n) + ", both theta";
    u64 even = 0, odd = 0;
    for (const auto &r : rows) {
        (r.s2 % 2 ? odd : even)++;
        if (r.parity_ok)
            s.report.hits++;
        else
            s.failures.push_back(r);
    }
    s.report.size = rows.size();
    s.report.buckets = {{"even", even}, {"odd", odd}, {"failures", s.failures.size()}};
    s.report.target = 1.0;
    s.report.tolerance = 0.0;
    finish(s.report);
    return s;
}

std::vector<OracleFailure> scan_oracle(i64 max_n, unsigned jobs)
{
    std::vector<i64> ns;
    for (i64 m : squarefree_upto(max_n)) {
        ns.push_back(m);
        ns.push_back(-m);
    }
    auto res = parallel_map<std::optional<OracleFailure>>(ns.size(), jobs, [&](std::size_t i) {
        SquarefreeInteger n = arith::factor_squarefree(ns[i]);
        auto o = descent::selmer_group_oracle(n);
        int s2 = monsky::selmer_rank(n);
        std::optional<OracleFailure> f;
        if (o.dimension == s2 && o.closed && o.contains_torsion)
            return f;
        OracleFailure of{ns[i], o.dimension, s2, ""};
        auto ker = kernel_span(n);
        std::set<std::string> found;
        for (const auto &c : o.classes)
            found.insert(monsky::encode_pair(c, n).to_string());
        auto places = descent::place_set(n);
        for (const auto &bits : ker) {
            if (found.count(bits))
                continue;
            gf2::BitVector v(bits.size());
            for (std::size_t k = 0; k < bits.size(); ++k)
                v.set(k, bits[k] == '1');
            auto lam = monsky::decode_vector(v, n);
            auto curve = descent::curve_for(n, lam);
            for (i64 pl : places)
                if (!descent::locally_solvable(curve, pl)) {
                    of.detail = "kernel class " + class_text(lam) + " not solvable at " + arith::place_name(pl);
                    break;
                }
            break;
        }
        if (of.detail.empty())
            for (const auto &c : o.classes)
                if (!ker.count(monsky::encode_pair(c, n).to_string())) {
                    of.detail = "solvable class " + class_text(c) + " outside ker M_n";
                    break;
                }
        if (!o.closed)
            of.detail += " (solvable set not a subgroup)";
        if (!o.contains_torsion)
            of.detail += " (torsion missing)";
        f = of;
        return f;
    });
    std::vector<OracleFailure> out;
    for (auto &f : res)
        if (f)
            out.push_back(*f);
    return out;
}

std::vector<i64> scan_torsion(i64 max_n, unsigned jobs)
{
    std::vector<i64> ns;
    for (i64 m : squarefree_upto(max_n)) {
        ns.push_back(m);
        ns.push_back(-m);
    }
    auto bad = parallel_map<char>(ns.size(), jobs, [&](std::size_t i) -> char {
        SquarefreeInteger n = arith::factor_squarefree(ns[i]);
        auto M = monsky::build_monsky(n);
        for (const auto &c : monsky::torsion_classes(n))
            if (!(M.matrix * monsky::encode_pair(c, n)).is_zero())
                return 1;
        return 0;
    });
    std::vector<i64> out;
    for (std::size_t i = 0; i < ns.size(); ++i)
        if (bad[i])
            out.push_back(ns[i]);
    return out;
}

double fk_density(int k, bool negative)
{
    auto eta = [](int upto) {
        long double p = 1;
        for (int i = 1; i <= upto; ++i)
            p *= 1 - std::pow(2.0L, -i);
        return p;
    };
    long double inf = eta(200);
    if (negative)
        return static_cast<double>(inf / (std::pow(2.0L, k * k) * eta(k) * eta(k)));
    return static_cast<double>(inf / (std::pow(2.0L, k * (k + 1)) * eta(k) * eta(k + 1)));
}

DensityReport scan_r4_density(i64 max_abs_d, bool negative)
{
    DensityReport r;
    r.population = std::string(negative ? "negative" : "positive") + " fundamental discriminants with |D| <= " +
                   std::to_string(max_abs_d);
    std::vector<u64> counts(4, 0);
    for (const auto &d : classgroup::fundamental_discriminants(max_abs_d, negative)) {
        int r4 = classgroup::r4(classgroup::quadratic_field(d.d, d.odd_primes));
        counts[static_cast<std::size_t>(std::min(r4, 3))]++;
        r.size++;
    }
    r.hits = counts[0];
    r.buckets = {{"r4=0", counts[0]}, {"r4=1", counts[1]}, {"r4=2", counts[2]}, {"r4>=3", counts[3]}};
    // the quoted figure for real fields is half of the imaginary one
    r.target = negative ? fk_density(0, true) : fk_density(0, true) / 2;
    r.tolerance = 0.015;
    finish(r);
    return r;
}

std::vector<RedeiFailure> scan_class_groups(i64 max_abs_d, unsigned jobs)
{
    auto ds = classgroup::fundamental_discriminants(max_abs_d, true);
    auto res = parallel_map<std::optional<RedeiFailure>>(ds.size(), jobs, [&](std::size_t i) {
        auto k = classgroup::quadratic_field(ds[i].d, ds[i].odd_primes);
        auto g = classgroup::forms_class_group(ds[i].D);
        RedeiFailure f{ds[i].D, classgroup::r2(k), classgroup::r4(k), g.r2, g.r4};
        std::optional<RedeiFailure> out;
        if (f.redei_r2 != f.forms_r2 || f.redei_r4 != f.forms_r4)
            out = f;
        return out;
    });
    std::vector<RedeiFailure> out;
    for (auto &f : res)
        if (f)
            out.push_back(*f);
    return out;
}

const char *population_name(Population p)
{
    switch (p) {
    case Population::F5: return "F5";
    case Population::F11: return "F11";
    case Population::Cor15: return "Cor15";
    case Population::Cor16: return "Cor16";
    }
    return "?";
}

CertificationScan scan_certification(Population pop, i64 max_n, unsigned jobs, u64 seed)
{
    Theta th = pop == Population::F5 || pop == Population::Cor15 ? Theta::Pi3 : Theta::TwoPi3;
    std::vector<i64> ms;
    for (i64 m : squarefree_upto(max_n)) {
        if (m == 1 || m == 2 || m == 3 || m == 6)
            continue;
        bool in = false;
        if (pop == Population::F5)
            in = cassels::pq_roles(m, cassels::Family::F5).has_value();
        else if (pop == Population::F11)
            in = cassels::pq_roles(m, cassels::Family::F11).has_value();
        else
            in = cassels::in_r4_corollary_class(m, th);
        if (in)
            ms.push_back(m);
    }
    struct Outcome {
        cassels::CertificateKind kind = cassels::CertificateKind::Unknown;
        int r4 = 0;
        bool disagree = false;
    };
    auto res = parallel_map<Outcome>(ms.size(), jobs, [&](std::size_t i) {
        auto c = cassels::certify(ms[i], th, seed);
        Outcome o;
        o.kind = c.kind;
        o.r4 = c.r4;
        o.disagree = c.evidence.contains("routes_agree") && !c.evidence["routes_agree"].get<bool>();
        return o;
    });

    CertificationScan s;
    DensityReport &r = s.report;
    r.population = std::string(population_name(pop)) + " with m <= " + std::to_string(max_n);
    std::vector<std::pair<std::string, u64>> kinds;
    auto bump = [&](const std::string &k) {
        for (auto &e : kinds)
            if (e.first == k) {
                e.second++;
                return;
            }
        kinds.push_back({k, 1});
    };
    u64 r4zero = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const Outcome &o = res[i];
        r.size++;
        bump(cassels::kind_name(o.kind));
        if (cassels::is_non_congruence(o.kind))
            r.hits++;
        if (o.disagree)
            s.disagreements.push_back(ms[i]);
        if (pop == Population::Cor15 || pop == Population::Cor16) {
            if (o.r4 == 0) {
                r4zero++;
                if (o.kind != cassels::CertificateKind::RankZero_S2eq2)
                    s.failures.push_back(ms[i]);
            }
        }
    }
    std::sort(kinds.begin(), kinds.end());
    r.buckets = kinds;
    r.at_least = true;
    if (pop == Population::F5 || pop == Population::F11) {
        r.target = 0.75;
        r.tolerance = 0.03;
    } else {
        r.buckets.push_back({"r4=0", r4zero});
        r.target = r.size ? static_cast<double>(r4zero) / static_cast<double>(r.size) : 0.0;
        r.tolerance = 0.0;
    }
    finish(r);
    if (!s.failures.empty())
        r.pass = false;
    return s;
}

} // namespace tiling::survey
