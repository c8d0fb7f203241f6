#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tiling/arith.hpp"
#include "tiling/cassels.hpp"
#include "tiling/monsky.hpp"

namespace tiling::survey {

using arith::SquarefreeInteger;
using monsky::Parity;
using monsky::Theta;
using nlohmann::ordered_json;

// Runs f(0..count-1) on `jobs` threads; results land at their own index so the
// output never depends on scheduling. The lowest-index exception is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned jobs, F f)
{
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errs(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    if (jobs <= 1 || count < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }
    for (auto &e : errs)
        if (e)
            std::rethrow_exception(e);
    return out;
}

struct SurveyRow {
    i64 n = 0; // curve parameter: m for pi/3, -m for 2pi/3
    Theta theta = Theta::Pi3;
    i64 eta = 1;
    i64 ntilde = 1;
    int t = 0;
    int residue24 = 0; // m mod 24
    std::string tmpl;
    int s2 = 0;
    Parity parity_predicted = Parity::Even;
    bool parity_ok = true;
    int r4 = 0;
    std::string certificate_kind;
    bool oracle_checked = false;

    std::optional<int> oracle_dim; // not a CSV column
};

enum class OracleSampling { None, Sampled, All };

struct ScanOptions {
    std::vector<Theta> thetas{Theta::Pi3, Theta::TwoPi3};
    unsigned jobs = 1;
    u64 seed = 0;
    bool certify = true;
    OracleSampling oracle = OracleSampling::Sampled;
};

// Every |n| <= 300, then m = 1 mod 50 up to 10^4 when t <= 4.
bool oracle_sampled(i64 m, int t);

SurveyRow analyze_row(i64 m, Theta th, const ScanOptions &opt);
// Squarefree 1 <= m <= max_m for each theta, ascending |n|, positive before negative.
std::vector<SurveyRow> survey(i64 max_m, const ScanOptions &opt);

std::string csv_header();
std::string to_csv(const SurveyRow &r);
ordered_json to_json(const SurveyRow &r);
std::string rows_csv(const std::vector<SurveyRow> &rows);
ordered_json rows_json(const std::vector<SurveyRow> &rows, const ordered_json &meta);

struct DensityReport {
    std::string population;
    std::vector<std::pair<std::string, u64>> buckets;
    u64 size = 0;
    u64 hits = 0;
    double fraction = 0;
    double target = 0;
    double tolerance = 0;
    bool at_least = false; // pass means fraction >= target - tolerance
    bool pass = false;
    bool empty = false;
};

void finish(DensityReport &r);
ordered_json to_json(const DensityReport &r);

struct ParityScan {
    DensityReport report;
    std::vector<SurveyRow> failures;
};
ParityScan scan_parity(i64 max_n, unsigned jobs = 1);

struct OracleFailure {
    i64 n = 0;
    int oracle_dim = 0;
    int s2 = 0;
    std::string detail; // offending class and place
};
// Both signs of every squarefree 1 <= |n| <= max_n.
std::vector<OracleFailure> scan_oracle(i64 max_n, unsigned jobs = 1);

// n with some torsion class outside ker M_n, both signs, |n| <= max_n.
std::vector<i64> scan_torsion(i64 max_n, unsigned jobs = 1);

// Fouvry-Kluners probability of r4 = k.
double fk_density(int k, bool negative);
// Fraction with r4 = 0 over fundamental discriminants of one sign, buckets per r4.
DensityReport scan_r4_density(i64 max_abs_d, bool negative);

struct RedeiFailure {
    i64 D = 0;
    int redei_r2 = 0, redei_r4 = 0, forms_r2 = 0, forms_r4 = 0;
};
std::vector<RedeiFailure> scan_class_groups(i64 max_abs_d, unsigned jobs = 1);

enum class Population { F5, F11, Cor15, Cor16 };
const char *population_name(Population p);

struct CertificationScan {
    DensityReport report;
    std::vector<i64> disagreements; // closed form differs from the local sum
    std::vector<i64> failures;      // Cor15/Cor16: r4(-m) = 0 members without RankZero_S2eq2
};
CertificationScan scan_certification(Population pop, i64 max_n, unsigned jobs = 1, u64 seed = 0);

} // namespace tiling::survey
