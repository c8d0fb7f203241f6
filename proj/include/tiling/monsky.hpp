#pragma once

#include <array>
#include <string>
#include <vector>

#include "tiling/arith.hpp"
#include "tiling/gf2.hpp"

namespace tiling::monsky {

using arith::SquarefreeInteger;
using gf2::BitMatrix;
using gf2::BitVector;

enum class Template { A1, A2, A3, A4, A5, A6, B1, B2, C1, C2, C3, C4, C5, C6, D1, D2 };
inline constexpr std::size_t kTemplateCount = 16;

const char *template_name(Template t);
Template template_from_name(const std::string &s);

// Layout table of a template: one string per grid row, eight cells each
// (six scalar columns, then the y block and the x block). Cell grammar:
//   0, 1, O        constants / zero block
//   [d]            the symbol [d/ntilde]
//   rd, rd'        the row r_d, and its transpose as a column
//   Dd, A          diag(r_d) and the Redei-type matrix of ntilde
//   x+y            sums of any of the above
const std::vector<std::string> &template_layout(Template t);

struct Blocks {
    std::vector<i64> primes;
    BitMatrix A;

    int t() const { return static_cast<int>(primes.size()); }
    BitVector r(i64 d) const;
    BitMatrix D(i64 d) const;
};

Blocks build_blocks(const SquarefreeInteger &n);

struct MonskyMatrix {
    SquarefreeInteger n;
    Template tmpl;
    BitMatrix matrix;
    std::vector<std::string> column_labels;
};

Template select_template(const SquarefreeInteger &n);
MonskyMatrix build_monsky(const SquarefreeInteger &n);
// Evaluate an arbitrary layout table for n (used by tests and selfcheck probes).
BitMatrix evaluate_layout(const std::vector<std::string> &rows, const SquarefreeInteger &n);

int selmer_rank(const SquarefreeInteger &n);
int selmer_rank(const MonskyMatrix &m);

struct TwoCoverClass {
    i64 b1 = 1;
    i64 b2 = 1;
    bool operator==(const TwoCoverClass &) const = default;
};

BitVector encode_pair(i64 b1, i64 b2, const SquarefreeInteger &n);
BitVector encode_pair(const TwoCoverClass &c, const SquarefreeInteger &n);
TwoCoverClass decode_vector(const BitVector &v, const SquarefreeInteger &n);
TwoCoverClass multiply(const TwoCoverClass &a, const TwoCoverClass &b);

// Images of O, (0,0), (n,0), (-3n,0).
std::array<TwoCoverClass, 4> torsion_classes(const SquarefreeInteger &n);
std::vector<BitVector> selmer_kernel(const MonskyMatrix &m);
std::vector<TwoCoverClass> selmer_basis(const SquarefreeInteger &n);

enum class Theta { Pi3, TwoPi3 };
enum class Parity { Even, Odd };

const char *theta_name(Theta th);
// The curve parameter analysed for (m, theta): m for pi/3, -m for 2pi/3.
i64 curve_parameter(i64 m, Theta th);
Parity predicted_parity(i64 m, Theta th);
const char *parity_name(Parity p);

} // namespace tiling::monsky
