#include "tiling/monsky.hpp"

#include <cctype>
#include <numeric>
#include <sstream>

namespace tiling::monsky {

namespace {

using Rows = std::vector<std::string>;

// Block rows shared by the templates of each eta.
#define BLOCK_ROWS(X, Y) "O O O r-1' r2' r3' D-3 " X, "r-1' r2' r3' O O O " Y " O"

const Rows kA1 = {
    "1 0 0 1 0 0 O O",
    "0 1 0 1 0 1 O r-1",
    "0 0 0 0 1 0 O O",
    "1 1 1 0 0 1 r-1 r2",
    "1 1 0 0 0 1+[-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A", "A+D-1"),
};
const Rows kA2 = {
    "1 0 0 1 0 0 O O",
    "0 0 0 0 1 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 1 0 1 O r-1",
    "1 1 0 0 0 1+[-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A", "A+D-1"),
};
const Rows kA3 = {
    "1 0 0 1 0 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "1 0 1 0 0 0 r-1 O",
    "1 1 0 0 0 1+[-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A", "A+D-1"),
};
const Rows kB1 = {
    "1 0 0 1 0 0 O O",
    "0 0 0 1 [-1] 1 O r-1",
    "0 1 0 0 [2] 1 O r2",
    "1 1 0 0 0 [-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A+D2", "A+D-2"),
};
const Rows kC1 = {
    "1 0 0 1 0 0 O O",
    "0 1 0 1 0 1 O r-1",
    "0 0 0 0 1 0 O O",
    "1 1 1 0 0 1 r-1 r2",
    "1 1 1+[-3] 0 0 0 r-3 O",
    "0 0 1+[-3] 1 1 [-3] O r-3",
    BLOCK_ROWS("A+D3", "A+D-3"),
};
const Rows kC2 = {
    "1 0 0 1 0 0 O O",
    "0 0 0 0 1 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 1 0 1 O r-1",
    "1 1 1+[-3] 0 0 0 r-3 O",
    "0 0 1+[-3] 1 1 [-3] O r-3",
    BLOCK_ROWS("A+D3", "A+D-3"),
};
const Rows kC3 = {
    "1 0 0 1 0 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "1 0 1 0 0 0 r-1 O",
    "1 1 1+[-3] 0 0 0 r-3 O",
    "0 0 1+[-3] 1 1 [-3] O r-3",
    BLOCK_ROWS("A+D3", "A+D-3"),
};
const Rows kD1 = {
    "1 0 0 1 0 0 O O",
    "0 0 0 1 1+[-1] 1 O r-1",
    "0 1 0 0 1+[2] 1 O r2",
    "1 1 [-3] 0 0 0 r-3 O",
    "0 0 [-3] 1 1 1+[-3] O r-3",
    BLOCK_ROWS("A+D6", "A+D-6"),
};
const Rows kA4 = {
    "1 0 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 1 0 1 O r-1",
    "1 1 0 0 0 [-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A+D-1", "A"),
};
const Rows kA5 = {
    "1 0 0 0 0 0 O O",
    "0 1 0 1 0 1 O r-1",
    "0 0 0 0 1 0 O O",
    "1 1 1 0 0 1 r-1 r2",
    "1 1 0 0 0 [-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A+D-1", "A"),
};
const Rows kA6 = {
    "1 0 0 0 0 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "1 0 1 0 0 0 r-1 O",
    "1 1 0 0 0 [-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A+D-1", "A"),
};
const Rows kB2 = {
    "1 0 0 0 0 0 O O",
    "0 0 0 1 1+[-1] 1 O r-1",
    "0 1 0 0 [2] 1 O r2",
    "1 1 0 0 0 1+[-3] r-3 O",
    "0 0 1 0 0 0 O O",
    BLOCK_ROWS("A+D-2", "A+D2"),
};
const Rows kC4 = {
    "1 0 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 1 0 1 O r-1",
    "1 1 [-3] 0 0 0 r-3 O",
    "0 0 [-3] 1 1 1+[-3] O r-3",
    BLOCK_ROWS("A+D-3", "A+D3"),
};
const Rows kC5 = {
    "1 0 0 0 0 0 O O",
    "0 1 0 1 0 1 O r-1",
    "0 0 0 0 1 0 O O",
    "1 1 1 0 0 1 r-1 r2",
    "1 1 [-3] 0 0 0 r-3 O",
    "0 0 [-3] 1 1 1+[-3] O r-3",
    BLOCK_ROWS("A+D-3", "A+D3"),
};
const Rows kC6 = {
    "1 0 0 0 0 0 O O",
    "0 1 0 0 0 0 O O",
    "0 0 0 0 1 0 O O",
    "1 0 1 0 0 0 r-1 O",
    "1 1 [-3] 0 0 0 r-3 O",
    "0 0 [-3] 1 1 1+[-3] O r-3",
    BLOCK_ROWS("A+D-3", "A+D3"),
};
const Rows kD2 = {
    "1 0 0 0 0 0 O O",
    "0 0 0 1 [-1] 1 O r-1",
    "0 1 0 0 1+[2] 1 O r2",
    "1 1 1+[-3] 0 0 0 r-3 O",
    "0 0 1+[-3] 1 1 [-3] O r-3",
    BLOCK_ROWS("A+D-6", "A+D6"),
};

#undef BLOCK_ROWS

const char *kNames[] = {"A1", "A2", "A3", "A4", "A5", "A6", "B1", "B2",
                        "C1", "C2", "C3", "C4", "C5", "C6", "D1", "D2"};

enum class TermKind { Const, Symbol, Row, Col, Diag, RedeiA };

struct Term {
    TermKind kind;
    i64 d = 0; // symbol / r / D argument; constant value for Const
};

std::vector<Term> parse_cell(const std::string &cell)
{
    std::vector<Term> terms;
    std::stringstream ss(cell);
    std::string tok;
    auto bad = [&] { return Error(ErrorKind::RaggedLayout, "bad layout cell '" + cell + "'"); };
    while (std::getline(ss, tok, '+')) {
        if (tok.empty())
            throw bad();
        if (tok == "0" || tok == "O")
            continue;
        if (tok == "1") {
            terms.push_back({TermKind::Const, 1});
        } else if (tok == "A") {
            terms.push_back({TermKind::RedeiA, 0});
        } else if (tok.front() == '[' && tok.back() == ']') {
            terms.push_back({TermKind::Symbol, std::stoll(tok.substr(1, tok.size() - 2))});
        } else if (tok.front() == 'r') {
            bool col = tok.back() == '\'';
            std::string num = tok.substr(1, tok.size() - 1 - (col ? 1 : 0));
            terms.push_back({col ? TermKind::Col : TermKind::Row, std::stoll(num)});
        } else if (tok.front() == 'D') {
            terms.push_back({TermKind::Diag, std::stoll(tok.substr(1))});
        } else {
            throw bad();
        }
    }
    return terms;
}

std::vector<std::string> split_ws(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (ss >> tok)
        out.push_back(tok);
    return out;
}

bool is_block_row(const std::vector<std::vector<Term>> &cells)
{
    for (const auto &c : cells)
        for (const auto &t : c)
            if (t.kind == TermKind::Col || t.kind == TermKind::Diag || t.kind == TermKind::RedeiA)
                return true;
    return false;
}

// Exponent vector of b over (-1, 2, 3, p_1..p_t); throws if another prime occurs.
void exponents(i64 b, const SquarefreeInteger &n, int &sgn, int &e2, int &e3, std::vector<int> &ep)
{
    if (b == 0)
        throw Error(ErrorKind::ZeroArgument, "class component is zero");
    sgn = b < 0;
    i64 m = b < 0 ? -b : b;
    auto strip = [&](i64 p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        return e & 1;
    };
    e2 = strip(2);
    e3 = strip(3);
    ep.assign(n.odd_primes.size(), 0);
    for (std::size_t i = 0; i < n.odd_primes.size(); ++i)
        ep[i] = strip(n.odd_primes[i]);
    if (m != 1) {
        i64 r = static_cast<i64>(__builtin_sqrtl(static_cast<long double>(m)));
        while (r * r > m)
            --r;
        while ((r + 1) * (r + 1) <= m)
            ++r;
        if (r * r != m)
            throw Error(ErrorKind::UnsupportedPrime, std::to_string(b) + " has support outside the places of n");
    }
}

} // namespace

const char *template_name(Template t) { return kNames[static_cast<int>(t)]; }

Template template_from_name(const std::string &s)
{
    for (std::size_t i = 0; i < kTemplateCount; ++i)
        if (s == kNames[i])
            return static_cast<Template>(i);
    throw Error(ErrorKind::HypothesisFailed, "unknown template " + s);
}

const std::vector<std::string> &template_layout(Template t)
{
    switch (t) {
    case Template::A1: return kA1;
    case Template::A2: return kA2;
    case Template::A3: return kA3;
    case Template::A4: return kA4;
    case Template::A5: return kA5;
    case Template::A6: return kA6;
    case Template::B1: return kB1;
    case Template::B2: return kB2;
    case Template::C1: return kC1;
    case Template::C2: return kC2;
    case Template::C3: return kC3;
    case Template::C4: return kC4;
    case Template::C5: return kC5;
    case Template::C6: return kC6;
    case Template::D1: return kD1;
    case Template::D2: return kD2;
    }
    return kA1;
}

BitVector Blocks::r(i64 d) const
{
    BitVector v(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i)
        v.set(i, arith::legendre_additive(d, primes[i]));
    return v;
}

BitMatrix Blocks::D(i64 d) const { return gf2::diag(r(d)); }

Blocks build_blocks(const SquarefreeInteger &n)
{
    Blocks b;
    b.primes = n.odd_primes;
    std::size_t t = b.primes.size();
    b.A = BitMatrix(t, t);
    for (std::size_t i = 0; i < t; ++i) {
        bool diag = false;
        for (std::size_t j = 0; j < t; ++j) {
            if (i == j)
                continue;
            bool a = arith::legendre_additive(b.primes[j], b.primes[i]);
            b.A.set(i, j, a);
            diag ^= a;
        }
        b.A.set(i, i, diag);
    }
    return b;
}

Template select_template(const SquarefreeInteger &n)
{
    i64 r8 = n.ntilde % 8;
    switch (n.eta) {
    case 1: return r8 == 1 ? Template::A1 : r8 == 5 ? Template::A2 : Template::A3;
    case 2: return Template::B1;
    case 3: return r8 == 3 ? Template::C1 : r8 == 7 ? Template::C2 : Template::C3;
    case 6: return Template::D1;
    case -1: return r8 == 3 ? Template::A4 : r8 == 7 ? Template::A5 : Template::A6;
    case -2: return Template::B2;
    case -3: return r8 == 1 ? Template::C4 : r8 == 5 ? Template::C5 : Template::C6;
    case -6: return Template::D2;
    default: break;
    }
    throw Error(ErrorKind::HypothesisFailed, "eta out of range");
}

BitMatrix evaluate_layout(const std::vector<std::string> &rows, const SquarefreeInteger &n)
{
    Blocks blk = build_blocks(n);
    std::size_t t = blk.primes.size();
    gf2::Layout layout;
    for (const auto &row : rows) {
        auto cells_txt = split_ws(row);
        if (cells_txt.size() != 8)
            throw Error(ErrorKind::RaggedLayout, "layout row needs 8 cells: '" + row + "'");
        std::vector<std::vector<Term>> cells;
        for (const auto &c : cells_txt)
            cells.push_back(parse_cell(c));
        bool block = is_block_row(cells);
        std::vector<gf2::Cell> out;
        for (std::size_t j = 0; j < 8; ++j) {
            const auto &terms = cells[j];
            bool scalar_col = j < 6;
            if (terms.empty()) {
                if (!block && scalar_col)
                    out.emplace_back(F2(0));
                else
                    out.emplace_back(gf2::ZeroCell{});
                continue;
            }
            if (!block && scalar_col) {
                F2 s = 0;
                for (const auto &tm : terms) {
                    if (tm.kind == TermKind::Const)
                        s ^= static_cast<F2>(tm.d & 1);
                    else if (tm.kind == TermKind::Symbol)
                        s ^= arith::jacobi_additive(tm.d, blk.primes);
                    else
                        throw Error(ErrorKind::RaggedLayout, "non-scalar term in scalar cell: " + row);
                }
                out.emplace_back(s);
            } else if (!block) {
                BitVector v(t);
                for (const auto &tm : terms) {
                    if (tm.kind != TermKind::Row)
                        throw Error(ErrorKind::RaggedLayout, "expected row vector: " + row);
                    v ^= blk.r(tm.d);
                }
                out.emplace_back(gf2::row_matrix(v));
            } else if (scalar_col) {
                BitVector v(t);
                for (const auto &tm : terms) {
                    if (tm.kind != TermKind::Col)
                        throw Error(ErrorKind::RaggedLayout, "expected column vector: " + row);
                    v ^= blk.r(tm.d);
                }
                out.emplace_back(gf2::column_matrix(v));
            } else {
                BitMatrix m(t, t);
                for (const auto &tm : terms) {
                    if (tm.kind == TermKind::RedeiA)
                        m = m + blk.A;
                    else if (tm.kind == TermKind::Diag)
                        m = m + blk.D(tm.d);
                    else
                        throw Error(ErrorKind::RaggedLayout, "expected matrix block: " + row);
                }
                out.emplace_back(m);
            }
        }
        layout.push_back(std::move(out));
    }
    return gf2::block_assemble(layout);
}

MonskyMatrix build_monsky(const SquarefreeInteger &n)
{
    MonskyMatrix m;
    m.n = n;
    m.tmpl = select_template(n);
    m.matrix = evaluate_layout(template_layout(m.tmpl), n);
    m.column_labels = {"xi1", "xi2", "xi3", "gamma1", "gamma2", "gamma3"};
    for (int i = 1; i <= n.t(); ++i)
        m.column_labels.push_back("y" + std::to_string(i));
    for (int i = 1; i <= n.t(); ++i)
        m.column_labels.push_back("x" + std::to_string(i));
    return m;
}

int selmer_rank(const MonskyMatrix &m)
{
    return 2 * m.n.t() + 6 - static_cast<int>(gf2::rank(m.matrix));
}

int selmer_rank(const SquarefreeInteger &n) { return selmer_rank(build_monsky(n)); }

BitVector encode_pair(i64 b1, i64 b2, const SquarefreeInteger &n)
{
    std::size_t t = n.odd_primes.size();
    BitVector v(2 * t + 6);
    int s, e2, e3;
    std::vector<int> ep;
    exponents(b2, n, s, e2, e3, ep);
    v.set(0, s);
    v.set(1, e2);
    v.set(2, e3);
    for (std::size_t i = 0; i < t; ++i)
        v.set(6 + i, ep[i]);
    exponents(b1, n, s, e2, e3, ep);
    v.set(3, s);
    v.set(4, e2);
    v.set(5, e3);
    for (std::size_t i = 0; i < t; ++i)
        v.set(6 + t + i, ep[i]);
    return v;
}

BitVector encode_pair(const TwoCoverClass &c, const SquarefreeInteger &n) { return encode_pair(c.b1, c.b2, n); }

TwoCoverClass decode_vector(const BitVector &v, const SquarefreeInteger &n)
{
    std::size_t t = n.odd_primes.size();
    if (v.size() != 2 * t + 6)
        throw Error(ErrorKind::DimensionMismatch, "vector length must be 2t+6");
    auto build = [&](std::size_t s, std::size_t e2, std::size_t e3, std::size_t off) {
        i64 b = 1;
        if (v.get(s))
            b = -b;
        if (v.get(e2))
            b *= 2;
        if (v.get(e3))
            b *= 3;
        for (std::size_t i = 0; i < t; ++i)
            if (v.get(off + i))
                b *= n.odd_primes[i];
        return b;
    };
    return {build(3, 4, 5, 6 + t), build(0, 1, 2, 6)};
}

TwoCoverClass multiply(const TwoCoverClass &a, const TwoCoverClass &b)
{
    auto sqfree_product = [](i64 x, i64 y) {
        i64 g = std::gcd(x, y);
        if (g < 0)
            g = -g;
        return (x / g) * (y / g);
    };
    return {sqfree_product(a.b1, b.b1), sqfree_product(a.b2, b.b2)};
}

std::array<TwoCoverClass, 4> torsion_classes(const SquarefreeInteger &n)
{
    i64 v = n.value;
    TwoCoverClass t1{-3, -v};
    TwoCoverClass t2{v, 1};
    return {TwoCoverClass{1, 1}, t1, t2, multiply(t1, t2)};
}

std::vector<BitVector> selmer_kernel(const MonskyMatrix &m) { return gf2::kernel_basis(m.matrix); }

std::vector<TwoCoverClass> selmer_basis(const SquarefreeInteger &n)
{
    std::vector<TwoCoverClass> out;
    for (const auto &v : selmer_kernel(build_monsky(n)))
        out.push_back(decode_vector(v, n));
    return out;
}

const char *theta_name(Theta th) { return th == Theta::Pi3 ? "pi3" : "2pi3"; }

i64 curve_parameter(i64 m, Theta th) { return th == Theta::Pi3 ? m : -m; }

Parity predicted_parity(i64 m, Theta th)
{
    static const int even_pi3[] = {1, 2, 3, 5, 7, 9, 14, 15, 19};
    static const int even_2pi3[] = {1, 2, 3, 6, 7, 11, 13, 14, 18};
    if (m <= 0)
        throw Error(ErrorKind::HypothesisFailed, "parity table needs m > 0");
    int r = static_cast<int>(m % 24);
    const int *tab = th == Theta::Pi3 ? even_pi3 : even_2pi3;
    for (int i = 0; i < 9; ++i)
        if (tab[i] == r)
            return Parity::Even;
    return Parity::Odd;
}

const char *parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

} // namespace tiling::monsky
