#include "tiling/gf2.hpp"

#include <algorithm>
#include <bit>

namespace tiling::gf2 {

namespace {

std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

} // namespace

BitVector::BitVector(std::size_t len) : len_(len), words_(words_for(len), 0) {}

BitVector BitVector::from_bits(const std::vector<int> &bits)
{
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        v.set(i, bits[i] & 1);
    return v;
}

BitVector BitVector::ones(std::size_t len)
{
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i)
        v.set(i, true);
    return v;
}

void BitVector::set(std::size_t i, bool v)
{
    Word bit = Word(1) << (i % kWordBits);
    if (v)
        words_[i / kWordBits] |= bit;
    else
        words_[i / kWordBits] &= ~bit;
}

bool BitVector::is_zero() const
{
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

std::size_t BitVector::popcount() const
{
    std::size_t c = 0;
    for (Word w : words_)
        c += std::popcount(w);
    return c;
}

F2 BitVector::dot(const BitVector &o) const
{
    if (o.len_ != len_)
        throw Error(ErrorKind::DimensionMismatch, "dot product of vectors of different length");
    Word acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
        acc ^= words_[i] & o.words_[i];
    return static_cast<F2>(std::popcount(acc) & 1);
}

BitVector &BitVector::operator^=(const BitVector &o)
{
    if (o.len_ != len_)
        throw Error(ErrorKind::DimensionMismatch, "sum of vectors of different length");
    for (std::size_t i = 0; i < words_.size(); ++i)
        words_[i] ^= o.words_[i];
    return *this;
}

BitVector BitVector::operator+(const BitVector &o) const
{
    BitVector r = *this;
    r ^= o;
    return r;
}

bool BitVector::operator<(const BitVector &o) const
{
    if (len_ != o.len_)
        return len_ < o.len_;
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i) != o.get(i))
            return !get(i);
    return false;
}

BitVector BitVector::slice(std::size_t from, std::size_t count) const
{
    BitVector r(count);
    for (std::size_t i = 0; i < count; ++i)
        r.set(i, get(from + i));
    return r;
}

std::string BitVector::to_string() const
{
    std::string s;
    for (std::size_t i = 0; i < len_; ++i)
        s.push_back(get(i) ? '1' : '0');
    return s;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), bits_(rows * words_for(cols), 0)
{
}

BitMatrix BitMatrix::identity(std::size_t n)
{
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>> &rows)
{
    std::size_t nc = rows.empty() ? 0 : rows[0].size();
    BitMatrix m(rows.size(), nc);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != nc)
            throw Error(ErrorKind::RaggedLayout, "rows of different length");
        for (std::size_t c = 0; c < nc; ++c)
            m.set(r, c, rows[r][c] & 1);
    }
    return m;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v)
{
    Word bit = Word(1) << (c % kWordBits);
    Word &w = bits_[r * stride_ + c / kWordBits];
    if (v)
        w |= bit;
    else
        w &= ~bit;
}

BitVector BitMatrix::row(std::size_t r) const
{
    BitVector v(cols_);
    std::copy(row_words(r), row_words(r) + stride_, v.words().begin());
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector &v)
{
    if (v.size() != cols_)
        throw Error(ErrorKind::DimensionMismatch, "row length");
    std::copy(v.words().begin(), v.words().end(), row_words(r));
}

BitVector BitMatrix::column(std::size_t c) const
{
    BitVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        v.set(r, get(r, c));
    return v;
}

BitMatrix BitMatrix::operator+(const BitMatrix &o) const
{
    if (o.rows_ != rows_ || o.cols_ != cols_)
        throw Error(ErrorKind::DimensionMismatch, "matrix sum");
    BitMatrix r = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        r.bits_[i] ^= o.bits_[i];
    return r;
}

BitMatrix BitMatrix::operator*(const BitMatrix &o) const
{
    if (cols_ != o.rows_)
        throw Error(ErrorKind::DimensionMismatch, "matrix product");
    BitMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        Word *dst = r.row_words(i);
        for (std::size_t k = 0; k < cols_; ++k) {
            if (!get(i, k))
                continue;
            const Word *src = o.row_words(k);
            for (std::size_t w = 0; w < r.stride_; ++w)
                dst[w] ^= src[w];
        }
    }
    return r;
}

BitVector BitMatrix::operator*(const BitVector &v) const
{
    if (v.size() != cols_)
        throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    BitVector r(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        Word acc = 0;
        const Word *src = row_words(i);
        for (std::size_t w = 0; w < stride_; ++w)
            acc ^= src[w] & v.words()[w];
        r.set(i, std::popcount(acc) & 1);
    }
    return r;
}

bool BitMatrix::operator==(const BitMatrix &o) const
{
    return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_;
}

BitMatrix BitMatrix::transpose() const
{
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c))
                t.set(c, r, true);
    return t;
}

BitMatrix BitMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
{
    if (r0 + nr > rows_ || c0 + nc > cols_)
        throw Error(ErrorKind::DimensionMismatch, "block out of range");
    BitMatrix b(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c)
            if (get(r0 + r, c0 + c))
                b.set(r, c, true);
    return b;
}

bool BitMatrix::is_zero() const
{
    return std::all_of(bits_.begin(), bits_.end(), [](Word w) { return w == 0; });
}

std::string BitMatrix::to_string() const
{
    std::string s;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c)
            s.push_back(get(r, c) ? '1' : '0');
        s.push_back('\n');
    }
    return s;
}

BitMatrix rref(const BitMatrix &m, std::vector<std::size_t> *pivots)
{
    BitMatrix a = m;
    std::size_t stride = a.stride();
    std::size_t r = 0;
    if (pivots)
        pivots->clear();
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t p = r;
        while (p < a.rows() && !a.get(p, c))
            ++p;
        if (p == a.rows())
            continue;
        if (p != r)
            std::swap_ranges(a.row_words(p), a.row_words(p) + stride, a.row_words(r));
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i != r && a.get(i, c)) {
                Word *dst = a.row_words(i);
                const Word *src = a.row_words(r);
                for (std::size_t w = c / kWordBits; w < stride; ++w)
                    dst[w] ^= src[w];
            }
        }
        if (pivots)
            pivots->push_back(c);
        ++r;
    }
    return a;
}

std::size_t rank(const BitMatrix &m)
{
    std::vector<std::size_t> piv;
    rref(m, &piv);
    return piv.size();
}

std::vector<BitVector> kernel_basis(const BitMatrix &m)
{
    std::vector<std::size_t> piv;
    BitMatrix r = rref(m, &piv);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : piv)
        is_pivot[c] = true;
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        BitVector v(m.cols());
        v.set(f, true);
        for (std::size_t i = 0; i < piv.size(); ++i)
            if (r.get(i, f))
                v.set(piv[i], true);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitVector> solve(const BitMatrix &m, const BitVector &v)
{
    if (v.size() != m.rows())
        throw Error(ErrorKind::DimensionMismatch, "right-hand side length");
    BitMatrix aug = hstack(m, column_matrix(v));
    std::vector<std::size_t> piv;
    BitMatrix r = rref(aug, &piv);
    if (!piv.empty() && piv.back() == m.cols())
        return std::nullopt;
    BitVector u(m.cols());
    for (std::size_t i = 0; i < piv.size(); ++i)
        if (r.get(i, m.cols()))
            u.set(piv[i], true);
    return u;
}

BitMatrix outer_product(const BitVector &u, const BitVector &v)
{
    BitMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.get(i))
            m.set_row(i, v);
    return m;
}

BitMatrix diag(const BitVector &v)
{
    BitMatrix m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        m.set(i, i, v.get(i));
    return m;
}

BitVector row_sum(const BitMatrix &m)
{
    return m * BitVector::ones(m.cols());
}

BitVector col_sum(const BitMatrix &m)
{
    BitVector s(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        s ^= m.row(r);
    return s;
}

BitMatrix hstack(const BitMatrix &a, const BitMatrix &b)
{
    if (a.rows() != b.rows())
        throw Error(ErrorKind::DimensionMismatch, "hstack row counts");
    BitMatrix m(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a.get(r, c))
                m.set(r, c, true);
        for (std::size_t c = 0; c < b.cols(); ++c)
            if (b.get(r, c))
                m.set(r, a.cols() + c, true);
    }
    return m;
}

BitMatrix vstack(const BitMatrix &a, const BitMatrix &b)
{
    if (a.cols() != b.cols())
        throw Error(ErrorKind::DimensionMismatch, "vstack column counts");
    BitMatrix m(a.rows() + b.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        m.set_row(r, a.row(r));
    for (std::size_t r = 0; r < b.rows(); ++r)
        m.set_row(a.rows() + r, b.row(r));
    return m;
}

BitMatrix row_matrix(const BitVector &v)
{
    BitMatrix m(1, v.size());
    m.set_row(0, v);
    return m;
}

BitMatrix column_matrix(const BitVector &v)
{
    BitMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        m.set(i, 0, v.get(i));
    return m;
}

BitMatrix block_assemble(const Layout &layout)
{
    std::size_t gr = layout.size();
    std::size_t gc = gr ? layout[0].size() : 0;
    std::vector<std::optional<std::size_t>> heights(gr), widths(gc);
    auto fix = [](std::optional<std::size_t> &slot, std::size_t v, const char *what) {
        if (slot && *slot != v)
            throw Error(ErrorKind::RaggedLayout, std::string("inconsistent ") + what);
        slot = v;
    };
    for (std::size_t i = 0; i < gr; ++i) {
        if (layout[i].size() != gc)
            throw Error(ErrorKind::RaggedLayout, "grid rows of different length");
        for (std::size_t j = 0; j < gc; ++j) {
            const Cell &cell = layout[i][j];
            if (std::holds_alternative<F2>(cell)) {
                fix(heights[i], 1, "block height");
                fix(widths[j], 1, "block width");
            } else if (auto *m = std::get_if<BitMatrix>(&cell)) {
                fix(heights[i], m->rows(), "block height");
                fix(widths[j], m->cols(), "block width");
            }
        }
    }
    std::vector<std::size_t> roff(gr + 1, 0), coff(gc + 1, 0);
    for (std::size_t i = 0; i < gr; ++i) {
        if (!heights[i])
            throw Error(ErrorKind::RaggedLayout, "grid row " + std::to_string(i) + " has no sized cell");
        roff[i + 1] = roff[i] + *heights[i];
    }
    for (std::size_t j = 0; j < gc; ++j) {
        if (!widths[j])
            throw Error(ErrorKind::RaggedLayout, "grid column " + std::to_string(j) + " has no sized cell");
        coff[j + 1] = coff[j] + *widths[j];
    }
    BitMatrix out(roff[gr], coff[gc]);
    for (std::size_t i = 0; i < gr; ++i) {
        for (std::size_t j = 0; j < gc; ++j) {
            const Cell &cell = layout[i][j];
            if (auto *s = std::get_if<F2>(&cell)) {
                out.set(roff[i], coff[j], *s & 1);
            } else if (auto *m = std::get_if<BitMatrix>(&cell)) {
                for (std::size_t r = 0; r < m->rows(); ++r)
                    for (std::size_t c = 0; c < m->cols(); ++c)
                        if (m->get(r, c))
                            out.set(roff[i] + r, coff[j] + c, true);
            }
        }
    }
    return out;
}

} // namespace tiling::gf2
