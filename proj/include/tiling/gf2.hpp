#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tiling/arith.hpp"

namespace tiling::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len);
    static BitVector from_bits(const std::vector<int> &bits);
    static BitVector ones(std::size_t len);

    std::size_t size() const { return len_; }
    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    void set(std::size_t i, bool v);
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word(1) << (i % kWordBits); }

    bool is_zero() const;
    std::size_t popcount() const;
    F2 dot(const BitVector &o) const;
    BitVector &operator^=(const BitVector &o);
    BitVector operator+(const BitVector &o) const;
    bool operator==(const BitVector &o) const { return len_ == o.len_ && words_ == o.words_; }
    bool operator<(const BitVector &o) const; // lexicographic by index 0 first

    BitVector slice(std::size_t from, std::size_t count) const;
    std::string to_string() const;

    const std::vector<Word> &words() const { return words_; }
    std::vector<Word> &words() { return words_; }

private:
    std::size_t len_ = 0;
    std::vector<Word> words_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);
    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(const std::vector<std::vector<int>> &rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const
    {
        return (bits_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v);
    void flip(std::size_t r, std::size_t c) { bits_[r * stride_ + c / kWordBits] ^= Word(1) << (c % kWordBits); }

    BitVector row(std::size_t r) const;
    void set_row(std::size_t r, const BitVector &v);
    BitVector column(std::size_t c) const;

    BitMatrix operator+(const BitMatrix &o) const;
    BitMatrix operator*(const BitMatrix &o) const;
    BitVector operator*(const BitVector &v) const; // M v, v as column
    bool operator==(const BitMatrix &o) const;

    BitMatrix transpose() const;
    BitMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    bool is_zero() const;

    std::string to_string() const;

    std::size_t stride() const { return stride_; }
    const Word *row_words(std::size_t r) const { return bits_.data() + r * stride_; }
    Word *row_words(std::size_t r) { return bits_.data() + r * stride_; }

private:
    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<Word> bits_;
};

std::size_t rank(const BitMatrix &m);
// Reduced row echelon form; pivot columns returned in order.
BitMatrix rref(const BitMatrix &m, std::vector<std::size_t> *pivots = nullptr);
std::vector<BitVector> kernel_basis(const BitMatrix &m);
std::optional<BitVector> solve(const BitMatrix &m, const BitVector &v);

BitMatrix outer_product(const BitVector &u, const BitVector &v);
BitMatrix diag(const BitVector &v);
BitVector row_sum(const BitMatrix &m); // M e^T as a column vector (length rows)
BitVector col_sum(const BitMatrix &m); // e M as a row vector (length cols)
BitMatrix hstack(const BitMatrix &a, const BitMatrix &b);
BitMatrix vstack(const BitMatrix &a, const BitMatrix &b);
BitMatrix row_matrix(const BitVector &v);
BitMatrix column_matrix(const BitVector &v);

// One cell of a block layout. Zero cells take their size from the grid.
struct ZeroCell {};
using Cell = std::variant<ZeroCell, F2, BitMatrix>;
using Layout = std::vector<std::vector<Cell>>;

BitMatrix block_assemble(const Layout &layout);

} // namespace tiling::gf2
