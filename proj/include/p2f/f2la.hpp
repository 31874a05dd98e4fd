#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace p2f::f2la {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}
    static BitVector from_bits(const std::vector<int>& bits);

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool v = true) {
        if (v) w_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    bool any() const;
    std::size_t popcount() const;
    bool dot(const BitVector& o) const;
    // lowest set index, or size() when zero
    std::size_t first() const;

    // concatenation and slicing keep block bookkeeping in homalg readable
    BitVector concat(const BitVector& tail) const;
    BitVector slice(std::size_t from, std::size_t len) const;

    std::vector<int> bits() const;
    std::string str() const;
    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.n_ == b.n_ && a.w_ == b.w_;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols);
    static F2Matrix identity(std::size_t n);
    static F2Matrix from_rows(const std::vector<std::vector<int>>& rows, std::size_t cols = 0);
    // columns become the matrix columns; all must share a length
    static F2Matrix from_columns(const std::vector<BitVector>& cols, std::size_t rows);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }
    void flip(std::size_t r, std::size_t c) { rows_[r].flip(c); }
    const BitVector& row(std::size_t r) const { return rows_[r]; }
    BitVector column(std::size_t c) const;

    bool is_zero() const;
    F2Matrix transpose() const;
    BitVector apply(const BitVector& v) const;
    F2Matrix& operator+=(const F2Matrix& o);
    friend F2Matrix operator+(F2Matrix a, const F2Matrix& b) { return a += b; }
    friend bool operator==(const F2Matrix& a, const F2Matrix& b) {
        return a.cols_ == b.cols_ && a.rows_ == b.rows_;
    }

    // place `block` with its top-left corner at (r0, c0)
    void paste(const F2Matrix& block, std::size_t r0, std::size_t c0);
    F2Matrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;

    std::string shape() const;
    std::vector<std::vector<int>> to_rows() const;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

std::size_t rank(const F2Matrix& m);
std::vector<BitVector> kernel_basis(const F2Matrix& m);
std::optional<BitVector> image_membership(const F2Matrix& m, const BitVector& b);
// a*b, i.e. apply b first
F2Matrix compose(const F2Matrix& a, const F2Matrix& b);

std::optional<F2Matrix> inverse(const F2Matrix& m);

F2Matrix hstack(const F2Matrix& a, const F2Matrix& b);
F2Matrix vstack(const F2Matrix& a, const F2Matrix& b);

// Incremental echelon basis of a subspace of F^n.
class Span {
public:
    explicit Span(std::size_t n) : n_(n) {}
    std::size_t ambient() const { return n_; }
    std::size_t dim() const { return basis_.size(); }
    // returns true when v was independent of the current span
    bool add(const BitVector& v);
    bool contains(const BitVector& v) const;
    BitVector reduce(BitVector v) const;
    const std::vector<BitVector>& basis() const { return basis_; }

private:
    std::size_t n_;
    std::vector<BitVector> basis_;
    std::vector<std::size_t> pivot_;
};

}  // namespace p2f::f2la
