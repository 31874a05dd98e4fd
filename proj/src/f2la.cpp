#include "p2f/f2la.hpp"

#include <bit>

#include "p2f/errors.hpp"

namespace p2f::f2la {

BitVector BitVector::from_bits(const std::vector<int>& bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1) v.set(i);
    return v;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    if (o.n_ != n_)
        throw ContractError("vector length mismatch " + std::to_string(n_) + " vs " +
                            std::to_string(o.n_));
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

bool BitVector::any() const {
    for (auto w : w_)
        if (w) return true;
    return false;
}

std::size_t BitVector::popcount() const {
    std::size_t c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
}

bool BitVector::dot(const BitVector& o) const {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
    return std::popcount(acc) & 1;
}

std::size_t BitVector::first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i]) return i * 64 + std::countr_zero(w_[i]);
    return n_;
}

BitVector BitVector::concat(const BitVector& tail) const {
    BitVector r(n_ + tail.n_);
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) r.set(i);
    for (std::size_t i = 0; i < tail.n_; ++i)
        if (tail.get(i)) r.set(n_ + i);
    return r;
}

BitVector BitVector::slice(std::size_t from, std::size_t len) const {
    if (from + len > n_) throw ContractError("slice out of range");
    BitVector r(len);
    for (std::size_t i = 0; i < len; ++i)
        if (get(from + i)) r.set(i);
    return r;
}

std::vector<int> BitVector::bits() const {
    std::vector<int> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = get(i);
    return out;
}

std::string BitVector::str() const {
    std::string s;
    for (std::size_t i = 0; i < n_; ++i) s += get(i) ? '1' : '0';
    return s;
}

F2Matrix::F2Matrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

F2Matrix F2Matrix::identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

F2Matrix F2Matrix::from_rows(const std::vector<std::vector<int>>& rows, std::size_t cols) {
    if (!rows.empty()) cols = rows.front().size();
    F2Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ContractError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            if (rows[r][c] & 1) m.set(r, c);
    }
    return m;
}

F2Matrix F2Matrix::from_columns(const std::vector<BitVector>& cols, std::size_t rows) {
    F2Matrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c].size() != rows) throw ContractError("column length mismatch");
        for (std::size_t r = 0; r < rows; ++r)
            if (cols[c].get(r)) m.set(r, c);
    }
    return m;
}

BitVector F2Matrix::column(std::size_t c) const {
    BitVector v(rows());
    for (std::size_t r = 0; r < rows(); ++r)
        if (get(r, c)) v.set(r);
    return v;
}

bool F2Matrix::is_zero() const {
    for (const auto& r : rows_)
        if (r.any()) return false;
    return true;
}

F2Matrix F2Matrix::transpose() const {
    F2Matrix t(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c)) t.set(c, r);
    return t;
}

BitVector F2Matrix::apply(const BitVector& v) const {
    if (v.size() != cols_)
        throw ContractError("apply: matrix " + shape() + " vs vector of length " +
                            std::to_string(v.size()));
    BitVector out(rows());
    for (std::size_t r = 0; r < rows(); ++r)
        if (rows_[r].dot(v)) out.set(r);
    return out;
}

F2Matrix& F2Matrix::operator+=(const F2Matrix& o) {
    if (o.rows() != rows() || o.cols_ != cols_)
        throw ContractError("add: shapes " + shape() + " and " + o.shape());
    for (std::size_t r = 0; r < rows(); ++r) rows_[r] ^= o.rows_[r];
    return *this;
}

void F2Matrix::paste(const F2Matrix& block, std::size_t r0, std::size_t c0) {
    if (r0 + block.rows() > rows() || c0 + block.cols() > cols_)
        throw ContractError("paste: block " + block.shape() + " does not fit in " + shape());
    for (std::size_t r = 0; r < block.rows(); ++r)
        for (std::size_t c = 0; c < block.cols(); ++c)
            if (block.get(r, c)) flip(r0 + r, c0 + c);
}

F2Matrix F2Matrix::submatrix(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows() || c0 + nc > cols_) throw ContractError("submatrix out of range");
    F2Matrix m(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c)
            if (get(r0 + r, c0 + c)) m.set(r, c);
    return m;
}

std::string F2Matrix::shape() const {
    return std::to_string(rows()) + "x" + std::to_string(cols_);
}

std::vector<std::vector<int>> F2Matrix::to_rows() const {
    std::vector<std::vector<int>> out;
    for (const auto& r : rows_) out.push_back(r.bits());
    return out;
}

namespace {

struct Echelon {
    std::vector<BitVector> rows;      // reduced rows, one per pivot
    std::vector<std::size_t> pivots;  // pivot column of each row
};

// Reduced row echelon form; pivots taken in row-major scan order.
Echelon rref(const F2Matrix& m) {
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    Echelon e;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < m.cols() && lead < rows.size(); ++c) {
        std::size_t p = lead;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[lead], rows[p]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != lead && rows[r].get(c)) rows[r] ^= rows[lead];
        e.pivots.push_back(c);
        ++lead;
    }
    rows.resize(lead);
    e.rows = std::move(rows);
    return e;
}

}  // namespace

std::size_t rank(const F2Matrix& m) { return rref(m).pivots.size(); }

std::vector<BitVector> kernel_basis(const F2Matrix& m) {
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVector v(m.cols());
        v.set(f);
        for (std::size_t i = 0; i < e.rows.size(); ++i)
            if (e.rows[i].get(f)) v.set(e.pivots[i]);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitVector> image_membership(const F2Matrix& m, const BitVector& b) {
    if (b.size() != m.rows())
        throw ContractError("image_membership: matrix " + m.shape() + " vs vector of length " +
                            std::to_string(b.size()));
    F2Matrix aug = hstack(m, F2Matrix::from_columns({b}, m.rows()));
    Echelon e = rref(aug);
    BitVector x(m.cols());
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
        if (e.pivots[i] == m.cols()) return std::nullopt;
        if (e.rows[i].get(m.cols())) x.set(e.pivots[i]);
    }
    return x;
}

F2Matrix compose(const F2Matrix& a, const F2Matrix& b) {
    if (a.cols() != b.rows())
        throw ContractError("compose: inner dimensions differ, " + a.shape() + " * " + b.shape());
    F2Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        BitVector acc(b.cols());
        const BitVector& ar = a.row(r);
        for (std::size_t k = ar.first(); k < a.cols(); ++k)
            if (ar.get(k)) acc ^= b.row(k);
        for (std::size_t c = acc.first(); c < b.cols(); ++c)
            if (acc.get(c)) out.set(r, c);
    }
    return out;
}

std::optional<F2Matrix> inverse(const F2Matrix& m) {
    if (m.rows() != m.cols()) throw ContractError("inverse of non-square matrix " + m.shape());
    std::size_t n = m.rows();
    Echelon e = rref(hstack(m, F2Matrix::identity(n)));
    if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
    F2Matrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (e.rows[r].get(n + c)) inv.set(r, c);
    return inv;
}

F2Matrix hstack(const F2Matrix& a, const F2Matrix& b) {
    if (a.rows() != b.rows()) throw ContractError("hstack: " + a.shape() + " | " + b.shape());
    F2Matrix m(a.rows(), a.cols() + b.cols());
    m.paste(a, 0, 0);
    m.paste(b, 0, a.cols());
    return m;
}

F2Matrix vstack(const F2Matrix& a, const F2Matrix& b) {
    if (a.cols() != b.cols()) throw ContractError("vstack: " + a.shape() + " / " + b.shape());
    F2Matrix m(a.rows() + b.rows(), a.cols());
    m.paste(a, 0, 0);
    m.paste(b, a.rows(), 0);
    return m;
}

BitVector Span::reduce(BitVector v) const {
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (v.get(pivot_[i])) v ^= basis_[i];
    return v;
}

bool Span::add(const BitVector& v) {
    if (v.size() != n_) throw ContractError("span ambient mismatch");
    BitVector r = reduce(v);
    if (!r.any()) return false;
    std::size_t p = r.first();
    for (auto& b : basis_)
        if (b.get(p)) b ^= r;
    basis_.push_back(std::move(r));
    pivot_.push_back(p);
    return true;
}

bool Span::contains(const BitVector& v) const { return !reduce(v).any(); }

}  // namespace p2f::f2la
