#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cobarforge::gf2 {

using Vec = std::vector<uint64_t>;  // bit-packed coordinate vector

inline size_t words_for(size_t bits)
{
    return (bits + 63) / 64;
}

inline bool get_bit(const Vec& v, size_t i)
{
    return (v[i >> 6] >> (i & 63)) & 1u;
}

inline void set_bit(Vec& v, size_t i, bool b = true)
{
    if (b)
        v[i >> 6] |= uint64_t(1) << (i & 63);
    else
        v[i >> 6] &= ~(uint64_t(1) << (i & 63));
}

inline void xor_into(Vec& dst, const Vec& src)
{
    for (size_t i = 0; i < src.size(); ++i)
        dst[i] ^= src[i];
}

inline bool is_zero(const Vec& v)
{
    for (uint64_t w : v)
        if (w)
            return false;
    return true;
}

// Matrix over F2 representing a linear map F2^cols -> F2^rows.
// Dense bit-packed rows up to kSparseThreshold columns, sparse row
// index lists above it.
class F2Matrix {
public:
    static constexpr size_t kSparseThreshold = 4096;

    F2Matrix() : rows_(0), cols_(0) {}
    F2Matrix(size_t rows, size_t cols);

    static F2Matrix identity(size_t n);
    static F2Matrix zero(size_t rows, size_t cols) { return F2Matrix(rows, cols); }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool sparse() const { return sparse_; }

    bool get(size_t r, size_t c) const;
    void set(size_t r, size_t c, bool b = true);
    void flip(size_t r, size_t c);

    Vec apply(const Vec& v) const;             // length cols -> length rows
    F2Matrix multiply(const F2Matrix& rhs) const;
    F2Matrix add(const F2Matrix& rhs) const;
    F2Matrix transpose() const;
    bool is_zero_matrix() const;
    bool operator==(const F2Matrix& rhs) const;

    size_t rank() const;
    std::vector<Vec> kernel_basis() const;
    // Solves M x = b; returns true and writes x (length cols) on success.
    bool solve(const Vec& b, Vec& x) const;

    std::string str() const;

private:
    size_t rows_, cols_;
    bool sparse_ = false;
    size_t stride_ = 0;
    Vec dense_;                                  // rows_ * stride_ words
    std::vector<std::vector<uint32_t>> sparse_;  // sorted column indices per row

    friend struct Eliminator;
};

// Row echelon machine shared by rank/kernel/solve/homology.
struct Eliminator {
    size_t cols = 0;
    std::vector<Vec> rows;        // reduced rows
    std::vector<size_t> pivots;   // pivot column of rows[i]

    explicit Eliminator(size_t c) : cols(c) {}

    // Reduces v against the current rows in place.
    void reduce(Vec& v) const;
    // Reduces and inserts if independent; returns true if inserted.
    bool insert(Vec v);
    size_t rank() const { return rows.size(); }
    bool contains(Vec v) const;
};

size_t rank(const F2Matrix& m);
std::vector<Vec> kernel_basis(const F2Matrix& m);

// Factorized solver for repeated M x = b queries against a fixed matrix.
class F2Solver {
public:
    explicit F2Solver(const F2Matrix& m);
    bool solve(const Vec& b, Vec& x) const;  // x has length cols
    size_t rank() const { return pivots_.size(); }

private:
    size_t rows_, cols_;
    std::vector<Vec> reduced_;
    std::vector<Vec> witness_;
    std::vector<size_t> pivots_;
};

struct HomologyBasis {
    size_t dimension = 0;
    std::vector<Vec> representatives;  // coordinates in the middle degree
};

// Homology at the middle of  . --d_in--> V --d_out--> .
// Representatives are picked by pivoting in basis order.
HomologyBasis homology_basis(const F2Matrix& d_out, const F2Matrix& d_in);

// A finite chain complex of F2 vector spaces indexed by a closed
// integer interval of degrees. differentials[n] : degree n -> n-1.
class GradedComplexF2 {
public:
    GradedComplexF2() = default;
    GradedComplexF2(int lo, int hi) : lo_(lo), hi_(hi) {}

    int lo() const { return lo_; }
    int hi() const { return hi_; }

    void set_basis(int deg, std::vector<std::string> labels);
    void set_differential(int deg, F2Matrix d);  // deg -> deg-1
    // Checks shapes and d∘d = 0; throws std::runtime_error naming the
    // offending basis column otherwise.
    void validate() const;

    size_t dim(int deg) const;
    const std::vector<std::string>& labels(int deg) const;
    const F2Matrix& differential(int deg) const;  // zero matrix if absent

    HomologyBasis homology(int deg) const;

private:
    int lo_ = 0, hi_ = -1;
    std::map<int, std::vector<std::string>> basis_;
    mutable std::map<int, F2Matrix> diff_;
    static const std::vector<std::string> kEmpty;
};

}  // namespace cobarforge::gf2
