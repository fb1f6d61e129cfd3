#include "cobarforge/gf2.hpp"

#include <algorithm>
#include <sstream>

namespace cobarforge::gf2 {

F2Matrix::F2Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols)
{
    if (cols_ > kSparseThreshold) {
        sparse_ = true;
        this->sparse_.resize(rows_);
    }
    else {
        stride_ = words_for(cols_);
        dense_.assign(rows_ * stride_, 0);
    }
}

F2Matrix F2Matrix::identity(size_t n)
{
    F2Matrix m(n, n);
    for (size_t i = 0; i < n; ++i)
        m.set(i, i);
    return m;
}

bool F2Matrix::get(size_t r, size_t c) const
{
    if (sparse_) {
        const auto& row = sparse_[r];
        return std::binary_search(row.begin(), row.end(), uint32_t(c));
    }
    return (dense_[r * stride_ + (c >> 6)] >> (c & 63)) & 1u;
}

void F2Matrix::set(size_t r, size_t c, bool b)
{
    if (sparse_) {
        auto& row = sparse_[r];
        auto it = std::lower_bound(row.begin(), row.end(), uint32_t(c));
        bool present = it != row.end() && *it == uint32_t(c);
        if (b && !present)
            row.insert(it, uint32_t(c));
        else if (!b && present)
            row.erase(it);
        return;
    }
    uint64_t& w = dense_[r * stride_ + (c >> 6)];
    if (b)
        w |= uint64_t(1) << (c & 63);
    else
        w &= ~(uint64_t(1) << (c & 63));
}

void F2Matrix::flip(size_t r, size_t c)
{
    set(r, c, !get(r, c));
}

Vec F2Matrix::apply(const Vec& v) const
{
    Vec out(words_for(rows_), 0);
    for (size_t r = 0; r < rows_; ++r) {
        uint64_t acc = 0;
        if (sparse_) {
            for (uint32_t c : sparse_[r])
                acc ^= (v[c >> 6] >> (c & 63)) & 1u;
        }
        else {
            for (size_t w = 0; w < stride_; ++w)
                acc ^= __builtin_popcountll(dense_[r * stride_ + w] & v[w]);
        }
        if (acc & 1u)
            set_bit(out, r);
    }
    return out;
}

F2Matrix F2Matrix::multiply(const F2Matrix& rhs) const
{
    if (cols_ != rhs.rows_)
        throw std::runtime_error("F2Matrix::multiply: shape mismatch");
    F2Matrix out(rows_, rhs.cols_);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t k = 0; k < cols_; ++k)
            if (get(r, k))
                for (size_t c = 0; c < rhs.cols_; ++c)
                    if (rhs.get(k, c))
                        out.flip(r, c);
    return out;
}

F2Matrix F2Matrix::add(const F2Matrix& rhs) const
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::runtime_error("F2Matrix::add: shape mismatch");
    F2Matrix out(rows_, cols_);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t c = 0; c < cols_; ++c)
            if (get(r, c) != rhs.get(r, c))
                out.set(r, c);
    return out;
}

F2Matrix F2Matrix::transpose() const
{
    F2Matrix out(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r)
        for (size_t c = 0; c < cols_; ++c)
            if (get(r, c))
                out.set(c, r);
    return out;
}

bool F2Matrix::is_zero_matrix() const
{
    if (sparse_) {
        for (const auto& row : sparse_)
            if (!row.empty())
                return false;
        return true;
    }
    for (uint64_t w : dense_)
        if (w)
            return false;
    return true;
}

bool F2Matrix::operator==(const F2Matrix& rhs) const
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        return false;
    for (size_t r = 0; r < rows_; ++r)
        for (size_t c = 0; c < cols_; ++c)
            if (get(r, c) != rhs.get(r, c))
                return false;
    return true;
}

std::string F2Matrix::str() const
{
    std::ostringstream os;
    for (size_t r = 0; r < rows_; ++r) {
        for (size_t c = 0; c < cols_; ++c)
            os << (get(r, c) ? '1' : '0');
        os << '\n';
    }
    return os.str();
}

void Eliminator::reduce(Vec& v) const
{
    for (size_t i = 0; i < rows.size(); ++i)
        if (get_bit(v, pivots[i]))
            xor_into(v, rows[i]);
}

bool Eliminator::insert(Vec v)
{
    reduce(v);
    for (size_t c = 0; c < cols; ++c) {
        if (get_bit(v, c)) {
            // Back-substitute into existing rows for full reduction.
            for (size_t i = 0; i < rows.size(); ++i)
                if (get_bit(rows[i], c))
                    xor_into(rows[i], v);
            rows.push_back(std::move(v));
            pivots.push_back(c);
            return true;
        }
    }
    return false;
}

bool Eliminator::contains(Vec v) const
{
    reduce(v);
    return is_zero(v);
}

namespace {

Vec row_of(const F2Matrix& m, size_t r)
{
    Vec v(words_for(m.cols()), 0);
    for (size_t c = 0; c < m.cols(); ++c)
        if (m.get(r, c))
            set_bit(v, c);
    return v;
}

Vec col_of(const F2Matrix& m, size_t c)
{
    Vec v(words_for(m.rows()), 0);
    for (size_t r = 0; r < m.rows(); ++r)
        if (m.get(r, c))
            set_bit(v, r);
    return v;
}

}  // namespace

size_t F2Matrix::rank() const
{
    Eliminator e(cols_);
    for (size_t r = 0; r < rows_; ++r)
        e.insert(row_of(*this, r));
    return e.rank();
}

std::vector<Vec> F2Matrix::kernel_basis() const
{
    // Eliminate columns, tracking the combination of source basis vectors.
    // Augmented columns: [column of M | e_c].
    size_t aug = words_for(rows_);
    std::vector<Vec> reduced;   // image parts
    std::vector<Vec> witness;   // source combinations
    std::vector<size_t> pivots;
    std::vector<Vec> kernel;
    for (size_t c = 0; c < cols_; ++c) {
        Vec img = col_of(*this, c);
        Vec wit(words_for(cols_), 0);
        set_bit(wit, c);
        for (size_t i = 0; i < reduced.size(); ++i)
            if (get_bit(img, pivots[i])) {
                xor_into(img, reduced[i]);
                xor_into(wit, witness[i]);
            }
        bool zero = is_zero(img);
        if (zero) {
            kernel.push_back(std::move(wit));
            continue;
        }
        size_t p = 0;
        while (!get_bit(img, p))
            ++p;
        reduced.push_back(std::move(img));
        witness.push_back(std::move(wit));
        pivots.push_back(p);
    }
    (void)aug;
    return kernel;
}

bool F2Matrix::solve(const Vec& b, Vec& x) const
{
    std::vector<Vec> reduced;
    std::vector<Vec> witness;
    std::vector<size_t> pivots;
    for (size_t c = 0; c < cols_; ++c) {
        Vec img = col_of(*this, c);
        Vec wit(words_for(cols_), 0);
        set_bit(wit, c);
        for (size_t i = 0; i < reduced.size(); ++i)
            if (get_bit(img, pivots[i])) {
                xor_into(img, reduced[i]);
                xor_into(wit, witness[i]);
            }
        if (is_zero(img))
            continue;
        size_t p = 0;
        while (!get_bit(img, p))
            ++p;
        reduced.push_back(std::move(img));
        witness.push_back(std::move(wit));
        pivots.push_back(p);
    }
    Vec r = b;
    r.resize(words_for(rows_), 0);
    Vec acc(words_for(cols_), 0);
    for (size_t i = 0; i < reduced.size(); ++i)
        if (get_bit(r, pivots[i])) {
            xor_into(r, reduced[i]);
            xor_into(acc, witness[i]);
        }
    if (!is_zero(r))
        return false;
    x = acc;
    return true;
}

F2Solver::F2Solver(const F2Matrix& m) : rows_(m.rows()), cols_(m.cols())
{
    for (size_t c = 0; c < cols_; ++c) {
        Vec img = col_of(m, c);
        Vec wit(words_for(cols_), 0);
        set_bit(wit, c);
        for (size_t i = 0; i < reduced_.size(); ++i)
            if (get_bit(img, pivots_[i])) {
                xor_into(img, reduced_[i]);
                xor_into(wit, witness_[i]);
            }
        if (is_zero(img))
            continue;
        size_t p = 0;
        while (!get_bit(img, p))
            ++p;
        reduced_.push_back(std::move(img));
        witness_.push_back(std::move(wit));
        pivots_.push_back(p);
    }
}

bool F2Solver::solve(const Vec& b, Vec& x) const
{
    Vec r = b;
    r.resize(words_for(rows_), 0);
    Vec acc(words_for(cols_ ? cols_ : 1), 0);
    acc.assign(words_for(cols_ ? cols_ : 1), 0);
    for (size_t i = 0; i < reduced_.size(); ++i)
        if (get_bit(r, pivots_[i])) {
            xor_into(r, reduced_[i]);
            xor_into(acc, witness_[i]);
        }
    if (!is_zero(r))
        return false;
    x = acc;
    x.resize(words_for(cols_ ? cols_ : 1));
    return true;
}

size_t rank(const F2Matrix& m)
{
    return m.rank();
}

std::vector<Vec> kernel_basis(const F2Matrix& m)
{
    return m.kernel_basis();
}

HomologyBasis homology_basis(const F2Matrix& d_out, const F2Matrix& d_in)
{
    if (d_in.rows() != d_out.cols())
        throw std::runtime_error("homology_basis: middle dimensions disagree");
    F2Matrix comp = d_out.multiply(d_in);
    for (size_t r = 0; r < comp.rows(); ++r)
        for (size_t c = 0; c < comp.cols(); ++c)
            if (comp.get(r, c))
                throw std::runtime_error(
                    "homology_basis: d_out∘d_in nonzero on basis column " + std::to_string(c));

    std::vector<Vec> cycles = d_out.kernel_basis();
    Eliminator bd(d_out.cols());
    for (size_t c = 0; c < d_in.cols(); ++c)
        bd.insert(col_of(d_in, c));

    HomologyBasis out;
    Eliminator seen(d_out.cols());
    for (auto& r : bd.rows)
        seen.insert(r);
    for (const Vec& z : cycles) {
        if (seen.insert(z)) {
            out.representatives.push_back(z);
            ++out.dimension;
        }
    }
    return out;
}

const std::vector<std::string> GradedComplexF2::kEmpty;

void GradedComplexF2::set_basis(int deg, std::vector<std::string> labels)
{
    basis_[deg] = std::move(labels);
}

void GradedComplexF2::set_differential(int deg, F2Matrix d)
{
    diff_[deg] = std::move(d);
}

size_t GradedComplexF2::dim(int deg) const
{
    auto it = basis_.find(deg);
    return it == basis_.end() ? 0 : it->second.size();
}

const std::vector<std::string>& GradedComplexF2::labels(int deg) const
{
    auto it = basis_.find(deg);
    return it == basis_.end() ? kEmpty : it->second;
}

const F2Matrix& GradedComplexF2::differential(int deg) const
{
    auto it = diff_.find(deg);
    if (it == diff_.end())
        it = diff_.emplace(deg, F2Matrix(dim(deg - 1), dim(deg))).first;
    return it->second;
}

void GradedComplexF2::validate() const
{
    for (int n = lo_; n <= hi_; ++n) {
        const F2Matrix& d = differential(n);
        if (d.rows() != dim(n - 1) || d.cols() != dim(n))
            throw std::runtime_error("GradedComplexF2: differential shape at degree " +
                                     std::to_string(n));
        if (n > lo_) {
            F2Matrix sq = differential(n - 1).multiply(d);
            for (size_t c = 0; c < sq.cols(); ++c)
                for (size_t r = 0; r < sq.rows(); ++r)
                    if (sq.get(r, c)) {
                        const auto& lab = labels(n);
                        throw std::runtime_error(
                            "GradedComplexF2: d∘d ≠ 0 at degree " + std::to_string(n) +
                            " on basis column " + (c < lab.size() ? lab[c] : std::to_string(c)));
                    }
        }
    }
}

HomologyBasis GradedComplexF2::homology(int deg) const
{
    if (deg < lo_ || deg > hi_)
        return {};
    F2Matrix d_out = (deg > lo_) ? differential(deg) : F2Matrix(0, dim(deg));
    F2Matrix d_in = (deg < hi_) ? differential(deg + 1) : F2Matrix(dim(deg), 0);
    if (deg == lo_)
        d_out = F2Matrix(0, dim(deg));
    return homology_basis(d_out, d_in);
}

}  // namespace cobarforge::gf2
