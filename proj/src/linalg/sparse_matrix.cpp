#include "swfem/linalg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swfem {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (static_cast<int>(row_ptr_.size()) != rows_ + 1 || col_idx_.size() != values_.size() ||
        row_ptr_.back() != static_cast<int>(values_.size())) {
        throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
    }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets, bool keep_zeros) {
    std::vector<int> count(rows + 1, 0);
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::out_of_range("SparseMatrix: triplet index out of range");
        }
        ++count[t.row + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<std::pair<int, double>> entries(triplets.size());
    std::vector<int> fill(count.begin(), count.end() - 1);
    for (const auto& t : triplets) entries[fill[t.row]++] = {t.col, t.value};

    std::vector<int> row_ptr(rows + 1, 0);
    std::vector<int> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (int r = 0; r < rows; ++r) {
        auto begin = entries.begin() + count[r];
        auto end = entries.begin() + count[r + 1];
        // Stable sort keeps the summation order of duplicates deterministic.
        std::stable_sort(begin, end, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = begin; it != end;) {
            const int col = it->first;
            double sum = 0.0;
            for (; it != end && it->first == col; ++it) sum += it->second;
            if (sum != 0.0 || keep_zeros) {
                col_idx.push_back(col);
                values.push_back(sum);
            }
        }
        row_ptr[r + 1] = static_cast<int>(values.size());
    }
    return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<int> row_ptr(n + 1), col_idx(n);
    std::iota(row_ptr.begin(), row_ptr.end(), 0);
    std::iota(col_idx.begin(), col_idx.end(), 0);
    return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<Triplet> t;
    for (int i = 0; i < dense.rows(); ++i)
        for (int j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0) t.push_back({i, j, dense(i, j)});
    return from_triplets(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()), t);
}

void SparseMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
    y.resize(rows_);
    const int* rp = row_ptr_.data();
    const int* ci = col_idx_.data();
    const double* v = values_.data();
    const double* xp = x.data();
    for (int r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (int k = rp[r]; k < rp[r + 1]; ++k) sum += v[k] * xp[ci[k]];
        y[r] = sum;
    }
}

Eigen::VectorXd SparseMatrix::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y;
    multiply(x, y);
    return y;
}

Eigen::VectorXd SparseMatrix::transpose_multiply(const Eigen::VectorXd& x) const {
    if (x.size() != rows_) throw std::invalid_argument("SparseMatrix::transpose_multiply: dimension mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_idx_[k], r, values_[k]});
    return from_triplets(cols_, rows_, t, true);
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("SparseMatrix product: dimension mismatch");
    std::vector<Triplet> t;
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int mid = col_idx_[k];
            for (int m = other.row_ptr_[mid]; m < other.row_ptr_[mid + 1]; ++m)
                t.push_back({r, other.col_idx_[m], values_[k] * other.values_[m]});
        }
    return from_triplets(rows_, other.cols_, t, true);
}

SparseMatrix SparseMatrix::scaled(double factor) const {
    SparseMatrix out = *this;
    for (double& v : out.values_) v *= factor;
    return out;
}

double SparseMatrix::coeff(int row, int col) const {
    const auto begin = col_idx_.begin() + row_ptr_[row];
    const auto end = col_idx_.begin() + row_ptr_[row + 1];
    const auto it = std::lower_bound(begin, end, col);
    return (it != end && *it == col) ? values_[it - col_idx_.begin()] : 0.0;
}

Eigen::VectorXd SparseMatrix::diagonal() const {
    Eigen::VectorXd d(std::min(rows_, cols_));
    for (int r = 0; r < d.size(); ++r) d[r] = coeff(r, r);
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::asymmetry() const {
    if (rows_ != cols_) return INFINITY;
    double m = 0.0;
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            m = std::max(m, std::abs(values_[k] - coeff(col_idx_[k], r)));
    return m;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) += values_[k];
    return d;
}

void AssemblyPattern::build(int rows, int cols, const std::vector<std::vector<int>>& row_lists,
                            const std::vector<std::vector<int>>& col_lists) {
    rows_ = rows;
    cols_ = cols;
    std::vector<std::vector<int>> row_cols(rows);
    for (std::size_t c = 0; c < row_lists.size(); ++c)
        for (int r : row_lists[c]) row_cols[r].insert(row_cols[r].end(), col_lists[c].begin(), col_lists[c].end());
    row_ptr_.assign(rows + 1, 0);
    col_idx_.clear();
    for (int r = 0; r < rows; ++r) {
        auto& rc = row_cols[r];
        std::sort(rc.begin(), rc.end());
        rc.erase(std::unique(rc.begin(), rc.end()), rc.end());
        col_idx_.insert(col_idx_.end(), rc.begin(), rc.end());
        row_ptr_[r + 1] = static_cast<int>(col_idx_.size());
    }
    offsets_.assign(row_lists.size() + 1, 0);
    local_cols_.resize(row_lists.size());
    slots_.clear();
    for (std::size_t c = 0; c < row_lists.size(); ++c) {
        local_cols_[c] = static_cast<int>(col_lists[c].size());
        for (int r : row_lists[c]) {
            for (int k : col_lists[c]) {
                const auto begin = col_idx_.begin() + row_ptr_[r];
                const auto end = col_idx_.begin() + row_ptr_[r + 1];
                slots_.push_back(static_cast<int>(std::lower_bound(begin, end, k) - col_idx_.begin()));
            }
        }
        offsets_[c + 1] = static_cast<int>(slots_.size());
    }
}

SparseMatrix AssemblyPattern::zero_matrix() const {
    return SparseMatrix(rows_, cols_, row_ptr_, col_idx_, std::vector<double>(col_idx_.size(), 0.0));
}

}  // namespace swfem
