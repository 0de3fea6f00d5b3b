#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace swfem {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and duplicates are summed on construction.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values);

    /// Exact zeros (after summing duplicates) are dropped unless `keep_zeros`.
    static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets, bool keep_zeros = false);
    static SparseMatrix identity(int n);
    static SparseMatrix from_dense(const Eigen::MatrixXd& dense);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nonzeros() const { return values_.size(); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// y = A x
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    /// y = A^T x
    Eigen::VectorXd transpose_multiply(const Eigen::VectorXd& x) const;

    SparseMatrix transpose() const;
    SparseMatrix operator*(const SparseMatrix& other) const;
    SparseMatrix scaled(double factor) const;

    double coeff(int row, int col) const;
    Eigen::VectorXd diagonal() const;
    double max_abs() const;
    /// max |A_ij - A_ji|
    double asymmetry() const;
    Eigen::MatrixXd to_dense() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// Sparsity pattern for cell-by-cell assembly of a bilinear form, with the
/// value slot of every (cell, local row, local col) pair precomputed so that
/// re-assembly only scatters into `values()`.
class AssemblyPattern {
public:
    /// `row_dofs(c)` and `col_dofs(c)` give the global DOFs of cell c.
    template <class RowDofs, class ColDofs>
    AssemblyPattern(int rows, int cols, int num_cells, RowDofs row_dofs, ColDofs col_dofs);

    /// Matrix with the pattern and all values zero (explicit zeros kept).
    SparseMatrix zero_matrix() const;
    /// Value-array slot of local entry (i, j) of `cell`.
    int slot(int cell, int i, int j) const { return slots_[offsets_[cell] + i * local_cols_[cell] + j]; }

private:
    void build(int rows, int cols, const std::vector<std::vector<int>>& row_lists,
               const std::vector<std::vector<int>>& col_lists);

    int rows_ = 0, cols_ = 0;
    std::vector<int> row_ptr_, col_idx_;
    std::vector<int> offsets_, local_cols_, slots_;
};

template <class RowDofs, class ColDofs>
AssemblyPattern::AssemblyPattern(int rows, int cols, int num_cells, RowDofs row_dofs, ColDofs col_dofs) {
    std::vector<std::vector<int>> row_lists(num_cells), col_lists(num_cells);
    for (int c = 0; c < num_cells; ++c) {
        const auto r = row_dofs(c);
        const auto k = col_dofs(c);
        row_lists[c].assign(r.begin(), r.end());
        col_lists[c].assign(k.begin(), k.end());
    }
    build(rows, cols, row_lists, col_lists);
}

}  // namespace swfem
