#pragma once

#include <optional>
#include <vector>

#include "swfem/error.hpp"
#include "swfem/linalg/sparse_matrix.hpp"

namespace swfem {

struct SolverReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Raised when an iterative solve exhausts its iteration budget.
class SolverError : public Error {
public:
    SolverError(const std::string& message, SolverReport report)
        : Error("solver_not_converged", message), report_(report) {}
    const SolverReport& report() const noexcept { return report_; }

private:
    SolverReport report_;
};

struct CgOptions {
    /// Relative residual target ||b - A x|| <= tolerance ||b||.
    double tolerance = 1e-12;
    /// 0 selects 10 * sqrt(n).
    int max_iterations = 0;
};

struct CgResult {
    Eigen::VectorXd x;
    SolverReport report;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite
/// `a`. Starts from `initial_guess` when given, else zero. Throws SolverError
/// on non-convergence.
CgResult cg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, const CgOptions& options = {},
                  const Eigen::VectorXd* initial_guess = nullptr);

/// Exact solver for block-diagonal matrices such as DG mass matrices: each
/// block (a list of global indices) is factorised once with a dense LU.
class BlockDiagonalSolver {
public:
    /// Throws Error("singular_block") for a singular block and
    /// Error("not_block_diagonal") if `a` couples two blocks.
    BlockDiagonalSolver(const SparseMatrix& a, std::vector<std::vector<int>> blocks);

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> factors_;
};

Eigen::VectorXd block_diag_solve(const SparseMatrix& a, const std::vector<std::vector<int>>& blocks,
                                 const Eigen::VectorXd& b);

}  // namespace swfem
