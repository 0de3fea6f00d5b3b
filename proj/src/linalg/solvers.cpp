#include "swfem/linalg/solvers.hpp"

#include <cmath>
#include <sstream>

namespace swfem {

CgResult cg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, const CgOptions& options,
                  const Eigen::VectorXd* initial_guess) {
    const int n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error("dimension_mismatch", "cg_solve: dimension mismatch");
    const int max_it =
        options.max_iterations > 0 ? options.max_iterations : std::max(1, int(std::ceil(10.0 * std::sqrt(double(n)))));

    CgResult result;
    result.x = initial_guess ? *initial_guess : Eigen::VectorXd::Zero(n);
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        result.x.setZero();
        result.report = {0, 0.0, true};
        return result;
    }

    Eigen::VectorXd inv_diag = a.diagonal();
    for (int i = 0; i < n; ++i) {
        if (!(inv_diag[i] > 0.0)) throw Error("not_spd", "cg_solve: non-positive diagonal entry");
        inv_diag[i] = 1.0 / inv_diag[i];
    }

    Eigen::VectorXd r(n), z(n), p(n), ap(n);
    if (initial_guess) {
        a.multiply(result.x, ap);
        r = b - ap;
    } else {
        r = b;
    }
    const double target = options.tolerance * b_norm;
    double r_norm = r.norm();
    int it = 0;
    if (r_norm > target) {
        z = inv_diag.cwiseProduct(r);
        p = z;
        double rz = r.dot(z);
        while (it < max_it) {
            a.multiply(p, ap);
            const double alpha = rz / p.dot(ap);
            result.x += alpha * p;
            r -= alpha * ap;
            ++it;
            r_norm = r.norm();
            if (r_norm <= target) break;
            z = inv_diag.cwiseProduct(r);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
    }
    result.report = {it, r_norm / b_norm, r_norm <= target};
    if (!result.report.converged) {
        std::ostringstream os;
        os << "cg_solve: no convergence after " << it << " iterations (relative residual "
           << result.report.relative_residual << ", tolerance " << options.tolerance << ")";
        throw SolverError(os.str(), result.report);
    }
    return result;
}

BlockDiagonalSolver::BlockDiagonalSolver(const SparseMatrix& a, std::vector<std::vector<int>> blocks)
    : n_(a.rows()), blocks_(std::move(blocks)) {
    std::vector<int> owner(n_, -1);
    for (std::size_t k = 0; k < blocks_.size(); ++k)
        for (int i : blocks_[k]) owner[i] = static_cast<int>(k);
    for (int r = 0; r < n_; ++r) {
        if (owner[r] < 0) throw Error("not_block_diagonal", "row " + std::to_string(r) + " is in no block");
        for (int k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
            if (owner[a.col_idx()[k]] != owner[r] && a.values()[k] != 0.0) {
                throw Error("not_block_diagonal", "matrix couples rows " + std::to_string(r) + " and " +
                                                      std::to_string(a.col_idx()[k]) + " across blocks");
            }
        }
    }
    factors_.reserve(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const auto& idx = blocks_[k];
        const int m = static_cast<int>(idx.size());
        Eigen::MatrixXd block(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) block(i, j) = a.coeff(idx[i], idx[j]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
        const double scale = block.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !(std::abs(lu.determinant()) > 1e-14 * std::pow(scale, m))) {
            throw Error("singular_block", "block " + std::to_string(k) + " is singular (degenerate cell?)");
        }
        factors_.push_back(std::move(lu));
    }
}

Eigen::VectorXd BlockDiagonalSolver::solve(const Eigen::VectorXd& b) const {
    if (b.size() != n_) throw Error("dimension_mismatch", "block_diag_solve: dimension mismatch");
    Eigen::VectorXd x(n_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const auto& idx = blocks_[k];
        Eigen::VectorXd local(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) local[i] = b[idx[i]];
        const Eigen::VectorXd sol = factors_[k].solve(local);
        for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] = sol[i];
    }
    return x;
}

Eigen::VectorXd block_diag_solve(const SparseMatrix& a, const std::vector<std::vector<int>>& blocks,
                                 const Eigen::VectorXd& b) {
    return BlockDiagonalSolver(a, blocks).solve(b);
}

}  // namespace swfem
