#pragma once

#include "swfem/fem/function_space.hpp"
#include "swfem/linalg/sparse_matrix.hpp"

namespace swfem {

/// Strong divergence S -> V: (D u) are the V coefficients of div u. Exact
/// for a compatible triple because div S = V and V DOFs are point values.
SparseMatrix assemble_div(const FunctionSpace& s, const FunctionSpace& v);

/// Embedding E -> S of the rotated gradient: (C g) are the S coefficients
/// of perp-grad g. Built from reference-cell functionals, which the Piola
/// map leaves invariant; each shared S DOF is written by one cell only.
SparseMatrix assemble_perp_grad_embedding(const FunctionSpace& e, const FunctionSpace& s);

}  // namespace swfem
