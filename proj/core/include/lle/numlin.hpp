#pragma once

#include "lle/types.hpp"

#include <string>

namespace lle::numlin {

/// Eigendecomposition of a symmetric matrix with a deterministic sign
/// convention: eigenvalues ascending, each eigenvector flipped so its
/// largest-magnitude component is positive (ties by lowest index).
struct SymEigenResult {
    Vector eigenvalues;   ///< ascending
    Matrix eigenvectors;  ///< orthonormal columns
};

SymEigenResult sym_eigen(const Matrix& a);

/// Moore-Penrose pseudo-inverse. Singular values below tol * sigma_max are
/// treated as zero. Default tol matches desk-scale double precision.
Matrix pseudo_inverse(const Matrix& a, double tol = 1e-12);

/// Solve A x = b for symmetric positive (semi)definite A. Throws
/// NumericalError naming `context` when A is singular to tolerance;
/// callers are expected to have regularized first.
Vector solve_spd(const Matrix& a, const Vector& b,
                 const std::string& context = "solve_spd");

/// Same factorization, many right-hand sides.
Matrix solve_spd(const Matrix& a, const Matrix& b,
                 const std::string& context = "solve_spd");

struct SvdResult {
    Matrix u;
    Vector singular_values;  ///< descending
    Matrix v;
};

/// Thin singular value decomposition, A = U S V^T.
SvdResult svd(const Matrix& a);

/// Throws ContractViolation if the matrix has NaN or Inf entries.
void require_finite(const Matrix& a, const std::string& name);

}  // namespace lle::numlin
