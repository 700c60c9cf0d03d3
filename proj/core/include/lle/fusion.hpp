#pragma once

#include "lle/types.hpp"

#include <vector>

namespace lle::fusion {

/// ISOLLE: the kNN graph is built from geodesic distances, the rest is
/// plain LLE.
Embedding isolle(const Matrix& x, int k, Index p, double eps_scale = 1e-3);

/// LLE-guided PCA: center the data, run LLE, project onto the span of the
/// embedding; output is the first p rows of X_centered Y Y^T, returned
/// row-wise (n x p).
Embedding lle_pca(const Matrix& x, int k, Index p, double eps_scale = 1e-3);

/// Fisher discriminant projection: top-p generalized eigenvectors of
/// (S_between, S_within), the within-class scatter regularized by
/// 1e-6 trace. Sets *rank_warning when p exceeds c - 1.
struct FdaProjection {
    Matrix u;            ///< d x p
    Vector eigenvalues;  ///< descending generalized eigenvalues
};

FdaProjection fda_projection(const Matrix& x, const std::vector<int>& labels,
                             Index p, bool* rank_warning = nullptr);

/// ULLELDA: LLE embedding, FDA projection of the embedded points, then one
/// more reconstruction pass y_i = sum_j w_ij z_j.
Embedding ullelda(const Matrix& x, const std::vector<int>& labels, int k,
                  Index p, double eps_scale = 1e-3);

/// Discriminant LLE: same-class kNN weights feed a similarity S (the
/// off-diagonal part of W + W^T - W^T W), cross-class kNN pairs feed
/// B = 1/k; the projection maximizes the between/within Laplacian trace
/// ratio via a generalized eigenproblem.
struct DlleResult {
    Matrix u;           ///< d x p projection
    Embedding embedded; ///< rows U^T x_i
    Matrix s;           ///< similarity matrix
    Matrix b;           ///< between-class matrix
};

DlleResult dlle(const Matrix& x, const std::vector<int>& labels, int k,
                Index p, double eps_scale = 1e-3);

}  // namespace lle::fusion
