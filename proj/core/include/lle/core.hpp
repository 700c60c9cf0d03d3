#pragma once

#include "lle/types.hpp"

#include <vector>

namespace lle::core {

/// Default trace-relative regularization strength for local Gram matrices.
inline constexpr double kDefaultEpsScale = 1e-3;

/// Local Gram of neighbor offsets: G = (x 1^T - X_nb)^T (x 1^T - X_nb).
/// When k > d or the smallest eigenvalue drops below 1e-12 * trace, adds
/// eps_scale * trace(G)/k to the diagonal.
Matrix local_gram(const Vector& x, const Matrix& x_neighbors,
                  double eps_scale);

/// Applies the local_gram regularization rule to an existing Gram matrix
/// (used by the kernelized and reweighted variants).
Matrix regularize_gram(Matrix g, double eps_scale, bool force);

/// Barycentric weights w = G^{-1} 1 / (1^T G^{-1} 1) for a regularized
/// Gram. `who` names the point in error messages.
Vector gram_weights(const Matrix& g, const std::string& who);

/// Closed-form reconstruction weights, one row per point over its
/// neighbor list.
ReconstructionWeights reconstruction_weights(const Matrix& x,
                                             const NeighborGraph& g,
                                             double eps_scale = kDefaultEpsScale);

/// Total squared reconstruction error sum_i ||x_i - X_i w_i||^2.
double reconstruction_error(const Matrix& x, const NeighborGraph& g,
                            const ReconstructionWeights& w);

/// Scatter compact weights into the sparse n x n weight matrix
/// (nonzeros only at neighbor columns, zero diagonal, rows sum to one).
SparseMatrix scatter_weights(const ReconstructionWeights& w,
                             const NeighborGraph& g);

/// M = (I - W)^T (I - W), symmetric PSD; M 1 = 0 for row-stochastic W.
Matrix embedding_matrix(const SparseMatrix& w);

/// Bottom nontrivial eigenvectors of a symmetric PSD matrix whose constant
/// direction carries the zero eigenvalue. The constant direction is
/// deflated (shifted above the spectrum) rather than positionally skipped,
/// which keeps the selection stable when the zero eigenvalue is repeated;
/// a repeated near-zero eigenvalue sets the disconnected warning flag.
/// Columns are scaled by sqrt(n) so that (1/n) Y^T Y = I.
Embedding embed(const Matrix& m, Index p);

/// The full pipeline: kNN -> weights -> scatter -> embed.
Embedding lle(const Matrix& x, int k, Index p,
              double eps_scale = kDefaultEpsScale);

/// Intermediate products of a plain LLE run, for variants and models that
/// need more than the coordinates.
struct Pipeline {
    NeighborGraph graph;
    ReconstructionWeights weights;
    SparseMatrix w;
    Matrix m;
    Embedding embedding;
};

Pipeline lle_pipeline(const Matrix& x, int k, Index p,
                      double eps_scale = kDefaultEpsScale);

/// Map an embedding-space point back to the input space: solve weights
/// among the kNN of y_new in embedding space, apply them to the
/// corresponding input points.
Vector inverse_lle(const Vector& y_new, const Matrix& y, const Matrix& x,
                   int k, double eps_scale = kDefaultEpsScale);

/// Elementwise mean of per-feature weight matrices (feature fusion).
SparseMatrix fuse_feature_weights(const std::vector<SparseMatrix>& weights);

}  // namespace lle::core
