#pragma once

#include "lle/types.hpp"

#include <optional>

namespace lle::oos {

/// Everything the training phase produced that out-of-sample extensions
/// need: data, embedding, weights, the Gram-Laplacian and its spectrum.
struct TrainedModel {
    Matrix x;                 ///< d x n training points
    Matrix y;                 ///< n x p embedding (unit-covariance scale)
    SparseMatrix w;           ///< n x n reconstruction weights
    Matrix m;                 ///< (I - W)^T (I - W)
    Vector eigenvalues;       ///< retained eigenvalues of M, ascending
    double lambda_max = 0.0;  ///< largest eigenvalue of M
    int k = 0;
    double eps_scale = 0.0;
    std::optional<KernelDescriptor> kernel;  ///< set for kernel-LLE models

    Index n() const { return x.cols(); }
    Index p() const { return y.cols(); }
};

/// Train a plain LLE model, keeping the pieces required for out-of-sample
/// embedding.
TrainedModel train(const Matrix& x, int k, Index p, double eps_scale);

/// Out-of-sample embedding batch, points stacked row-wise (n_t x p).
struct OosResult {
    Matrix y;
};

/// OOS reconstruction weights of the test points over their training kNN,
/// scattered to an n x n_t matrix (column i = weights of test point i).
Matrix oos_weights(const TrainedModel& model, const Matrix& x_test);

/// Linear-reconstruction extension: y_t = sum_j w_j y_j over training kNN.
OosResult oos_reconstruct(const TrainedModel& model, const Matrix& x_test);

/// Centered out-of-sample kernel:
/// K_t - (1/n) 1 1^T K_t - (1/n) K 1 1^T + (1/n^2) 1 1^T K 1 1^T.
Matrix center_oos_kernel(const Matrix& k_train, const Matrix& k_cross);

/// Eigenfunction extension with the soft-similarity LLE kernel
/// mu I - M. Output dimension r is scaled by 1/sqrt(mu - lambda_{r+1});
/// the linear-reconstruction answer is the mu -> infinity limit of this
/// map up to that per-dimension scale.
OosResult oos_eigenfunctions(const TrainedModel& model, const Matrix& x_test,
                             double mu);

/// Kernel-mapping extension: per-training-point Gaussian bandwidths
/// sigma_j = gamma * min_{i != j} ||x_j - x_i||, row-normalized kernel K'',
/// coefficients A = pinv(K'') Y, test embedding K''_t A.
OosResult oos_kernel_mapping(const TrainedModel& model, const Matrix& x_test,
                             double gamma = 1.0);

}  // namespace lle::oos
