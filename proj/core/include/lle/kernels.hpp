#pragma once

#include "lle/types.hpp"

#include <optional>
#include <vector>

namespace lle::kernels {

/// Build the n x n kernel matrix. The delta-label kind requires labels and
/// is built by the overload below.
KernelMatrix kernel_matrix(const Matrix& x, const KernelDescriptor& desc);

/// Delta kernel over class labels: 1 iff labels are equal.
KernelMatrix delta_kernel(const std::vector<int>& labels);

/// Median of off-diagonal Euclidean distances, the usual Gaussian
/// bandwidth default.
double median_heuristic_sigma(const Matrix& x);

/// Local feature-space Gram around point i:
/// K_i(a,b) = K(i,i) - K(i,ia) - K(i,ib) + K(ia,ib), regularized by the
/// same rule as the raw local Gram.
Matrix local_kernel_gram(Index i, const NeighborGraph& g,
                         const KernelMatrix& k, double eps_scale);

/// Kernel LLE: kNN and reconstruction weights in feature space, then the
/// standard embedding step.
Embedding kernel_lle(const Matrix& x, const KernelDescriptor& desc, int k,
                     Index p, double eps_scale);

enum class LleKernelMode { MuShift, PseudoInverse };

/// The LLE-as-kernel-PCA view of M: either mu I - M (requires
/// mu >= lambda_max(M)) or the pseudo-inverse of M.
KernelMatrix lle_kernel_view(const Matrix& m, LleKernelMode mode,
                             double mu = 0.0);

/// Empirical Hilbert-Schmidt independence criterion,
/// tr(Kx H Ky H) / (n-1)^2.
double hsic(const KernelMatrix& kx, const KernelMatrix& ky);

}  // namespace lle::kernels
