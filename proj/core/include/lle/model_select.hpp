#pragma once

#include "lle/types.hpp"

#include <optional>
#include <vector>

namespace lle::model_select {

/// Residual variance 1 - rho^2 between two distance matrices, Pearson
/// correlation taken over the strict upper triangles.
double residual_variance(const Matrix& d_x, const Matrix& d_y);

/// Procrustes statistic P(X, Y) = ||H_k (X^T - Y A^T)||_F^2 with the
/// optimal rotation A = U V^T from svd(X H_k Y) and optimal translation.
/// x_local is d x k, y_local is k x p.
double procrustes_statistic(const Matrix& x_local, const Matrix& y_local);

/// Preservation Neighborhood Error over an input-space graph g_x and an
/// embedding-space graph g_y of the same k. Discord terms with an empty
/// discord set contribute zero.
double pne(const Matrix& x, const Matrix& y, const NeighborGraph& g_x,
           const NeighborGraph& g_y);

enum class KCriterion { ResidualVariance, Procrustes, Pne };

struct KSearchSpec {
    int k_min = 2;
    int k_max = 10;
    bool hierarchical = false;
    Index p = 2;
    double eps_scale = 1e-3;
};

struct KSelection {
    int k = 0;
    std::vector<std::pair<int, double>> scores;  ///< (k, score), evaluated ones
    bool hierarchical_fallback = false;  ///< no local minima, did a full scan
};

/// Scan candidate neighbor counts and pick the argmin of the criterion,
/// ties to the smallest k. Hierarchical mode evaluates only the k where
/// the reconstruction error is a strict interior local minimum, falling
/// back to a full scan when there is none.
KSelection select_k(const Matrix& x, const KSearchSpec& spec,
                    KCriterion criterion);

struct LnsResult {
    std::vector<int> k_per_point;
    Matrix v;  ///< n x (k_max - k_min) linearity conservation matrix
    int k_min = 0;
    int k_max = 0;
};

/// Local Neighborhood Selection: per-point neighbor counts from the
/// agreement of Euclidean and geodesic kNN sets. k_min is the smallest
/// connected k; k_max = n^2 / (k_min |E|) clamped to [k_min+1, n-1]
/// and by k_cap.
LnsResult lns(const Matrix& x, std::optional<int> k_cap = std::nullopt);

}  // namespace lle::model_select
