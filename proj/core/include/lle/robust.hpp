#pragma once

#include "lle/types.hpp"

#include <vector>

namespace lle::robust {

/// Per-point IRLS output: neighbor reliabilities a_ij in (0,1], their mean
/// s_i, and the local PCA basis (bias + top-p directions).
struct ReliabilityWeights {
    std::vector<Vector> a;   ///< per point, one entry per neighbor
    Vector s;                ///< per-point mean reliability
    Matrix bias;             ///< d x n local means b_i
    std::vector<Matrix> basis;  ///< per point, d x p local PCA U_i
};

struct IrlsSettings {
    int max_iterations = 50;
    double tol = 1e-6;
};

/// Huber-style reliability weighting around each point: iterate weighted
/// mean, weighted covariance PCA, residuals, and the reweighting rule
/// a = 1 for residuals below their mean, c/e above it.
ReliabilityWeights rlle_reliability(const Matrix& x, const NeighborGraph& g,
                                    Index p, IrlsSettings settings = {});

/// Reliability-weighted embedding: eigenproblem on
/// M_s = (I - W)^T diag(s) (I - W).
Embedding rlle_embed(const SparseMatrix& w, const Vector& s, Index p);

/// Full robust pipeline: plain weights, IRLS reliabilities, weighted
/// embedding.
Embedding rlle(const Matrix& x, int k, Index p, double eps_scale = 1e-3,
               IrlsSettings settings = {});

/// l2-penalized weights (G + gamma I)^{-1} 1, normalized to sum one.
/// Well defined for singular G whenever gamma > 0.
Vector rlle_l2_weights(const Matrix& g, double gamma);

struct ElasticNetSettings {
    int max_iterations = 5000;
    double tol = 1e-8;
};

/// Elastic-net reconstruction weights via the split formulation
/// w = w+ - w-: minimize w*^T (G* + gamma alpha I) w* +
/// gamma (1-alpha) 1^T w* over w* >= 0, 1^T w+ - 1^T w- = 1, by projected
/// gradient with the exact Euclidean projection onto the feasible set.
Vector rlle_elastic_net_weights(const Vector& x, const Matrix& x_neighbors,
                                double gamma, double alpha,
                                ElasticNetSettings settings = {});

/// The split objective at a candidate w (split canonically into +/- parts);
/// exposed so tests can compare solver output against oracle optima.
double elastic_net_objective(const Vector& x, const Matrix& x_neighbors,
                             double gamma, double alpha, const Vector& w_plus,
                             const Vector& w_minus);

}  // namespace lle::robust
