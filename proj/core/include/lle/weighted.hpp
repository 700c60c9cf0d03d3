#pragma once

#include "lle/types.hpp"

#include <vector>

namespace lle::weighted {

/// Per-point deformation statistics behind the deformed distance.
struct DeformationStats {
    Matrix tau;   ///< d x n unit mean-offset directions (zero when g_i = 0)
    Vector a;     ///< l_i / c2
    Vector b;     ///< ||g_i|| / c1
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Deformed distance dist(i,j) = ||x_i - x_j|| / (a_i + b_i cos theta),
/// statistics from the Euclidean kNN offsets, symmetrized by the larger of
/// the two directions. Denominators at or below 1e-12 are clamped, counted
/// in *clamped when given.
Matrix deformed_distance(const Matrix& x, int k, DeformationStats* stats = nullptr,
                         int* clamped = nullptr);

/// LLE with occurrence probabilities: distances divided by p_i
/// (symmetrized by max) and local Grams reweighted by sqrt(p_a p_b).
Embedding occurrence_weighted_lle(const Matrix& x, const Vector& probabilities,
                                  int k, Index p, double eps_scale = 1e-3);

/// Strengthen same-class weights by +delta and weaken cross-class ones by
/// -delta, then renormalize each row to sum one.
ReconstructionWeights adjust_weights_supervised(const ReconstructionWeights& w,
                                                const NeighborGraph& g,
                                                const std::vector<int>& labels,
                                                double delta);

/// Modified LLE: per point, s_i extra weight vectors built from the small
/// right singular vectors of the local Gram and a Householder alignment;
/// the embedding minimizes the summed objective over all of them.
/// Default s_i = max(1, k - p).
Embedding mlle(const Matrix& x, int k, Index p, double eps_scale = 1e-3);

/// The accumulated MLLE objective matrix (exposed for tests).
Matrix mlle_matrix(const Matrix& x, int k, Index p, double eps_scale = 1e-3);

/// Nonnegative least squares min ||A w - b||^2 over w >= 0,
/// Lawson-Hanson active set.
Vector nnls(const Matrix& a, const Vector& b, double tol = 1e-10);

/// Iterative LLE: nonnegative weights without the sum-to-one constraint,
/// embedding from the generalized eigenproblem M y = lambda D y with the
/// degree matrix of the symmetrized weight graph, alternating with kNN
/// graphs taken in the current embedding space. A zero NNLS optimum falls
/// back to the sum-to-one weights for that point.
Embedding iterative_lle(const Matrix& x, int k, Index p, int outer_iters,
                        double eps_scale = 1e-3, int* degree_clamps = nullptr);

/// The (M, D) pair of the final iteration (exposed for tests).
struct IterativeSystem {
    Matrix m;
    Vector degrees;
    Embedding embedding;
};

IterativeSystem iterative_lle_system(const Matrix& x, int k, Index p,
                                     int outer_iters, double eps_scale = 1e-3,
                                     int* degree_clamps = nullptr);

}  // namespace lle::weighted
