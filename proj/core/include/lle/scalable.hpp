#pragma once

#include "lle/types.hpp"

#include <cstdint>
#include <vector>

namespace lle::scalable {

/// Projected-gradient settings for the incremental refinement.
struct OptimizerSettings {
    double step_scale = 1e-2;  ///< step = step_scale * n / ||M||_F
    int max_iterations = 500;
    double gradient_tol = 1e-6;
};

/// Streaming LLE state: the current data, embedding, retained spectrum and
/// Gram-Laplacian. Single writer; concurrent readers are safe between
/// updates.
struct IncrementalState {
    Matrix x;            ///< d x n
    Matrix y;            ///< n x p, (1/n) Y^T Y = I
    Vector eigenvalues;  ///< p retained eigenvalues of the training M
    Matrix m;            ///< current Gram-Laplacian
    NeighborGraph graph;
    ReconstructionWeights weights;
    int k = 0;
    Index p = 0;
    double eps_scale = 0.0;
    OptimizerSettings optimizer;

    Index n() const { return x.cols(); }
};

/// Train the initial state with a full LLE run.
IncrementalState incremental_init(const Matrix& x, int k, Index p,
                                  double eps_scale,
                                  OptimizerSettings opt = {});

/// Fold a batch of new points into the state: rebuild weights for the new
/// points and for old points whose neighborhoods changed, re-assemble M,
/// seed the new rows by linear reconstruction, and refine all rows by
/// projected first-order descent on the embedding objective. The retained
/// spectrum is re-estimated from the refined rows, so the spectrum
/// objective below never exceeds its value at the initialization.
IncrementalState incremental_update(const IncrementalState& state,
                                    const Matrix& batch);

/// || Y^T M Y - n Lambda ||_F^2 with the state's retained eigenvalues.
double incremental_objective(const IncrementalState& state);

struct LandmarkSet {
    std::vector<int> indices;  ///< distinct, into the dataset

    Index m() const { return static_cast<Index>(indices.size()); }
};

enum class LandmarkStrategy { UniformRandom, Stride };

LandmarkSet select_landmarks(Index n, Index m, LandmarkStrategy strategy,
                             std::uint64_t seed = 0);

/// Nystrom factor of a PSD kernel from its landmark block A (m x m) and
/// cross block B (m x (n-m)):
/// Y = [Sigma^{1/2} U^T, Sigma^{-1/2} U^T B] truncated to the top p rows
/// by descending eigenvalue of A. Y^T Y reproduces the kernel
/// (exactly when rank(K) <= m).
Embedding nystrom_embed(const Matrix& a, const Matrix& b, Index p);

/// Landmark LLE via the Nystrom factor of the kernel mu I - M (blocks cut
/// from the full sparse M; only the eigenproblem is reduced). The constant
/// kernel direction is dropped and the output re-centered and whitened to
/// the unit-covariance convention. mu <= 0 picks
/// lambda_max(M) (1 + 1e-6).
Embedding nystrom_lle(const Matrix& x, int k, Index p,
                      const LandmarkSet& landmarks, double mu = 0.0,
                      double eps_scale = 1e-3);

/// Locally Linear Landmarks: barycentric projection of every point onto
/// the m landmarks, reduced eigenproblem on U^T M U, then Y = U Y_tilde,
/// re-centered and whitened to unit covariance.
struct LllResult {
    Embedding all;       ///< n x p
    Matrix landmark_y;   ///< m x p eigenvectors of the reduced problem
    Matrix projection;   ///< n x m barycentric weights onto landmarks
};

LllResult lll_embed(const Matrix& x, int k, Index p,
                    const LandmarkSet& landmarks, double eps_scale = 1e-3);

}  // namespace lle::scalable
