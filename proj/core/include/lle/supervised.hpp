#pragma once

#include "lle/types.hpp"

#include <optional>
#include <vector>

namespace lle::supervised {

enum class DistanceMode { Slle, Eslle, Semi };

/// Label-aware distance modification.
struct DistanceModifier {
    DistanceMode mode = DistanceMode::Slle;
    double alpha = 0.0;  ///< in [0, 1]

    static DistanceModifier slle(double alpha) { return {DistanceMode::Slle, alpha}; }
    static DistanceModifier eslle(double alpha) { return {DistanceMode::Eslle, alpha}; }
    static DistanceModifier semi(double alpha) { return {DistanceMode::Semi, alpha}; }
};

/// Modify a distance matrix by class labels:
///   slle:  D + alpha d_max (1 1^T - Delta)
///   eslle: sqrt(1 - exp(-D^2/beta)) same class,
///          sqrt(exp(D^2/beta)) - alpha different class
///   semi:  the three-case formula on D'' = D / sqrt(m_i m_j), with the
///          -alpha bonus for labeled same-class pairs
/// Negative outputs are clamped to zero, counted in *clamped when given.
/// x supplies d_max, beta and the m_i; labels may have gaps only in semi
/// mode.
Matrix modified_distance(const Matrix& d, const Matrix& x,
                         const std::vector<std::optional<int>>& labels,
                         const DistanceModifier& modifier,
                         int* clamped = nullptr);

/// SLLE: kNN from the modified distances, weights on raw coordinates,
/// embedding as usual. Also runs the eslle / semi flavors via `modifier`.
Embedding supervised_lle(const Matrix& x,
                         const std::vector<std::optional<int>>& labels,
                         const DistanceModifier& modifier, int k, Index p,
                         double eps_scale);

/// Convenience wrappers with full labels.
Embedding slle(const Matrix& x, const std::vector<int>& labels, double alpha,
               int k, Index p, double eps_scale = 1e-3);
Embedding eslle(const Matrix& x, const std::vector<int>& labels, double alpha,
                int k, Index p, double eps_scale = 1e-3);

/// Ridge projection fitted to an embedding: u_j = (X X^T + beta I)^{-1} X y^j.
struct LinearProjection {
    Matrix u;  ///< d x p
    double beta_ridge = 0.0;
};

LinearProjection sllep_fit(const Matrix& x, const Matrix& y, double beta_ridge);

/// Apply a fitted projection: rows are U^T x_t.
Matrix sllep_apply(const LinearProjection& proj, const Matrix& x_test);

struct PlleResult {
    Matrix train_y;              ///< n x p, joint supervised embedding rows 1..n
    Matrix test_y;               ///< n_t x p, rows n+1..n+n_t
    Matrix test_probabilities;   ///< n_t x c
};

/// Probabilistic SLLE: unsupervised LLE + OOS, one-vs-rest logistic fits on
/// the training embedding, probabilistic label agreement Delta, then a
/// joint SLLE-style rerun over train and test together.
PlleResult plle(const Matrix& x_train, const std::vector<int>& labels,
                const Matrix& x_test, int k, Index p, double alpha,
                double eps_scale = 1e-3);

/// Guided LLE: embed (1-alpha) M + alpha L_delta where L_delta is the
/// Laplacian of the delta label kernel. Minimizing y^T L_delta y pulls
/// same-class points together, which is the label-HSIC maximization
/// stated over the centered unit-covariance embeddings.
Embedding glle(const Matrix& x, const std::vector<int>& labels, double alpha,
               int k, Index p, double eps_scale = 1e-3);

/// The mixed matrix GLLE embeds (exposed for tests).
Matrix glle_matrix(const Matrix& x, const std::vector<int>& labels,
                   double alpha, int k, double eps_scale = 1e-3);

/// One-vs-rest logistic fits over embedding rows, gradient ascent with a
/// small L2 penalty. Returns per-class (intercept, coefficient) pairs.
struct LogisticModel {
    Vector intercepts;  ///< c
    Matrix coefficients;  ///< p x c
};

LogisticModel fit_logistic_ovr(const Matrix& y, const std::vector<int>& labels,
                               int classes, double step = 0.1,
                               int iterations = 2000, double l2 = 1e-4);

/// Normalized class probabilities for embedding rows under the model.
Matrix logistic_probabilities(const LogisticModel& model, const Matrix& y);

}  // namespace lle::supervised
