#include "lle/oos.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

namespace lle::oos {

TrainedModel train(const Matrix& x, int k, Index p, double eps_scale) {
    core::Pipeline pl = core::lle_pipeline(x, k, p, eps_scale);
    TrainedModel model;
    model.x = x;
    model.y = pl.embedding.y;
    model.w = std::move(pl.w);
    model.m = std::move(pl.m);
    model.eigenvalues = pl.embedding.eigenvalues;
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.m, Eigen::EigenvaluesOnly);
    model.lambda_max = es.eigenvalues().maxCoeff();
    model.k = k;
    model.eps_scale = eps_scale;
    return model;
}

Matrix oos_weights(const TrainedModel& model, const Matrix& x_test) {
    numlin::require_finite(x_test, "oos_weights");
    const Index n = model.n();
    const Index nt = x_test.cols();
    require(x_test.rows() == model.x.rows(), "oos: dimension mismatch");
    require(model.k >= 1 && model.k <= n, "oos: k must be in [1, n]");

    Matrix omega = Matrix::Zero(n, nt);
    std::vector<int> idx(n);
    for (Index t = 0; t < nt; ++t) {
        for (Index i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
        std::partial_sort(
            idx.begin(), idx.begin() + model.k, idx.end(), [&](int a, int b) {
                const double da = (model.x.col(a) - x_test.col(t)).norm();
                const double db = (model.x.col(b) - x_test.col(t)).norm();
                if (da != db) return da < db;
                return a < b;
            });
        Matrix nb(model.x.rows(), model.k);
        for (int j = 0; j < model.k; ++j) nb.col(j) = model.x.col(idx[j]);
        const Matrix gram = core::local_gram(x_test.col(t), nb, model.eps_scale);
        const Vector w =
            core::gram_weights(gram, "oos weights for test point " + std::to_string(t));
        for (int j = 0; j < model.k; ++j) omega(idx[j], t) = w(j);
    }
    return omega;
}

OosResult oos_reconstruct(const TrainedModel& model, const Matrix& x_test) {
    const Matrix omega = oos_weights(model, x_test);
    return {omega.transpose() * model.y};
}

Matrix center_oos_kernel(const Matrix& k_train, const Matrix& k_cross) {
    numlin::require_finite(k_train, "center_oos_kernel");
    numlin::require_finite(k_cross, "center_oos_kernel");
    const Index n = k_train.rows();
    require(k_train.cols() == n, "center_oos_kernel: train kernel not square");
    require(k_cross.rows() == n, "center_oos_kernel: cross kernel row mismatch");
    const Vector col_mean = k_cross.colwise().mean().transpose();  // n_t
    const Vector row_mean = k_train.rowwise().mean();              // n
    const double grand = k_train.mean();
    Matrix out = k_cross;
    out.rowwise() -= col_mean.transpose();
    out.colwise() -= row_mean;
    out.array() += grand;
    return out;
}

OosResult oos_eigenfunctions(const TrainedModel& model, const Matrix& x_test,
                             double mu) {
    const Index p = model.p();
    const Matrix omega = oos_weights(model, x_test);  // n x n_t
    // Soft-similarity kernel between training j and test i; the
    // train-reconstructed-by-test direction reuses the transpose of the
    // computed test-to-train weights.
    const Matrix k2 = 2.0 * omega - model.w.transpose() * omega;
    const Matrix combined = (mu - 1.0) * omega + k2;  // n x n_t
    Matrix yt = combined.transpose() * model.y;       // n_t x p
    for (Index r = 0; r < p; ++r) {
        const double delta = mu - model.eigenvalues(r);
        if (delta <= 1e-12)
            throw NumericalError(
                "oos_eigenfunctions: kernel eigenvalue for dimension " +
                std::to_string(r) + " is not positive (mu too small)");
        yt.col(r) /= std::sqrt(delta);
    }
    return {std::move(yt)};
}

namespace {

/// Log-kernel rows normalized in a way that survives far-away points:
/// entries are exp(a_j - logsumexp(a)). Throws when the raw row underflows
/// to zero (max exponent below log(1e-300)).
Matrix normalized_gaussian_rows(const Matrix& points, const Matrix& anchors,
                                const Vector& sigma, const char* what) {
    const Index rows = points.cols();
    const Index cols = anchors.cols();
    Matrix out(rows, cols);
    Vector a(cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const double d2 = (points.col(i) - anchors.col(j)).squaredNorm();
            a(j) = -d2 / (2.0 * sigma(j) * sigma(j));
        }
        const double amax = a.maxCoeff();
        if (amax < -690.0)  // log(1e-300)
            throw NumericalError(std::string(what) + ": point " +
                                 std::to_string(i) +
                                 " is isolated (kernel row underflows)");
        const double lse = amax + std::log((a.array() - amax).exp().sum());
        out.row(i) = (a.array() - lse).exp();
    }
    return out;
}

}  // namespace

OosResult oos_kernel_mapping(const TrainedModel& model, const Matrix& x_test,
                             double gamma) {
    numlin::require_finite(x_test, "oos_kernel_mapping");
    require(gamma > 0.0, "oos_kernel_mapping: gamma must be positive");
    require(x_test.rows() == model.x.rows(), "oos: dimension mismatch");
    const Index n = model.n();

    Vector sigma(n);
    for (Index j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        double best_positive = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < n; ++i) {
            if (i == j) continue;
            const double d = (model.x.col(i) - model.x.col(j)).norm();
            best = std::min(best, d);
            if (d > 0.0) best_positive = std::min(best_positive, d);
        }
        if (n == 1) best = 1.0;
        // Duplicated training points give a zero bandwidth; fall back to the
        // nearest distinct point so the kernel stays finite.
        if (best <= 0.0)
            best = std::isfinite(best_positive) ? best_positive : 1.0;
        sigma(j) = gamma * best;
    }

    const Matrix k2 =
        normalized_gaussian_rows(model.x, model.x, sigma, "oos_kernel_mapping (train)");
    const Matrix a = numlin::pseudo_inverse(k2) * model.y;
    const Matrix k2t =
        normalized_gaussian_rows(x_test, model.x, sigma, "oos_kernel_mapping");
    return {k2t * a};
}

}  // namespace lle::oos
