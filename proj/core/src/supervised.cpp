#include "lle/supervised.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/kernels.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"
#include "lle/oos.hpp"

#include <cmath>

namespace lle::supervised {

namespace {

std::vector<std::optional<int>> wrap(const std::vector<int>& labels) {
    std::vector<std::optional<int>> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i];
    return out;
}

}  // namespace

Matrix modified_distance(const Matrix& d, const Matrix& x,
                         const std::vector<std::optional<int>>& labels,
                         const DistanceModifier& modifier, int* clamped) {
    const Index n = d.rows();
    require(d.cols() == n, "modified_distance: distance matrix not square");
    require(x.cols() == n, "modified_distance: data size mismatch");
    require(static_cast<Index>(labels.size()) == n,
            "modified_distance: one label slot per point required");
    require(modifier.alpha >= 0.0 && modifier.alpha <= 1.0,
            "modified_distance: alpha must be in [0, 1]");
    if (modifier.mode != DistanceMode::Semi)
        for (const auto& l : labels)
            require(l.has_value(), "modified_distance: mode requires full labels");

    const double alpha = modifier.alpha;
    Matrix out(n, n);
    int clamp_count = 0;
    auto clamp0 = [&](double v) {
        if (v < 0.0) {
            ++clamp_count;
            return 0.0;
        }
        return v;
    };

    if (modifier.mode == DistanceMode::Slle) {
        const double d_max = d.maxCoeff();
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                const bool same = labels[i] == labels[j];
                out(i, j) = clamp0(d(i, j) + (same ? 0.0 : alpha * d_max));
            }
    } else {
        // beta is the mean pairwise distance over distinct pairs
        double beta = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) beta += d(i, j);
        beta /= static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
        require(beta > 0.0, "modified_distance: all points coincide");

        if (modifier.mode == DistanceMode::Eslle) {
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) {
                    const double d2 = d(i, j) * d(i, j);
                    const double v =
                        *labels[i] == *labels[j]
                            ? std::sqrt(1.0 - std::exp(-d2 / beta))
                            : std::sqrt(std::exp(d2 / beta)) - alpha;
                    out(i, j) = clamp0(v);
                }
        } else {
            Vector m(n);
            for (Index i = 0; i < n; ++i) {
                double sum = 0.0;
                for (Index j = 0; j < n; ++j) sum += d(i, j);
                m(i) = sum / static_cast<double>(n);
            }
            require(m.minCoeff() > 0.0,
                    "modified_distance: a point coincides with every other");
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) {
                    const double dd = d(i, j) / std::sqrt(m(i) * m(j));
                    const double dd2 = dd * dd;
                    double v;
                    if (!labels[i] || !labels[j])
                        v = std::sqrt(1.0 - std::exp(-dd2 / beta));
                    else if (*labels[i] == *labels[j])
                        v = std::sqrt(1.0 - std::exp(-dd2 / beta)) - alpha;
                    else
                        v = std::sqrt(std::exp(dd2 / beta));
                    out(i, j) = clamp0(v);
                }
        }
    }
    out.diagonal().setZero();
    out = 0.5 * (out + out.transpose()).eval();
    if (clamped) *clamped += clamp_count;
    return out;
}

Embedding supervised_lle(const Matrix& x,
                         const std::vector<std::optional<int>>& labels,
                         const DistanceModifier& modifier, int k, Index p,
                         double eps_scale) {
    const Matrix d = neighbors::pairwise_euclidean(x);
    const Matrix dm = modified_distance(d, x, labels, modifier);
    const NeighborGraph g = neighbors::knn_graph(dm, k);
    const auto w = core::reconstruction_weights(x, g, eps_scale);
    return core::embed(core::embedding_matrix(core::scatter_weights(w, g)), p);
}

Embedding slle(const Matrix& x, const std::vector<int>& labels, double alpha,
               int k, Index p, double eps_scale) {
    return supervised_lle(x, wrap(labels), DistanceModifier::slle(alpha), k, p,
                          eps_scale);
}

Embedding eslle(const Matrix& x, const std::vector<int>& labels, double alpha,
                int k, Index p, double eps_scale) {
    return supervised_lle(x, wrap(labels), DistanceModifier::eslle(alpha), k, p,
                          eps_scale);
}

LinearProjection sllep_fit(const Matrix& x, const Matrix& y,
                           double beta_ridge) {
    numlin::require_finite(x, "sllep_fit");
    numlin::require_finite(y, "sllep_fit");
    require(beta_ridge >= 0.0, "sllep_fit: ridge parameter must be >= 0");
    require(y.rows() == x.cols(), "sllep_fit: embedding/data size mismatch");
    Matrix gram = x * x.transpose();
    gram.diagonal().array() += beta_ridge;
    LinearProjection out;
    out.beta_ridge = beta_ridge;
    try {
        out.u = numlin::solve_spd(gram, Matrix(x * y), "sllep_fit");
    } catch (const NumericalError&) {
        throw NumericalError(
            "sllep_fit: X X^T is singular; pass a positive ridge parameter");
    }
    return out;
}

Matrix sllep_apply(const LinearProjection& proj, const Matrix& x_test) {
    numlin::require_finite(x_test, "sllep_apply");
    require(x_test.rows() == proj.u.rows(), "sllep_apply: dimension mismatch");
    return (proj.u.transpose() * x_test).transpose();
}

LogisticModel fit_logistic_ovr(const Matrix& y, const std::vector<int>& labels,
                               int classes, double step, int iterations,
                               double l2) {
    const Index n = y.rows();
    require(static_cast<Index>(labels.size()) == n,
            "fit_logistic_ovr: one label per row required");
    require(classes >= 2, "fit_logistic_ovr: need at least two classes");

    LogisticModel model;
    model.intercepts = Vector::Zero(classes);
    model.coefficients = Matrix::Zero(y.cols(), classes);

    for (int c = 0; c < classes; ++c) {
        double a = 0.0;
        Vector b = Vector::Zero(y.cols());
        for (int it = 0; it < iterations; ++it) {
            double ga = 0.0;
            Vector gb = Vector::Zero(y.cols());
            for (Index i = 0; i < n; ++i) {
                const double z = a + b.dot(y.row(i));
                const double pi = 1.0 / (1.0 + std::exp(-z));
                const double t = labels[i] == c ? 1.0 : 0.0;
                ga += t - pi;
                gb += (t - pi) * y.row(i).transpose();
            }
            a += step * (ga / static_cast<double>(n) - l2 * a);
            b += step * (gb / static_cast<double>(n) - l2 * b);
            if (!std::isfinite(a) || !b.allFinite())
                throw NumericalError("fit_logistic_ovr: fit diverged for class " +
                                     std::to_string(c));
        }
        model.intercepts(c) = a;
        model.coefficients.col(c) = b;
    }
    return model;
}

Matrix logistic_probabilities(const LogisticModel& model, const Matrix& y) {
    const Index n = y.rows();
    const Index c = model.intercepts.size();
    Matrix out(n, c);
    for (Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (Index l = 0; l < c; ++l) {
            const double z =
                model.intercepts(l) + model.coefficients.col(l).dot(y.row(i));
            out(i, l) = 1.0 / (1.0 + std::exp(-z));
            sum += out(i, l);
        }
        out.row(i) /= sum;
    }
    return out;
}

PlleResult plle(const Matrix& x_train, const std::vector<int>& labels,
                const Matrix& x_test, int k, Index p, double alpha,
                double eps_scale) {
    const Index n = x_train.cols();
    const Index nt = x_test.cols();
    require(static_cast<Index>(labels.size()) == n,
            "plle: one label per training point required");
    int classes = 0;
    for (int l : labels) classes = std::max(classes, l + 1);
    require(classes >= 2, "plle: need at least two classes");

    // Step 1: unsupervised embedding of train, OOS linear reconstruction of
    // test.
    const oos::TrainedModel model = oos::train(x_train, k, p, eps_scale);
    const Matrix test_y0 = oos::oos_reconstruct(model, x_test).y;

    // Steps 2-3: logistic class probabilities for the test points; training
    // points are one-hot.
    const LogisticModel fit = fit_logistic_ovr(model.y, labels, classes);
    const Matrix test_prob = logistic_probabilities(fit, test_y0);

    Matrix prob(n + nt, classes);
    prob.setZero();
    for (Index i = 0; i < n; ++i) prob(i, labels[i]) = 1.0;
    prob.bottomRows(nt) = test_prob;

    // Step 4: joint modified distance with the probabilistic agreement.
    Matrix x_all(x_train.rows(), n + nt);
    x_all.leftCols(n) = x_train;
    x_all.rightCols(nt) = x_test;
    const Matrix d = neighbors::pairwise_euclidean(x_all);
    const double d_max = d.maxCoeff();

    Matrix dm(n + nt, n + nt);
    for (Index i = 0; i < n + nt; ++i)
        for (Index j = 0; j < n + nt; ++j) {
            const bool both_train = i < n && j < n;
            double delta;
            if (both_train)
                delta = labels[i] == labels[j] ? 1.0 : 0.0;
            else
                delta = prob.row(i).dot(prob.row(j));
            dm(i, j) = d(i, j) + alpha * d_max * (1.0 - delta);
        }
    dm.diagonal().setZero();
    dm = 0.5 * (dm + dm.transpose()).eval();

    // Step 5: rerun LLE over the joint set with the modified graph.
    const NeighborGraph g = neighbors::knn_graph(dm, k);
    const auto w = core::reconstruction_weights(x_all, g, eps_scale);
    const Embedding joint =
        core::embed(core::embedding_matrix(core::scatter_weights(w, g)), p);

    PlleResult out;
    out.train_y = joint.y.topRows(n);
    out.test_y = joint.y.bottomRows(nt);
    out.test_probabilities = test_prob;
    return out;
}

Matrix glle_matrix(const Matrix& x, const std::vector<int>& labels,
                   double alpha, int k, double eps_scale) {
    require(alpha >= 0.0 && alpha <= 1.0, "glle: alpha must be in [0, 1]");
    require(static_cast<Index>(labels.size()) == x.cols(),
            "glle: one label per point required");
    core::Pipeline pl = core::lle_pipeline(x, k, 1, eps_scale);

    const KernelMatrix kd = kernels::delta_kernel(labels);
    const Matrix lap =
        Matrix(kd.k.rowwise().sum().asDiagonal()) - kd.k;  // label Laplacian
    Matrix mixed = (1.0 - alpha) * pl.m + alpha * lap;
    return 0.5 * (mixed + mixed.transpose()).eval();
}

Embedding glle(const Matrix& x, const std::vector<int>& labels, double alpha,
               int k, Index p, double eps_scale) {
    return core::embed(glle_matrix(x, labels, alpha, k, eps_scale), p);
}

}  // namespace lle::supervised
