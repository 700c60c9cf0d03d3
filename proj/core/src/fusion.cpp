#include "lle/fusion.hpp"

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

namespace lle::fusion {

Embedding isolle(const Matrix& x, int k, Index p, double eps_scale) {
    const Matrix d = neighbors::pairwise_euclidean(x);
    const Matrix geo = neighbors::geodesic_distances(d, k);
    const NeighborGraph g = neighbors::knn_graph(geo, k);
    const auto w = core::reconstruction_weights(x, g, eps_scale);
    return core::embed(core::embedding_matrix(core::scatter_weights(w, g)), p);
}

Embedding lle_pca(const Matrix& x, int k, Index p, double eps_scale) {
    require(p <= x.rows(), "lle_pca: p cannot exceed the input dimension");
    const Matrix xc = dataset::center(x);
    const Embedding base = core::lle(xc, k, p, eps_scale);
    const Matrix projected = xc * base.y * base.y.transpose();  // d x n
    Embedding out;
    out.y = projected.topRows(p).transpose();
    out.eigenvalues = base.eigenvalues;
    out.scale = EmbeddingScale::Projection;
    out.disconnected_warning = base.disconnected_warning;
    return out;
}

namespace {

/// Top-p generalized eigenpairs of (A, B) for symmetric A and positive
/// definite B, via the Cholesky reduction.
std::pair<Matrix, Vector> generalized_top(const Matrix& a, const Matrix& b,
                                          Index p, const char* what) {
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(what) +
                             ": right-hand matrix is not positive definite");
    const Matrix l = llt.matrixL();
    const Matrix inv_l = l.triangularView<Eigen::Lower>().solve(
        Matrix::Identity(b.rows(), b.rows()));
    Matrix c = inv_l * a * inv_l.transpose();
    c = 0.5 * (c + c.transpose()).eval();
    const auto eig = numlin::sym_eigen(c);
    Matrix u(a.rows(), p);
    Vector vals(p);
    for (Index r = 0; r < p; ++r) {
        const Index src = a.rows() - 1 - r;  // descending
        u.col(r) = inv_l.transpose() * eig.eigenvectors.col(src);
        vals(r) = eig.eigenvalues(src);
    }
    return {std::move(u), std::move(vals)};
}

Matrix scatter_regularized(Matrix s) {
    const double tr = s.trace();
    s.diagonal().array() += 1e-6 * std::max(tr, 1e-300);
    // Numerical floor: Cholesky needs strict positive definiteness.
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin <= 0.0) s.diagonal().array() += -lmin + 1e-12 * std::max(tr, 1.0);
    return s;
}

}  // namespace

FdaProjection fda_projection(const Matrix& x, const std::vector<int>& labels,
                             Index p, bool* rank_warning) {
    numlin::require_finite(x, "fda_projection");
    const Index n = x.cols();
    require(static_cast<Index>(labels.size()) == n,
            "fda_projection: one label per point required");
    int classes = 0;
    for (int l : labels) {
        require(l >= 0, "fda_projection: labels must be non-negative");
        classes = std::max(classes, l + 1);
    }
    require(classes >= 2, "fda_projection: need at least two classes");
    require(p >= 1 && p <= x.rows(), "fda_projection: p must be in [1, d]");
    if (rank_warning) *rank_warning = p > classes - 1;

    const Vector mean = x.rowwise().mean();
    Matrix s_b = Matrix::Zero(x.rows(), x.rows());
    Matrix s_w = Matrix::Zero(x.rows(), x.rows());
    for (int c = 0; c < classes; ++c) {
        Index count = 0;
        Vector mu = Vector::Zero(x.rows());
        for (Index i = 0; i < n; ++i)
            if (labels[i] == c) {
                mu += x.col(i);
                ++count;
            }
        require(count > 0, "fda_projection: empty class " + std::to_string(c));
        mu /= static_cast<double>(count);
        s_b += static_cast<double>(count) * (mu - mean) * (mu - mean).transpose();
        for (Index i = 0; i < n; ++i)
            if (labels[i] == c)
                s_w += (x.col(i) - mu) * (x.col(i) - mu).transpose();
    }

    auto [u, vals] =
        generalized_top(s_b, scatter_regularized(std::move(s_w)), p, "fda_projection");
    return {std::move(u), std::move(vals)};
}

Embedding ullelda(const Matrix& x, const std::vector<int>& labels, int k,
                  Index p, double eps_scale) {
    core::Pipeline pl = core::lle_pipeline(x, k, p, eps_scale);
    const FdaProjection fda =
        fda_projection(pl.embedding.y.transpose(), labels, p);
    const Matrix z = pl.embedding.y * fda.u;  // n x p
    Embedding out;
    out.y = pl.w * z;
    out.eigenvalues = pl.embedding.eigenvalues;
    out.scale = EmbeddingScale::Projection;
    out.disconnected_warning = pl.embedding.disconnected_warning;
    return out;
}

DlleResult dlle(const Matrix& x, const std::vector<int>& labels, int k,
                Index p, double eps_scale) {
    numlin::require_finite(x, "dlle");
    const Index n = x.cols();
    require(static_cast<Index>(labels.size()) == n,
            "dlle: one label per point required");
    require(p >= 1 && p <= x.rows(), "dlle: p must be in [1, d]");
    const Matrix d = neighbors::pairwise_euclidean(x);

    // Same-class and cross-class kNN lists.
    NeighborGraph same, cross;
    same.neighbors.resize(n);
    cross.neighbors.resize(n);
    for (Index i = 0; i < n; ++i) {
        std::vector<int> mates, others;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            (labels[j] == labels[i] ? mates : others).push_back(static_cast<int>(j));
        }
        require(static_cast<int>(mates.size()) >= k,
                "dlle: class of point " + std::to_string(i) +
                    " has fewer than k+1 members");
        require(!others.empty(), "dlle: need at least two classes");
        auto by_distance = [&](int a, int b) {
            if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
            return a < b;
        };
        std::partial_sort(mates.begin(), mates.begin() + k, mates.end(), by_distance);
        mates.resize(k);
        same.neighbors[i] = std::move(mates);
        const int kc = std::min<int>(k, static_cast<int>(others.size()));
        std::partial_sort(others.begin(), others.begin() + kc, others.end(), by_distance);
        others.resize(kc);
        cross.neighbors[i] = std::move(others);
    }

    const auto weights = core::reconstruction_weights(x, same, eps_scale);
    const Matrix w = core::scatter_weights(weights, same).toDense();

    Matrix s = w + w.transpose() - w.transpose() * w;
    s.diagonal().setZero();
    s = 0.5 * (s + s.transpose()).eval();

    Matrix b = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (int j : cross.neighbors[i]) {
            b(i, j) = 1.0 / static_cast<double>(k);
            b(j, i) = 1.0 / static_cast<double>(k);
        }

    const Matrix l_s = Matrix(s.rowwise().sum().asDiagonal()) - s;
    const Matrix l_b = Matrix(b.rowwise().sum().asDiagonal()) - b;

    const Matrix left = x * l_b * x.transpose();
    const Matrix right = x * l_s * x.transpose();
    auto [u, vals] = generalized_top(0.5 * (left + left.transpose()),
                                     scatter_regularized(0.5 * (right + right.transpose())),
                                     p, "dlle");

    DlleResult out;
    out.u = std::move(u);
    out.embedded.y = (out.u.transpose() * x).transpose();
    out.embedded.eigenvalues = std::move(vals);
    out.embedded.scale = EmbeddingScale::Projection;
    out.s = std::move(s);
    out.b = std::move(b);
    return out;
}

}  // namespace lle::fusion
