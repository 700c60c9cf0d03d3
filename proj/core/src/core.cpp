#include "lle/core.hpp"

#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace lle::core {

namespace {

Matrix neighbor_columns(const Matrix& x, const std::vector<int>& nbr) {
    Matrix out(x.rows(), static_cast<Index>(nbr.size()));
    for (std::size_t j = 0; j < nbr.size(); ++j) out.col(j) = x.col(nbr[j]);
    return out;
}

}  // namespace

Matrix regularize_gram(Matrix g, double eps_scale, bool force) {
    require(eps_scale >= 0.0, "eps_scale must be >= 0");
    const Index k = g.rows();
    const double tr = g.trace();
    if (tr <= 0.0) return g;  // all offsets zero; caller falls back
    bool degenerate = force;
    if (!degenerate) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
        degenerate = es.eigenvalues()(0) < 1e-12 * tr;
    }
    if (degenerate)
        g.diagonal().array() += eps_scale * tr / static_cast<double>(k);
    return g;
}

Matrix local_gram(const Vector& x, const Matrix& x_neighbors,
                  double eps_scale) {
    numlin::require_finite(x_neighbors, "local_gram");
    require(x.size() == x_neighbors.rows(), "local_gram: dimension mismatch");
    const Index d = x.size();
    const Index k = x_neighbors.cols();
    const Matrix offsets = x.replicate(1, k) - x_neighbors;
    Matrix g = offsets.transpose() * offsets;
    g = 0.5 * (g + g.transpose());
    return regularize_gram(std::move(g), eps_scale, k > d);
}

Vector gram_weights(const Matrix& g, const std::string& who) {
    const Index k = g.rows();
    if (g.trace() <= 0.0)  // every neighbor coincides with the point
        return Vector::Constant(k, 1.0 / static_cast<double>(k));
    const Vector ones = Vector::Ones(k);
    const Vector raw = numlin::solve_spd(g, ones, who);
    const double denom = raw.sum();
    if (std::abs(denom) < 1e-12 * raw.cwiseAbs().sum() + 1e-300)
        throw NumericalError(who + ": degenerate local geometry (1^T G^-1 1 = 0)");
    return raw / denom;
}

ReconstructionWeights reconstruction_weights(const Matrix& x,
                                             const NeighborGraph& g,
                                             double eps_scale) {
    numlin::require_finite(x, "reconstruction_weights");
    require(g.n() == x.cols(), "reconstruction_weights: graph/data size mismatch");
    ReconstructionWeights w;
    w.rows.resize(g.n());
    for (Index i = 0; i < g.n(); ++i) {
        const Matrix gram =
            local_gram(x.col(i), neighbor_columns(x, g.neighbors[i]), eps_scale);
        w.rows[i] = gram_weights(gram, "weights for point " + std::to_string(i));
    }
    return w;
}

double reconstruction_error(const Matrix& x, const NeighborGraph& g,
                            const ReconstructionWeights& w) {
    double err = 0.0;
    for (Index i = 0; i < g.n(); ++i) {
        Vector rec = Vector::Zero(x.rows());
        const auto& nbr = g.neighbors[i];
        for (std::size_t j = 0; j < nbr.size(); ++j)
            rec += w.rows[i](static_cast<Index>(j)) * x.col(nbr[j]);
        err += (x.col(i) - rec).squaredNorm();
    }
    return err;
}

SparseMatrix scatter_weights(const ReconstructionWeights& w,
                             const NeighborGraph& g) {
    require(w.n() == g.n(), "scatter_weights: size mismatch");
    const Index n = g.n();
    std::vector<Eigen::Triplet<double>> trips;
    for (Index i = 0; i < n; ++i) {
        const auto& nbr = g.neighbors[i];
        require(w.rows[i].size() == static_cast<Index>(nbr.size()),
                "scatter_weights: row " + std::to_string(i) +
                    " does not match its neighbor list");
        for (std::size_t j = 0; j < nbr.size(); ++j)
            trips.emplace_back(static_cast<int>(i), nbr[j],
                               w.rows[i](static_cast<Index>(j)));
    }
    SparseMatrix out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Matrix embedding_matrix(const SparseMatrix& w) {
    const Index n = w.rows();
    require(w.cols() == n, "embedding_matrix: weight matrix not square");
    SparseMatrix l(n, n);
    l.setIdentity();
    l -= w;
    Matrix m = (SparseMatrix(l.transpose()) * l).toDense();
    return 0.5 * (m + m.transpose());
}

Embedding embed(const Matrix& m, Index p) {
    const Index n = m.rows();
    require(p >= 1 && p <= n - 1, "embed: p must be in [1, n-1]");
    // Shift the exact constant direction above the spectrum; the bottom p
    // eigenvectors of the shifted matrix are then the nontrivial ones.
    const double shift = m.norm() + 1.0;
    Matrix deflated = m;
    deflated.array() += shift / static_cast<double>(n);
    const auto eig = numlin::sym_eigen(deflated);

    Embedding out;
    out.y = eig.eigenvectors.leftCols(p) * std::sqrt(static_cast<double>(n));
    out.eigenvalues = eig.eigenvalues.head(p);
    out.scale = EmbeddingScale::UnitCovariance;
    out.disconnected_warning = eig.eigenvalues(0) < 1e-8;
    return out;
}

Pipeline lle_pipeline(const Matrix& x, int k, Index p, double eps_scale) {
    Pipeline pl;
    pl.graph = neighbors::knn_graph(neighbors::pairwise_euclidean(x), k);
    pl.weights = reconstruction_weights(x, pl.graph, eps_scale);
    pl.w = scatter_weights(pl.weights, pl.graph);
    pl.m = embedding_matrix(pl.w);
    pl.embedding = embed(pl.m, p);
    return pl;
}

Embedding lle(const Matrix& x, int k, Index p, double eps_scale) {
    return lle_pipeline(x, k, p, eps_scale).embedding;
}

Vector inverse_lle(const Vector& y_new, const Matrix& y, const Matrix& x,
                   int k, double eps_scale) {
    const Index n = y.rows();
    require(x.cols() == n, "inverse_lle: embedding/data size mismatch");
    require(k >= 1 && k <= n, "inverse_lle: k must be in [1, n]");
    require(y_new.size() == y.cols(), "inverse_lle: dimension mismatch");

    std::vector<int> idx(n);
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        const double da = (y.row(a).transpose() - y_new).norm();
        const double db = (y.row(b).transpose() - y_new).norm();
        if (da != db) return da < db;
        return a < b;
    });
    idx.resize(k);

    Matrix y_nb(y.cols(), k);
    for (int j = 0; j < k; ++j) y_nb.col(j) = y.row(idx[j]).transpose();
    const Matrix gram = local_gram(y_new, y_nb, eps_scale);
    const Vector w = gram_weights(gram, "inverse_lle");

    Vector out = Vector::Zero(x.rows());
    for (int j = 0; j < k; ++j) out += w(j) * x.col(idx[j]);
    return out;
}

SparseMatrix fuse_feature_weights(const std::vector<SparseMatrix>& weights) {
    require(!weights.empty(), "fuse_feature_weights: empty list");
    const Index n = weights.front().rows();
    SparseMatrix sum(n, weights.front().cols());
    for (const auto& w : weights) {
        require(w.rows() == sum.rows() && w.cols() == sum.cols(),
                "fuse_feature_weights: shape mismatch");
        sum += w;
    }
    return sum / static_cast<double>(weights.size());
}

}  // namespace lle::core
