#include "lle/weighted.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lle::weighted {

Matrix deformed_distance(const Matrix& x, int k, DeformationStats* stats,
                         int* clamped) {
    numlin::require_finite(x, "deformed_distance");
    const Index n = x.cols();
    const Index d = x.rows();
    require(k >= 1 && k <= n - 1, "deformed_distance: k must be in [1, n-1]");

    const Matrix euclid = neighbors::pairwise_euclidean(x);
    const NeighborGraph g = neighbors::knn_graph(euclid, k);

    const double lg = std::lgamma((static_cast<double>(d) + 1.0) / 2.0) -
                      std::lgamma(static_cast<double>(d) / 2.0);
    const double c2 = std::sqrt(2.0) * std::exp(lg);
    const double c1 = c2 / static_cast<double>(d);

    DeformationStats st;
    st.c1 = c1;
    st.c2 = c2;
    st.tau = Matrix::Zero(d, n);
    st.a.resize(n);
    st.b.resize(n);
    for (Index i = 0; i < n; ++i) {
        Vector gi = Vector::Zero(d);
        double li = 0.0;
        for (int j : g.neighbors[i]) {
            gi += x.col(j) - x.col(i);
            li += (x.col(j) - x.col(i)).norm();
        }
        gi /= static_cast<double>(k);
        li /= static_cast<double>(k);
        const double gnorm = gi.norm();
        if (gnorm > 0.0) st.tau.col(i) = gi / gnorm;
        st.a(i) = li / c2;
        st.b(i) = gnorm / c1;
    }

    int clamp_count = 0;
    Matrix dist = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double e = euclid(i, j);
            if (e == 0.0) continue;  // coincident points stay at distance 0
            const double cos_theta =
                (x.col(j) - x.col(i)).dot(st.tau.col(i)) / e;
            double denom = st.a(i) + st.b(i) * cos_theta;
            if (denom <= 1e-12) {
                denom = 1e-12;
                ++clamp_count;
            }
            dist(i, j) = e / denom;
        }
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::max(dist(i, j), dist(j, i));
            dist(i, j) = v;
            dist(j, i) = v;
        }
    if (stats) *stats = std::move(st);
    if (clamped) *clamped += clamp_count;
    return dist;
}

Embedding occurrence_weighted_lle(const Matrix& x, const Vector& probabilities,
                                  int k, Index p, double eps_scale) {
    numlin::require_finite(x, "occurrence_weighted_lle");
    const Index n = x.cols();
    require(probabilities.size() == n,
            "occurrence_weighted_lle: one probability per point required");
    require(probabilities.minCoeff() > 0.0 && probabilities.maxCoeff() <= 1.0,
            "occurrence_weighted_lle: probabilities must be in (0, 1]");

    const Matrix euclid = neighbors::pairwise_euclidean(x);
    Matrix dist(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            dist(i, j) = euclid(i, j) / std::sqrt(probabilities(i));
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::max(dist(i, j), dist(j, i));
            dist(i, j) = v;
            dist(j, i) = v;
        }
    dist.diagonal().setZero();

    const NeighborGraph g = neighbors::knn_graph(dist, k);
    ReconstructionWeights w;
    w.rows.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& nbr = g.neighbors[i];
        const Index kk = static_cast<Index>(nbr.size());
        Matrix pts(x.rows(), kk);
        for (Index j = 0; j < kk; ++j) pts.col(j) = x.col(nbr[j]);
        const Matrix offsets = x.col(i).replicate(1, kk) - pts;
        Matrix gram = offsets.transpose() * offsets;
        for (Index a = 0; a < kk; ++a)
            for (Index b = 0; b < kk; ++b)
                gram(a, b) *= std::sqrt(probabilities(nbr[a]) *
                                        probabilities(nbr[b]));
        gram = core::regularize_gram(0.5 * (gram + gram.transpose()), eps_scale,
                                     kk > x.rows());
        w.rows[i] = core::gram_weights(
            gram, "occurrence weights for point " + std::to_string(i));
    }
    return core::embed(core::embedding_matrix(core::scatter_weights(w, g)), p);
}

ReconstructionWeights adjust_weights_supervised(const ReconstructionWeights& w,
                                                const NeighborGraph& g,
                                                const std::vector<int>& labels,
                                                double delta) {
    require(delta >= 0.0, "adjust_weights_supervised: delta must be >= 0");
    require(w.n() == g.n(), "adjust_weights_supervised: size mismatch");
    require(static_cast<Index>(labels.size()) == g.n(),
            "adjust_weights_supervised: one label per point required");
    ReconstructionWeights out;
    out.rows.resize(w.n());
    for (Index i = 0; i < w.n(); ++i) {
        Vector row = w.rows[i];
        const auto& nbr = g.neighbors[i];
        for (std::size_t j = 0; j < nbr.size(); ++j)
            row(static_cast<Index>(j)) +=
                labels[i] == labels[nbr[j]] ? delta : -delta;
        const double sum = row.sum();
        if (std::abs(sum) <= 1e-12)
            throw NumericalError(
                "adjust_weights_supervised: row " + std::to_string(i) +
                " sums to zero after adjustment, cannot renormalize");
        out.rows[i] = row / sum;
    }
    return out;
}

Matrix mlle_matrix(const Matrix& x, int k, Index p, double eps_scale) {
    numlin::require_finite(x, "mlle");
    const Index n = x.cols();
    require(k > p, "mlle: needs k > p");
    const NeighborGraph g =
        neighbors::knn_graph(neighbors::pairwise_euclidean(x), k);
    const auto w = core::reconstruction_weights(x, g, eps_scale);

    const Index s = std::max<Index>(1, k - p);
    Matrix phi = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& nbr = g.neighbors[i];
        Matrix pts(x.rows(), k);
        for (int j = 0; j < k; ++j) pts.col(j) = x.col(nbr[j]);
        const Matrix offsets = x.col(i).replicate(1, k) - pts;
        Matrix gram = offsets.transpose() * offsets;
        gram = 0.5 * (gram + gram.transpose()).eval();

        const auto dec = numlin::svd(gram);
        Matrix v(k, s);  // s smallest right singular vectors
        for (Index c = 0; c < s; ++c) v.col(c) = dec.v.col(k - 1 - c);

        const Vector vi = v.transpose() * Vector::Ones(k);
        const double alpha_i = vi.norm() / std::sqrt(static_cast<double>(s));
        Matrix house = Matrix::Identity(s, s);
        const Vector u = vi - alpha_i * Vector::Ones(s);
        if (u.norm() >= 1e-12)
            house -= 2.0 * (u * u.transpose()) / u.squaredNorm();

        for (Index l = 0; l < s; ++l) {
            const Vector wl =
                (1.0 - alpha_i) * w.rows[i] + v * house.col(l);
            Vector r = Vector::Zero(n);
            r(i) = 1.0;
            for (int j = 0; j < k; ++j) r(nbr[j]) -= wl(j);
            phi += r * r.transpose();
        }
    }
    return 0.5 * (phi + phi.transpose()).eval();
}

Embedding mlle(const Matrix& x, int k, Index p, double eps_scale) {
    return core::embed(mlle_matrix(x, k, p, eps_scale), p);
}

Vector nnls(const Matrix& a, const Vector& b, double tol) {
    numlin::require_finite(a, "nnls");
    require(a.rows() == b.size(), "nnls: size mismatch");
    const Index k = a.cols();
    Vector w = Vector::Zero(k);
    std::vector<bool> passive(k, false);
    const double scale = std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());
    const double thresh = tol * scale;

    for (int outer = 0; outer < 3 * static_cast<int>(k) + 10; ++outer) {
        const Vector grad = a.transpose() * (b - a * w);
        Index best = -1;
        double best_g = thresh;
        for (Index i = 0; i < k; ++i)
            if (!passive[i] && grad(i) > best_g) {
                best_g = grad(i);
                best = i;
            }
        if (best < 0) break;
        passive[best] = true;

        for (int inner = 0; inner < static_cast<int>(k) + 5; ++inner) {
            std::vector<Index> idx;
            for (Index i = 0; i < k; ++i)
                if (passive[i]) idx.push_back(i);
            Matrix ap(a.rows(), idx.size());
            for (std::size_t c = 0; c < idx.size(); ++c) ap.col(c) = a.col(idx[c]);
            const Vector z =
                ap.colPivHouseholderQr().solve(b);

            bool all_positive = true;
            double best_step = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (z(c) <= 0.0) {
                    all_positive = false;
                    const double denom = w(idx[c]) - z(c);
                    if (denom > 0.0)
                        best_step = std::min(best_step, w(idx[c]) / denom);
                }
            if (all_positive) {
                w.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) w(idx[c]) = z(c);
                break;
            }
            for (std::size_t c = 0; c < idx.size(); ++c)
                w(idx[c]) += best_step * (z(c) - w(idx[c]));
            for (Index i = 0; i < k; ++i)
                if (passive[i] && w(i) <= 1e-14) {
                    passive[i] = false;
                    w(i) = 0.0;
                }
        }
    }
    return w;
}

IterativeSystem iterative_lle_system(const Matrix& x, int k, Index p,
                                     int outer_iters, double eps_scale,
                                     int* degree_clamps) {
    numlin::require_finite(x, "iterative_lle");
    const Index n = x.cols();
    require(outer_iters >= 1, "iterative_lle: outer_iters must be >= 1");

    NeighborGraph g = neighbors::knn_graph(neighbors::pairwise_euclidean(x), k);
    IterativeSystem sys;
    int clamps = 0;
    for (int round = 0; round < outer_iters; ++round) {
        ReconstructionWeights w;
        w.rows.resize(n);
        for (Index i = 0; i < n; ++i) {
            const auto& nbr = g.neighbors[i];
            Matrix pts(x.rows(), nbr.size());
            for (std::size_t j = 0; j < nbr.size(); ++j)
                pts.col(j) = x.col(nbr[j]);
            Vector wi = nnls(pts, x.col(i));
            if (wi.maxCoeff() <= 0.0) {
                // The unconstrained-in-sign zero vector is optimal for exact
                // interpolants; anchor with the sum-to-one weights instead.
                const Matrix gram =
                    core::local_gram(x.col(i), pts, eps_scale);
                wi = core::gram_weights(
                    gram, "iterative weights for point " + std::to_string(i));
            }
            w.rows[i] = wi;
        }
        const SparseMatrix ws = core::scatter_weights(w, g);
        sys.m = core::embedding_matrix(ws);

        const Matrix wd = ws.toDense();
        const Matrix sym = 0.5 * (wd + wd.transpose());
        sys.degrees = sym.rowwise().sum();
        for (Index i = 0; i < n; ++i)
            if (sys.degrees(i) < 1e-12) {
                sys.degrees(i) = 1e-12;
                ++clamps;
            }

        // Generalized problem M y = lambda D y via the diagonal splitting.
        const Vector dinv_sqrt = sys.degrees.cwiseSqrt().cwiseInverse();
        Matrix b = dinv_sqrt.asDiagonal() * sys.m * dinv_sqrt.asDiagonal();
        b = 0.5 * (b + b.transpose()).eval();
        const auto eig = numlin::sym_eigen(b);
        Matrix y(n, p);
        for (Index c = 0; c < p; ++c)
            y.col(c) = dinv_sqrt.asDiagonal() * eig.eigenvectors.col(c + 1) *
                       std::sqrt(static_cast<double>(n));
        sys.embedding.y = std::move(y);
        sys.embedding.eigenvalues = eig.eigenvalues.segment(1, p);
        sys.embedding.scale = EmbeddingScale::DegreeWeighted;
        sys.embedding.disconnected_warning = false;

        if (round + 1 < outer_iters) {
            const Matrix yt = sys.embedding.y.transpose();
            g = neighbors::knn_graph(neighbors::pairwise_euclidean(yt), k);
        }
    }
    if (degree_clamps) *degree_clamps += clamps;
    return sys;
}

Embedding iterative_lle(const Matrix& x, int k, Index p, int outer_iters,
                        double eps_scale, int* degree_clamps) {
    return iterative_lle_system(x, k, p, outer_iters, eps_scale, degree_clamps)
        .embedding;
}

}  // namespace lle::weighted
