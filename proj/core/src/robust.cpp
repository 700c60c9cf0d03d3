#include "lle/robust.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lle::robust {

ReliabilityWeights rlle_reliability(const Matrix& x, const NeighborGraph& g,
                                    Index p, IrlsSettings settings) {
    numlin::require_finite(x, "rlle_reliability");
    const Index n = g.n();
    require(x.cols() == n, "rlle_reliability: graph/data size mismatch");
    const Index d = x.rows();
    require(p >= 1 && p <= d, "rlle_reliability: p must be in [1, d]");

    ReliabilityWeights out;
    out.a.resize(n);
    out.s.resize(n);
    out.bias.resize(d, n);
    out.basis.resize(n);

    for (Index i = 0; i < n; ++i) {
        const auto& nbr = g.neighbors[i];
        const Index k = static_cast<Index>(nbr.size());
        require(k >= p, "rlle_reliability: need k >= p");
        Matrix pts(d, k);
        for (Index j = 0; j < k; ++j) pts.col(j) = x.col(nbr[j]);

        Vector a = Vector::Ones(k);
        Vector b(d);
        Matrix u;
        for (int it = 0; it < settings.max_iterations; ++it) {
            b = (pts * a) / a.sum();
            Matrix s_i = Matrix::Zero(d, d);
            for (Index j = 0; j < k; ++j) {
                const Vector off = pts.col(j) - b;
                s_i += a(j) * off * off.transpose();
            }
            s_i /= static_cast<double>(k);
            const auto eig = numlin::sym_eigen(s_i);
            u = eig.eigenvectors.rightCols(p);  // top-p directions

            Vector e(k);
            double scale = 0.0;
            for (Index j = 0; j < k; ++j) {
                const Vector off = pts.col(j) - b;
                e(j) = (off - u * (u.transpose() * off)).squaredNorm();
                scale += off.squaredNorm() / static_cast<double>(k);
            }
            const double c = e.mean();
            // residuals at round-off level count as on-plane
            const double floor = 1e-12 * scale;
            Vector a_next(k);
            for (Index j = 0; j < k; ++j)
                a_next(j) = e(j) <= c + floor ? 1.0 : c / e(j);
            const double change = (a_next - a).cwiseAbs().maxCoeff();
            a = a_next;
            if (change < settings.tol) break;
        }
        out.a[i] = a;
        out.s(i) = a.mean();
        out.bias.col(i) = b;
        out.basis[i] = u;
    }
    return out;
}

Embedding rlle_embed(const SparseMatrix& w, const Vector& s, Index p) {
    const Index n = w.rows();
    require(s.size() == n, "rlle_embed: one reliability per point required");
    require(s.minCoeff() > 0.0, "rlle_embed: reliabilities must be positive");
    SparseMatrix l(n, n);
    l.setIdentity();
    l -= w;
    const Matrix ld = l.toDense();
    Matrix m = ld.transpose() * s.asDiagonal() * ld;
    m = 0.5 * (m + m.transpose()).eval();
    return core::embed(m, p);
}

Embedding rlle(const Matrix& x, int k, Index p, double eps_scale,
               IrlsSettings settings) {
    const NeighborGraph g =
        neighbors::knn_graph(neighbors::pairwise_euclidean(x), k);
    const auto w = core::reconstruction_weights(x, g, eps_scale);
    const auto rel =
        rlle_reliability(x, g, std::min<Index>(p, x.rows()), settings);
    // A point's embedding weight aggregates how reliably it fits in every
    // neighborhood that contains it. Its own-neighborhood mean cannot flag
    // an isolated outlier, whose neighbors all sit on the clean patch.
    const Index n = x.cols();
    Vector s = Vector::Zero(n);
    Vector hits = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        const auto& nbr = g.neighbors[i];
        for (std::size_t j = 0; j < nbr.size(); ++j) {
            s(nbr[j]) += rel.a[i](static_cast<Index>(j));
            hits(nbr[j]) += 1.0;
        }
    }
    for (Index i = 0; i < n; ++i)
        s(i) = hits(i) > 0.0 ? s(i) / hits(i) : rel.s(i);
    return rlle_embed(core::scatter_weights(w, g), s, p);
}

Vector rlle_l2_weights(const Matrix& g, double gamma) {
    numlin::require_finite(g, "rlle_l2_weights");
    require(gamma > 0.0, "rlle_l2_weights: gamma must be positive");
    Matrix reg = g;
    reg.diagonal().array() += gamma;
    return core::gram_weights(reg, "rlle_l2_weights");
}

namespace {

/// Exact Euclidean projection onto {w >= 0, c^T w = 1} with c = [1; -1]
/// blocks: w_i(mu) = max(w_i + mu c_i, 0), mu found by a sorted breakpoint
/// scan of the monotone function c^T w(mu).
Vector project_split_simplex(const Vector& w, Index k) {
    const Index kk = 2 * k;
    std::vector<double> breaks;
    breaks.reserve(kk);
    for (Index i = 0; i < k; ++i) breaks.push_back(-w(i));       // + block
    for (Index i = k; i < kk; ++i) breaks.push_back(w(i));       // - block
    std::sort(breaks.begin(), breaks.end());

    auto value = [&](double mu) {
        double v = 0.0;
        for (Index i = 0; i < k; ++i) v += std::max(w(i) + mu, 0.0);
        for (Index i = k; i < kk; ++i) v -= std::max(w(i) - mu, 0.0);
        return v;  // non-decreasing in mu
    };

    // Find the segment where value crosses 1, then solve linearly inside it.
    double lo = breaks.front() - 1.0;
    double hi = breaks.back() + 1.0;
    while (value(hi) < 1.0) hi += std::max(1.0, hi - lo);
    for (double b : breaks) {
        if (value(b) >= 1.0) {
            hi = b;
            break;
        }
        lo = b;
    }
    // Linear interpolation on [lo, hi]: value is affine there.
    const double vlo = value(lo);
    const double vhi = value(hi);
    double mu;
    if (vhi - vlo <= 0.0)
        mu = hi;
    else
        mu = lo + (1.0 - vlo) / (vhi - vlo) * (hi - lo);

    Vector out(kk);
    for (Index i = 0; i < k; ++i) out(i) = std::max(w(i) + mu, 0.0);
    for (Index i = k; i < kk; ++i) out(i) = std::max(w(i) - mu, 0.0);
    return out;
}

}  // namespace

double elastic_net_objective(const Vector& x, const Matrix& x_neighbors,
                             double gamma, double alpha, const Vector& w_plus,
                             const Vector& w_minus) {
    const Vector w = w_plus - w_minus;
    const Vector residual_dir = x * (w_plus.sum() + w_minus.sum()) -
                                x_neighbors * w_plus + x_neighbors * w_minus;
    return residual_dir.squaredNorm() +
           gamma * alpha * (w_plus.squaredNorm() + w_minus.squaredNorm()) +
           gamma * (1.0 - alpha) * (w_plus.sum() + w_minus.sum());
}

Vector rlle_elastic_net_weights(const Vector& x, const Matrix& x_neighbors,
                                double gamma, double alpha,
                                ElasticNetSettings settings) {
    numlin::require_finite(x_neighbors, "rlle_elastic_net_weights");
    require(gamma >= 0.0, "rlle_elastic_net_weights: gamma must be >= 0");
    require(alpha >= 0.0 && alpha <= 1.0,
            "rlle_elastic_net_weights: alpha must be in [0, 1]");
    const Index k = x_neighbors.cols();
    const Index kk = 2 * k;

    Matrix x_split(x.size(), kk);
    x_split.leftCols(k) = x_neighbors;
    x_split.rightCols(k) = -x_neighbors;
    const Matrix offsets = x.replicate(1, kk) - x_split;
    Matrix q = offsets.transpose() * offsets;
    q.diagonal().array() += gamma * alpha;
    q = 0.5 * (q + q.transpose()).eval();
    const Vector lin = Vector::Constant(kk, gamma * (1.0 - alpha));

    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-300);
    const double step = 1.0 / (2.0 * lmax);

    // Feasible start: the canonical split of the l2-regularized weights
    // (plain weights when gamma is zero), projected.
    Vector w0;
    {
        Matrix gram = offsets.leftCols(k).transpose() * offsets.leftCols(k);
        gram = core::regularize_gram(0.5 * (gram + gram.transpose()),
                                     core::kDefaultEpsScale, k > x.size());
        Vector base;
        if (gamma > 0.0)
            base = rlle_l2_weights(gram, gamma);
        else
            base = core::gram_weights(gram, "rlle_elastic_net_weights");
        w0 = Vector::Zero(kk);
        for (Index i = 0; i < k; ++i) {
            if (base(i) >= 0.0)
                w0(i) = base(i);
            else
                w0(k + i) = -base(i);
        }
    }
    Vector w = project_split_simplex(w0, k);

    auto objective = [&](const Vector& v) {
        return v.dot(q * v) + lin.dot(v);
    };
    double prev = objective(w);
    for (int it = 0; it < settings.max_iterations; ++it) {
        const Vector grad = 2.0 * (q * w) + lin;
        const Vector next = project_split_simplex(w - step * grad, k);
        const double obj = objective(next);
        const double move = (next - w).norm();
        w = next;
        if (!w.allFinite())
            throw NumericalError("rlle_elastic_net_weights: solver diverged");
        if (move < settings.tol && std::abs(prev - obj) <
                                       settings.tol * std::max(1.0, std::abs(prev)))
            break;
        prev = obj;
    }
    return w.head(k) - w.tail(k);
}

}  // namespace lle::robust
