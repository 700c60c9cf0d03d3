#include "lle/model_select.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lle::model_select {

double residual_variance(const Matrix& d_x, const Matrix& d_y) {
    const Index n = d_x.rows();
    require(d_y.rows() == n && d_x.cols() == n && d_y.cols() == n,
            "residual_variance: size mismatch");
    require(n >= 3, "residual_variance: need at least 3 points");

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    double count = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double a = d_x(i, j);
            const double b = d_y(i, j);
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
            count += 1.0;
        }
    const double vx = sxx - sx * sx / count;
    const double vy = syy - sy * sy / count;
    if (vx <= 1e-300 || vy <= 1e-300)
        throw NumericalError(
            "residual_variance: constant distances, correlation undefined");
    const double cov = sxy - sx * sy / count;
    const double rho2 = (cov * cov) / (vx * vy);
    return 1.0 - rho2;
}

double procrustes_statistic(const Matrix& x_local, const Matrix& y_local) {
    const Index k = x_local.cols();
    require(k >= 2, "procrustes_statistic: need k >= 2");
    require(y_local.rows() == k, "procrustes_statistic: size mismatch");

    Matrix xc = x_local.transpose();  // k x d
    xc.rowwise() -= xc.colwise().mean();
    Matrix yc = y_local;  // k x p
    yc.rowwise() -= yc.colwise().mean();

    const auto dec = numlin::svd(xc.transpose() * yc);  // d x p
    const Matrix a = dec.u * dec.v.transpose();         // d x p, A^T A = I
    return (xc - yc * a.transpose()).squaredNorm();
}

double pne(const Matrix& x, const Matrix& y, const NeighborGraph& g_x,
           const NeighborGraph& g_y) {
    const Index n = x.cols();
    require(g_x.n() == n && g_y.n() == n, "pne: graph size mismatch");
    require(y.rows() == n, "pne: embedding size mismatch");

    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const auto& eta = g_x.neighbors[i];
        const auto& beta = g_y.neighbors[i];
        require(eta.size() == beta.size(), "pne: graphs must share k");
        const double k = static_cast<double>(eta.size());

        double local = 0.0;
        for (int j : eta) {
            const double dx = (x.col(i) - x.col(j)).norm();
            const double dy = (y.row(i) - y.row(j)).norm();
            local += (dx - dy) * (dx - dy) / k;
        }

        const std::set<int> eta_set(eta.begin(), eta.end());
        std::vector<int> discord;
        for (int j : beta)
            if (!eta_set.count(j)) discord.push_back(j);
        if (!discord.empty()) {
            const double kp = static_cast<double>(discord.size());
            for (int j : discord) {
                const double dx = (x.col(i) - x.col(j)).norm();
                const double dy = (y.row(i) - y.row(j)).norm();
                local += (dx - dy) * (dx - dy) / kp;
            }
        }
        total += local;
    }
    return total / (2.0 * static_cast<double>(n));
}

namespace {

double criterion_score(const Matrix& x, const Matrix& d_x, int k, Index p,
                       double eps_scale, KCriterion criterion) {
    const Embedding emb = core::lle(x, k, p, eps_scale);
    const Matrix yt = emb.y.transpose();  // p x n, points as columns
    switch (criterion) {
        case KCriterion::ResidualVariance:
            return residual_variance(d_x, neighbors::pairwise_euclidean(yt));
        case KCriterion::Procrustes: {
            const NeighborGraph g = neighbors::knn_graph(d_x, k);
            double sum = 0.0;
            for (Index i = 0; i < x.cols(); ++i) {
                const auto& nbr = g.neighbors[i];
                Matrix xl(x.rows(), nbr.size());
                Matrix yl(nbr.size(), emb.y.cols());
                for (std::size_t j = 0; j < nbr.size(); ++j) {
                    xl.col(j) = x.col(nbr[j]);
                    yl.row(j) = emb.y.row(nbr[j]);
                }
                Matrix xc = xl.transpose();
                xc.rowwise() -= xc.colwise().mean();
                const double denom = xc.squaredNorm();
                if (denom <= 1e-300) continue;  // collapsed neighborhood
                sum += procrustes_statistic(xl, yl) / denom;
            }
            return sum / static_cast<double>(x.cols());
        }
        case KCriterion::Pne: {
            const NeighborGraph g_x = neighbors::knn_graph(d_x, k);
            const NeighborGraph g_y =
                neighbors::knn_graph(neighbors::pairwise_euclidean(yt), k);
            return pne(x, emb.y, g_x, g_y);
        }
    }
    throw Error("unreachable");
}

}  // namespace

KSelection select_k(const Matrix& x, const KSearchSpec& spec,
                    KCriterion criterion) {
    const Index n = x.cols();
    require(spec.k_min >= 1 && spec.k_min <= spec.k_max && spec.k_max <= n - 1,
            "select_k: need 1 <= k_min <= k_max <= n-1");
    const Matrix d_x = neighbors::pairwise_euclidean(x);

    std::vector<int> candidates;
    KSelection out;
    if (spec.hierarchical) {
        // Reconstruction error per k; keep strict interior local minima.
        std::vector<double> eps;
        for (int k = spec.k_min; k <= spec.k_max; ++k) {
            const NeighborGraph g = neighbors::knn_graph(d_x, k);
            const auto w = core::reconstruction_weights(x, g, spec.eps_scale);
            eps.push_back(core::reconstruction_error(x, g, w));
        }
        for (std::size_t i = 1; i + 1 < eps.size(); ++i)
            if (eps[i] < eps[i - 1] && eps[i] < eps[i + 1])
                candidates.push_back(spec.k_min + static_cast<int>(i));
        if (candidates.empty()) {
            out.hierarchical_fallback = true;
            for (int k = spec.k_min; k <= spec.k_max; ++k) candidates.push_back(k);
        }
    } else {
        for (int k = spec.k_min; k <= spec.k_max; ++k) candidates.push_back(k);
    }

    double best = std::numeric_limits<double>::infinity();
    for (int k : candidates) {
        const double score =
            criterion_score(x, d_x, k, spec.p, spec.eps_scale, criterion);
        out.scores.emplace_back(k, score);
        if (score < best) {  // strict: ties keep the smallest k
            best = score;
            out.k = k;
        }
    }
    return out;
}

LnsResult lns(const Matrix& x, std::optional<int> k_cap) {
    const Index n = x.cols();
    require(n >= 3, "lns: need at least 3 points");
    const Matrix d = neighbors::pairwise_euclidean(x);

    int k_min = 0;
    Index edges = 0;
    for (int k = 1; k <= n - 1; ++k) {
        const NeighborGraph g = neighbors::knn_graph(d, k);
        if (neighbors::is_connected(g)) {
            k_min = k;
            edges = g.edge_count();
            break;
        }
    }
    if (k_min == 0)
        throw NumericalError("lns: kNN graph never becomes connected");

    const double ratio = static_cast<double>(n) * static_cast<double>(n) /
                         (static_cast<double>(k_min) * static_cast<double>(edges));
    int k_max = static_cast<int>(std::floor(ratio));
    k_max = std::clamp<int>(k_max, k_min + 1, static_cast<int>(n - 1));
    if (k_cap) k_max = std::min(k_max, *k_cap);
    require(k_max >= k_min + 1, "lns: k_cap leaves no candidates");

    const Matrix geo = neighbors::geodesic_distances(d, k_min);

    const int cand_count = k_max - k_min;
    LnsResult out;
    out.k_min = k_min;
    out.k_max = k_max;
    out.v.resize(n, cand_count);
    out.k_per_point.resize(n);

    for (int j = 0; j < cand_count; ++j) {
        const int k = k_min + 1 + j;
        const NeighborGraph ge = neighbors::knn_graph(d, k);
        const NeighborGraph gg = neighbors::knn_graph(geo, k);
        for (Index i = 0; i < n; ++i) {
            std::set<int> eu(ge.neighbors[i].begin(), ge.neighbors[i].end());
            int overlap = 0;
            for (int idx : gg.neighbors[i]) overlap += eu.count(idx);
            out.v(i, j) =
                static_cast<double>(k - overlap) / static_cast<double>(k);
        }
    }
    for (Index i = 0; i < n; ++i) {
        int best_j = 0;
        for (int j = 1; j < cand_count; ++j)
            if (out.v(i, j) <= out.v(i, best_j)) best_j = j;  // ties: largest k
        out.k_per_point[i] = k_min + 1 + best_j;
    }
    return out;
}

}  // namespace lle::model_select
