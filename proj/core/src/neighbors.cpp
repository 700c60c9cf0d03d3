#include "lle/neighbors.hpp"

#include "lle/error.hpp"
#include "lle/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace lle {

Index NeighborGraph::edge_count() const {
    Index count = 0;
    for (const auto& adj : symmetrized()) count += adj.size();
    return count / 2;
}

std::vector<std::vector<int>> NeighborGraph::symmetrized() const {
    const Index nn = n();
    std::vector<std::vector<int>> adj(nn);
    for (Index i = 0; i < nn; ++i)
        for (int j : neighbors[i]) {
            adj[i].push_back(j);
            adj[j].push_back(static_cast<int>(i));
        }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

}  // namespace lle

namespace lle::neighbors {

Matrix pairwise_euclidean(const Matrix& x) {
    numlin::require_finite(x, "pairwise_euclidean");
    const Index n = x.cols();
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double v = (x.col(i) - x.col(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

Matrix pairwise_feature_space(const KernelMatrix& kernel) {
    const Matrix& k = kernel.k;
    numlin::require_finite(k, "pairwise_feature_space");
    require(k.rows() == k.cols(), "pairwise_feature_space: kernel not square");
    const Index n = k.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            double r = k(i, i) - 2.0 * k(i, j) + k(j, j);
            if (r < -1e-10)
                throw NumericalError(
                    "pairwise_feature_space: kernel not PSD (radicand " +
                    std::to_string(r) + " at pair " + std::to_string(i) + "," +
                    std::to_string(j) + ")");
            if (r < 0.0) r = 0.0;
            const double v = std::sqrt(r);
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

namespace {

std::vector<int> row_knn(const Matrix& d, Index i, int k) {
    const Index n = d.rows();
    std::vector<int> idx;
    idx.reserve(n - 1);
    for (Index j = 0; j < n; ++j)
        if (j != i) idx.push_back(static_cast<int>(j));
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int a, int b) {
                          if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

}  // namespace

NeighborGraph knn_graph(const Matrix& d, int k) {
    numlin::require_finite(d, "knn_graph");
    const Index n = d.rows();
    require(d.cols() == n, "knn_graph: distance matrix not square");
    require(k >= 1 && k <= n - 1, "knn_graph: k must be in [1, n-1]");
    NeighborGraph g;
    g.neighbors.resize(n);
    for (Index i = 0; i < n; ++i) g.neighbors[i] = row_knn(d, i, k);
    return g;
}

NeighborGraph knn_graph(const Matrix& d, const std::vector<int>& k_per_point) {
    numlin::require_finite(d, "knn_graph");
    const Index n = d.rows();
    require(d.cols() == n, "knn_graph: distance matrix not square");
    require(static_cast<Index>(k_per_point.size()) == n,
            "knn_graph: one k per point required");
    NeighborGraph g;
    g.neighbors.resize(n);
    for (Index i = 0; i < n; ++i) {
        const int k = k_per_point[i];
        require(k >= 1 && k <= n - 1, "knn_graph: k must be in [1, n-1]");
        g.neighbors[i] = row_knn(d, i, k);
    }
    return g;
}

namespace {

/// Component labels over the symmetrized graph; returns component count.
int label_components(const NeighborGraph& g, std::vector<int>& label) {
    const Index n = g.n();
    const auto adj = g.symmetrized();
    label.assign(n, -1);
    int comps = 0;
    std::vector<int> stack;
    for (Index s = 0; s < n; ++s) {
        if (label[s] != -1) continue;
        stack.push_back(static_cast<int>(s));
        label[s] = comps;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (label[v] == -1) {
                    label[v] = comps;
                    stack.push_back(v);
                }
        }
        ++comps;
    }
    return comps;
}

}  // namespace

bool is_connected(const NeighborGraph& g) {
    if (g.n() == 0) return true;
    std::vector<int> label;
    return label_components(g, label) == 1;
}

Matrix geodesic_distances(const Matrix& d, int k) {
    const NeighborGraph g = knn_graph(d, k);
    std::vector<int> label;
    const int comps = label_components(g, label);
    if (comps != 1)
        throw NumericalError("geodesic_distances: kNN graph has " +
                             std::to_string(comps) +
                             " components; increase k");
    const Index n = d.rows();
    const auto adj = g.symmetrized();

    Matrix geo(n, n);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n);
    using Item = std::pair<double, int>;
    for (Index s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), inf);
        dist[s] = 0.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        pq.emplace(0.0, static_cast<int>(s));
        while (!pq.empty()) {
            const auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u]) continue;
            for (int v : adj[u]) {
                const double alt = du + d(u, v);
                if (alt < dist[v]) {
                    dist[v] = alt;
                    pq.emplace(alt, v);
                }
            }
        }
        for (Index j = 0; j < n; ++j) geo(s, j) = dist[j];
    }
    // Per-direction float accumulation can differ in the last bits; take the
    // smaller path length so the matrix is exactly symmetric.
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::min(geo(i, j), geo(j, i));
            geo(i, j) = v;
            geo(j, i) = v;
        }
    return geo;
}

}  // namespace lle::neighbors
