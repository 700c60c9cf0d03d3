#pragma once

#include "lle/types.hpp"

#include <vector>

namespace lle::neighbors {

/// D(i,j) = ||x_i - x_j||_2, exactly symmetric with a zero diagonal.
Matrix pairwise_euclidean(const Matrix& x);

/// Feature-space distances from a kernel:
/// D(i,j) = sqrt(K(i,i) - 2 K(i,j) + K(j,j)). Radicands in [-1e-10, 0) are
/// clamped to zero; anything lower is a non-PSD kernel error.
Matrix pairwise_feature_space(const KernelMatrix& k);

/// kNN graph over a distance matrix. Neighbors are the k smallest
/// distances (self excluded), ordered ascending, ties broken by smaller
/// index.
NeighborGraph knn_graph(const Matrix& d, int k);

/// Per-point neighbor counts (local neighborhood selection).
NeighborGraph knn_graph(const Matrix& d, const std::vector<int>& k_per_point);

/// True iff the symmetrized edge set forms a single component.
bool is_connected(const NeighborGraph& g);

/// Shortest-path (graph geodesic) distances over the symmetrized kNN graph
/// of D, Euclidean edge weights, Dijkstra from every source. Throws when
/// the graph is disconnected, naming the component count.
Matrix geodesic_distances(const Matrix& d, int k);

}  // namespace lle::neighbors
