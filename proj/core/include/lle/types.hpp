#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace lle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

using Index = Eigen::Index;

/// Input data are stored column-wise: a d x n matrix holds n points in R^d.
/// Embeddings follow the opposite convention and stack points row-wise
/// (n x p), matching the usual spectral-embedding layout.

/// k-nearest-neighbor graph. Neighbor lists are ordered by ascending
/// distance, ties broken by smaller index; no self loops. Lists may have
/// different lengths when a per-point k is in use.
struct NeighborGraph {
    std::vector<std::vector<int>> neighbors;

    Index n() const { return static_cast<Index>(neighbors.size()); }
    int k_of(Index i) const { return static_cast<int>(neighbors[i].size()); }

    /// True when every point has the same number of neighbors.
    bool uniform_k() const {
        for (const auto& nb : neighbors)
            if (nb.size() != neighbors.front().size()) return false;
        return true;
    }

    /// Number of undirected edges after symmetrization ({i,j} exists if
    /// j in kNN(i) or i in kNN(j)).
    Index edge_count() const;

    /// Adjacency lists of the symmetrized graph, each sorted ascending.
    std::vector<std::vector<int>> symmetrized() const;
};

/// Per-point barycentric reconstruction weights, row i aligned with the
/// neighbor list of point i. Every row sums to one.
struct ReconstructionWeights {
    std::vector<Vector> rows;

    Index n() const { return static_cast<Index>(rows.size()); }

    /// Dense n x k view; requires a uniform k across rows.
    Matrix dense() const;
};

/// How the coordinates of an Embedding are normalized.
enum class EmbeddingScale {
    UnitCovariance,      ///< (1/n) Y^T Y = I
    DegreeWeighted,      ///< (1/n) Y^T D Y = I (iterative LLE)
    KernelFactor,        ///< Y^T Y reproduces a kernel block (Nystrom factor)
    Projection,          ///< linear image of the data, no normalization
};

/// Spectral embedding: points stacked row-wise (n x p), plus the retained
/// eigenvalues of the matrix that was decomposed.
struct Embedding {
    Matrix y;                 ///< n x p
    Vector eigenvalues;       ///< p retained eigenvalues, ascending
    EmbeddingScale scale = EmbeddingScale::UnitCovariance;
    bool disconnected_warning = false;  ///< more than one near-zero eigenvalue

    Index n() const { return y.rows(); }
    Index p() const { return y.cols(); }
};

enum class KernelKind { Linear, Gaussian, DeltaLabel, LleView };

struct KernelDescriptor {
    KernelKind kind = KernelKind::Linear;
    double sigma = 1.0;  ///< Gaussian bandwidth, must be > 0

    static KernelDescriptor linear() { return {KernelKind::Linear, 1.0}; }
    static KernelDescriptor gaussian(double sigma) {
        return {KernelKind::Gaussian, sigma};
    }
    static KernelDescriptor delta() { return {KernelKind::DeltaLabel, 1.0}; }
};

/// n x n symmetric PSD similarity matrix plus the descriptor it came from.
struct KernelMatrix {
    Matrix k;
    KernelDescriptor descriptor;

    Index n() const { return k.rows(); }
};

/// Data with (possibly partial) integer class labels remapped to [0, c).
struct LabeledDataset {
    Matrix data;                            ///< d x n
    std::vector<std::optional<int>> labels; ///< class id per point, in [0, c)
    int classes = 0;

    Index n() const { return data.cols(); }
    bool fully_labeled() const {
        for (const auto& l : labels)
            if (!l) return false;
        return true;
    }
};

}  // namespace lle
