#include "lle/kernels.hpp"

#include "lle/core.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lle::kernels {

KernelMatrix kernel_matrix(const Matrix& x, const KernelDescriptor& desc) {
    numlin::require_finite(x, "kernel_matrix");
    const Index n = x.cols();
    KernelMatrix out;
    out.descriptor = desc;
    switch (desc.kind) {
        case KernelKind::Linear:
            out.k = x.transpose() * x;
            out.k = 0.5 * (out.k + out.k.transpose()).eval();
            break;
        case KernelKind::Gaussian: {
            require(desc.sigma > 0.0, "gaussian kernel needs sigma > 0");
            const double denom = 2.0 * desc.sigma * desc.sigma;
            out.k = Matrix::Ones(n, n);
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j) {
                    const double v =
                        std::exp(-(x.col(i) - x.col(j)).squaredNorm() / denom);
                    out.k(i, j) = v;
                    out.k(j, i) = v;
                }
            break;
        }
        case KernelKind::DeltaLabel:
            throw ContractViolation(
                "kernel_matrix: delta kernel requires labels; use delta_kernel()");
        case KernelKind::LleView:
            throw ContractViolation(
                "kernel_matrix: LLE-view kernels come from lle_kernel_view()");
    }
    return out;
}

KernelMatrix delta_kernel(const std::vector<int>& labels) {
    require(!labels.empty(), "delta_kernel: empty labels");
    const Index n = static_cast<Index>(labels.size());
    KernelMatrix out;
    out.descriptor = KernelDescriptor::delta();
    out.k = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            out.k(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
    return out;
}

double median_heuristic_sigma(const Matrix& x) {
    const Index n = x.cols();
    require(n >= 2, "median_heuristic_sigma: need at least two points");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            d.push_back((x.col(i) - x.col(j)).norm());
    auto mid = d.begin() + d.size() / 2;
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

Matrix local_kernel_gram(Index i, const NeighborGraph& g,
                         const KernelMatrix& kernel, double eps_scale) {
    const Matrix& k = kernel.k;
    require(g.n() == k.rows(), "local_kernel_gram: graph/kernel size mismatch");
    const auto& nbr = g.neighbors[i];
    const Index kk = static_cast<Index>(nbr.size());
    Matrix gram(kk, kk);
    for (Index a = 0; a < kk; ++a)
        for (Index b = a; b < kk; ++b) {
            const double v =
                k(i, i) - k(i, nbr[a]) - k(i, nbr[b]) + k(nbr[a], nbr[b]);
            gram(a, b) = v;
            gram(b, a) = v;
        }
    return core::regularize_gram(std::move(gram), eps_scale, false);
}

Embedding kernel_lle(const Matrix& x, const KernelDescriptor& desc, int k,
                     Index p, double eps_scale) {
    const KernelMatrix km = kernel_matrix(x, desc);
    const Matrix d = neighbors::pairwise_feature_space(km);
    const NeighborGraph g = neighbors::knn_graph(d, k);

    ReconstructionWeights w;
    w.rows.resize(g.n());
    for (Index i = 0; i < g.n(); ++i) {
        const Matrix gram = local_kernel_gram(i, g, km, eps_scale);
        w.rows[i] = core::gram_weights(
            gram, "kernel weights for point " + std::to_string(i));
    }
    const SparseMatrix ws = core::scatter_weights(w, g);
    return core::embed(core::embedding_matrix(ws), p);
}

KernelMatrix lle_kernel_view(const Matrix& m, LleKernelMode mode, double mu) {
    numlin::require_finite(m, "lle_kernel_view");
    require(m.rows() == m.cols(), "lle_kernel_view: M not square");
    KernelMatrix out;
    out.descriptor.kind = KernelKind::LleView;
    if (mode == LleKernelMode::MuShift) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        if (mu < lmax)
            throw NumericalError("lle_kernel_view: mu " + std::to_string(mu) +
                                 " below lambda_max(M) " + std::to_string(lmax) +
                                 ", result would not be PSD");
        out.k = -m;
        out.k.diagonal().array() += mu;
    } else {
        out.k = numlin::pseudo_inverse(m);
        out.k = 0.5 * (out.k + out.k.transpose()).eval();
    }
    return out;
}

double hsic(const KernelMatrix& kx, const KernelMatrix& ky) {
    const Index n = kx.n();
    require(ky.n() == n, "hsic: kernel size mismatch");
    require(n >= 2, "hsic: need at least two points");
    // tr(Kx H Ky H) = <H Kx H, Ky>
    Matrix cx = kx.k;
    cx.rowwise() -= kx.k.colwise().mean();
    cx.colwise() -= cx.rowwise().mean().eval();
    const double t = (cx.array() * ky.k.array()).sum();
    const double nm1 = static_cast<double>(n - 1);
    return t / (nm1 * nm1);
}

}  // namespace lle::kernels
