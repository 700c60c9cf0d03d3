#include "lle/scalable.hpp"

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"
#include "lle/oos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace lle::scalable {

namespace {

/// Center the columns, then whiten so that (1/n) Y^T Y = I.
Matrix center_and_whiten(Matrix y) {
    const double n = static_cast<double>(y.rows());
    y.rowwise() -= y.colwise().mean();
    Matrix c = y.transpose() * y / n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.transpose()));
    Vector inv_sqrt = es.eigenvalues();
    for (Index i = 0; i < inv_sqrt.size(); ++i)
        inv_sqrt(i) = inv_sqrt(i) > 1e-300 ? 1.0 / std::sqrt(inv_sqrt(i)) : 0.0;
    return y * es.eigenvectors() * inv_sqrt.asDiagonal() *
           es.eigenvectors().transpose();
}

double refinement_objective(const Matrix& y, const Matrix& m,
                            const Matrix& target) {
    return (y.transpose() * m * y - target).squaredNorm();
}

}  // namespace

IncrementalState incremental_init(const Matrix& x, int k, Index p,
                                  double eps_scale, OptimizerSettings opt) {
    core::Pipeline pl = core::lle_pipeline(x, k, p, eps_scale);
    IncrementalState st;
    st.x = x;
    st.y = pl.embedding.y;
    st.eigenvalues = pl.embedding.eigenvalues;
    st.m = std::move(pl.m);
    st.graph = std::move(pl.graph);
    st.weights = std::move(pl.weights);
    st.k = k;
    st.p = p;
    st.eps_scale = eps_scale;
    st.optimizer = opt;
    return st;
}

double incremental_objective(const IncrementalState& state) {
    const Matrix target = static_cast<double>(state.n()) *
                          Matrix(state.eigenvalues.asDiagonal());
    return refinement_objective(state.y, state.m, target);
}

IncrementalState incremental_update(const IncrementalState& state,
                                    const Matrix& batch) {
    if (batch.cols() == 0) return state;
    numlin::require_finite(batch, "incremental_update");
    require(batch.rows() == state.x.rows(),
            "incremental_update: batch dimension mismatch");

    const Index n_old = state.n();
    const Index n_new = n_old + batch.cols();
    Matrix x(state.x.rows(), n_new);
    x.leftCols(n_old) = state.x;
    x.rightCols(batch.cols()) = batch;

    // Exact neighbor maintenance: new points get fresh kNN lists; an old
    // point is redone only when some new point lands inside its current
    // neighborhood radius.
    const Matrix d = neighbors::pairwise_euclidean(x);
    NeighborGraph graph;
    graph.neighbors.resize(n_new);
    ReconstructionWeights weights;
    weights.rows.resize(n_new);

    auto recompute_row = [&](Index i) {
        std::vector<int> order;
        order.reserve(n_new - 1);
        for (Index j = 0; j < n_new; ++j)
            if (j != i) order.push_back(static_cast<int>(j));
        std::partial_sort(order.begin(), order.begin() + state.k, order.end(),
                          [&](int a, int b) {
                              if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
                              return a < b;
                          });
        graph.neighbors[i].assign(order.begin(), order.begin() + state.k);
        Matrix nb(x.rows(), state.k);
        for (int j = 0; j < state.k; ++j) nb.col(j) = x.col(graph.neighbors[i][j]);
        const Matrix gram = core::local_gram(x.col(i), nb, state.eps_scale);
        weights.rows[i] =
            core::gram_weights(gram, "weights for point " + std::to_string(i));
    };

    for (Index i = 0; i < n_old; ++i) {
        const auto& nbr = state.graph.neighbors[i];
        const double radius = d(i, nbr.back());
        bool touched = false;
        for (Index t = n_old; t < n_new && !touched; ++t)
            touched = d(i, t) < radius;
        if (touched) {
            recompute_row(i);
        } else {
            graph.neighbors[i] = nbr;
            weights.rows[i] = state.weights.rows[i];
        }
    }
    for (Index i = n_old; i < n_new; ++i) recompute_row(i);

    const SparseMatrix w = core::scatter_weights(weights, graph);
    Matrix m = core::embedding_matrix(w);

    // Seed: old rows keep their embedding, new rows are linear
    // reconstructions over the old model.
    oos::TrainedModel seed_model;
    seed_model.x = state.x;
    seed_model.y = state.y;
    seed_model.k = std::min<int>(state.k, static_cast<int>(n_old));
    seed_model.eps_scale = state.eps_scale;
    Matrix y(n_new, state.p);
    y.topRows(n_old) = state.y;
    y.bottomRows(batch.cols()) = oos::oos_reconstruct(seed_model, batch).y;
    y = center_and_whiten(std::move(y));

    const double step0 = state.optimizer.step_scale *
                         static_cast<double>(n_new) / std::max(m.norm(), 1e-300);

    // Refine by minimizing the embedding objective tr(Y^T M Y) under the
    // projection constraints, with an exact line search along the gradient
    // and a Ritz candidate on the augmented block, which walks through the
    // eigen-subspace saddles where the plain gradient stalls. Every
    // accepted step lowers the trace, and the final within-span rotation
    // re-diagonalizes the quotient, so the refreshed spectrum objective
    // never exceeds its value at the initialization.
    double prev_tr = (y.transpose() * m * y).trace();
    dataset::Rng probe_rng(0x9e3779b97f4a7c15ull);
    // One factorization of the constant-deflated M preconditions the Ritz
    // residual; without it the bottom-subspace refinement crawls at a
    // 1 - gap/lambda_max rate and misses the iteration budget.
    Matrix deflated = m;
    deflated.array() += std::max(m.trace(), 1e-300) /
                        (static_cast<double>(n_new) * static_cast<double>(n_new));
    const Eigen::LDLT<Matrix> precond(0.5 * (deflated + deflated.transpose()));
    for (int it = 0; it < state.optimizer.max_iterations; ++it) {
        const Matrix my = m * y;
        const Matrix grad = 2.0 * my;
        if (grad.norm() <= state.optimizer.gradient_tol) break;

        Matrix next;
        double tr_next = prev_tr;
        bool descended = false;
        auto consider = [&](const Matrix& trial) {
            const double tr = (trial.transpose() * m * trial).trace();
            if (tr < tr_next) {
                tr_next = tr;
                next = trial;
                descended = true;
            }
        };

        // exact line search: tr((Y - e G)^T M (Y - e G)) is quadratic in e
        const Matrix mg = m * grad;
        const double denom = (grad.array() * mg.array()).sum();
        if (denom > 0.0) {
            const double eta = (grad.array() * my.array()).sum() / denom;
            consider(center_and_whiten(y - eta * grad));
            consider(center_and_whiten(y - 0.5 * eta * grad));
        } else {
            consider(center_and_whiten(y - step0 * grad));
        }

        // Ritz candidate from the augmented block. Two seeded probe
        // columns let the extraction escape non-minimal invariant
        // subspaces, where the gradient block alone is rank deficient.
        {
            Matrix quotient = y.transpose() * my / static_cast<double>(n_new);
            const Matrix residual = my - y * quotient;
            Matrix block(y.rows(), 3 * state.p + 2);
            block.leftCols(state.p) = y;
            block.middleCols(state.p, state.p) = grad;
            block.middleCols(2 * state.p, state.p) = precond.solve(residual);
            for (Index c = 0; c < 2; ++c)
                for (Index r = 0; r < y.rows(); ++r)
                    block(r, 3 * state.p + c) = probe_rng.normal();
            Eigen::HouseholderQR<Matrix> qr(block);
            const Matrix q = qr.householderQ() *
                             Matrix::Identity(y.rows(), block.cols());
            Matrix small = q.transpose() * m * q;
            small = 0.5 * (small + small.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Matrix> ritz(small);
            consider(center_and_whiten(
                q * ritz.eigenvectors().leftCols(state.p) *
                std::sqrt(static_cast<double>(n_new))));
        }

        if (!descended) break;
        if (!next.allFinite())
            throw NumericalError("incremental_update: iterate overflowed");
        const bool converged =
            std::abs(prev_tr - tr_next) <= 1e-14 * std::max(1.0, prev_tr);
        y = std::move(next);
        prev_tr = tr_next;
        if (converged) break;
    }
    // Rotate within the span so Y^T M Y is diagonal ascending: columns
    // become Ritz vectors and the retained spectrum is re-estimated from
    // them, replacing the stale trained values.
    Matrix quotient = y.transpose() * m * y;
    quotient = 0.5 * (quotient + quotient.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> ritz_final(quotient);
    Matrix best = y * ritz_final.eigenvectors();
    Vector new_eigenvalues =
        ritz_final.eigenvalues() / static_cast<double>(n_new);

    IncrementalState out;
    out.x = std::move(x);
    out.y = std::move(best);
    out.eigenvalues = std::move(new_eigenvalues);
    out.m = std::move(m);
    out.graph = std::move(graph);
    out.weights = std::move(weights);
    out.k = state.k;
    out.p = state.p;
    out.eps_scale = state.eps_scale;
    out.optimizer = state.optimizer;
    return out;
}

LandmarkSet select_landmarks(Index n, Index m, LandmarkStrategy strategy,
                             std::uint64_t seed) {
    require(m >= 1 && m <= n, "select_landmarks: m must be in [1, n]");
    LandmarkSet out;
    out.indices.reserve(m);
    if (strategy == LandmarkStrategy::Stride) {
        const Index step = std::max<Index>(1, n / m);
        for (Index i = 0; i < m; ++i)
            out.indices.push_back(static_cast<int>(i * step));
    } else {
        dataset::Rng rng(seed);
        std::vector<int> pool(n);
        for (Index i = 0; i < n; ++i) pool[i] = static_cast<int>(i);
        for (Index i = 0; i < m; ++i) {
            const Index j =
                i + static_cast<Index>(rng.uniform() * static_cast<double>(n - i));
            std::swap(pool[i], pool[std::min(j, n - 1)]);
            out.indices.push_back(pool[i]);
        }
        std::sort(out.indices.begin(), out.indices.end());
    }
    return out;
}

Embedding nystrom_embed(const Matrix& a, const Matrix& b, Index p) {
    numlin::require_finite(a, "nystrom_embed");
    numlin::require_finite(b, "nystrom_embed");
    const Index m = a.rows();
    require(a.cols() == m, "nystrom_embed: landmark block not square");
    require(b.rows() == m, "nystrom_embed: cross block row mismatch");
    require(p >= 1 && p <= m, "nystrom_embed: p must be in [1, m]");

    const auto eig = numlin::sym_eigen(a);  // ascending
    const double sigma_max = eig.eigenvalues.maxCoeff();
    if (sigma_max <= 0.0 || eig.eigenvalues.minCoeff() < 1e-12 * sigma_max)
        throw NumericalError(
            "nystrom_embed: landmark block is rank deficient; use more "
            "landmarks");

    const Index n = m + b.cols();
    Embedding out;
    out.y.resize(n, p);
    out.eigenvalues.resize(p);
    for (Index r = 0; r < p; ++r) {
        const Index src = m - 1 - r;  // descending eigenvalue order
        const double sigma = eig.eigenvalues(src);
        const Vector u = eig.eigenvectors.col(src);
        out.eigenvalues(r) = sigma;
        out.y.col(r).head(m) = std::sqrt(sigma) * u;
        if (b.cols() > 0)
            out.y.col(r).tail(b.cols()) = (u.transpose() * b).transpose() / std::sqrt(sigma);
    }
    out.scale = EmbeddingScale::KernelFactor;
    return out;
}

Embedding nystrom_lle(const Matrix& x, int k, Index p,
                      const LandmarkSet& landmarks, double mu,
                      double eps_scale) {
    const Index n = x.cols();
    const Index m = landmarks.m();
    require(m >= p + 1, "nystrom_lle: need at least p+1 landmarks");
    core::Pipeline pl = core::lle_pipeline(x, k, 1, eps_scale);

    Eigen::SelfAdjointEigenSolver<Matrix> es(pl.m, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    if (mu <= 0.0) mu = lmax * (1.0 + 1e-6);

    // Kernel view of the eigenproblem: the pseudo-inverse-style kernel
    // (M + (mu/n) 1 1^T)^{-1}. Its spectrum decays like 1/lambda, so the
    // embedding directions dominate and a low-rank landmark sketch can
    // recover them; the shifted kernel mu I - M has a flat spectrum that
    // no subsample resolves. The constant direction sits at 1/mu, safely
    // below the retained eigenvalues. Only landmark columns are solved for.
    Matrix q = pl.m;
    q.array() += mu / static_cast<double>(n);
    Eigen::LDLT<Matrix> ldlt(0.5 * (q + q.transpose()));
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("nystrom_lle: kernel factorization failed");

    std::vector<char> is_landmark(n, 0);
    for (int idx : landmarks.indices) {
        require(idx >= 0 && idx < n, "nystrom_lle: landmark index out of range");
        require(!is_landmark[idx], "nystrom_lle: duplicate landmark index");
        is_landmark[idx] = 1;
    }
    std::vector<int> rest;
    rest.reserve(n - m);
    for (Index i = 0; i < n; ++i)
        if (!is_landmark[i]) rest.push_back(static_cast<int>(i));

    Matrix rhs = Matrix::Zero(n, m);
    for (Index j = 0; j < m; ++j) rhs(landmarks.indices[j], j) = 1.0;
    const Matrix cols = ldlt.solve(rhs);  // n x m block of the kernel

    Matrix a(m, m), b(m, n - m);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) a(i, j) = cols(landmarks.indices[i], j);
    for (Index j = 0; j < n - m; ++j)
        for (Index i = 0; i < m; ++i) b(i, j) = cols(rest[j], i);
    a = 0.5 * (a + a.transpose()).eval();
    // tiny spectral floor so the landmark block stays numerically invertible
    a.diagonal().array() += 1e-10 * a.cwiseAbs().rowwise().sum().maxCoeff();

    const Embedding factor = nystrom_embed(a, b, p);
    Matrix y(n, p);
    for (Index i = 0; i < m; ++i)
        y.row(landmarks.indices[i]) = factor.y.row(i);
    for (Index j = 0; j < n - m; ++j)
        y.row(rest[j]) = factor.y.row(m + j);

    Embedding out;
    out.y = center_and_whiten(std::move(y));
    out.eigenvalues = Vector(p);
    for (Index r = 0; r < p; ++r)
        out.eigenvalues(r) = 1.0 / std::max(factor.eigenvalues(p - 1 - r), 1e-300);
    out.scale = EmbeddingScale::UnitCovariance;
    return out;
}

LllResult lll_embed(const Matrix& x, int k, Index p,
                    const LandmarkSet& landmarks, double eps_scale) {
    const Index n = x.cols();
    const Index m = landmarks.m();
    require(m >= p + 2, "lll_embed: need at least p+2 landmarks");
    core::Pipeline pl = core::lle_pipeline(x, k, 1, eps_scale);

    Matrix xl(x.rows(), m);
    for (Index j = 0; j < m; ++j) xl.col(j) = x.col(landmarks.indices[j]);

    // Landmark weights with a distance-weighted ridge: desk-scale data has
    // rank(G) <= d, and a plain ridge picks the minimum-norm barycentric
    // solution, which spreads weight over far landmarks and wrecks the
    // projection. Penalizing by the squared landmark distance keeps the
    // representation local and makes a landmark point represent itself.
    Matrix u(n, m);
    for (Index i = 0; i < n; ++i) {
        const Matrix offsets = x.col(i).replicate(1, m) - xl;
        Matrix g = offsets.transpose() * offsets;
        g = 0.5 * (g + g.transpose()).eval();
        const Vector dg = g.diagonal();
        g.diagonal() += eps_scale * dg;
        // invertibility floor well below the distance penalty
        g.diagonal().array() +=
            eps_scale * 1e-6 * g.trace() / static_cast<double>(m) + 1e-300;
        // conditioning here is extreme by construction (the floor sits far
        // below the data scale), so solve without the singularity guard
        const Vector raw = g.ldlt().solve(Vector::Ones(m));
        const double denom = raw.sum();
        if (!raw.allFinite() || std::abs(denom) < 1e-300)
            throw NumericalError("lll_embed: degenerate landmark solve at point " +
                                 std::to_string(i));
        u.row(i) = (raw / denom).transpose();
    }

    // Reduced problem with the projection metric kept: the original
    // constraint (1/n) Y^T U^T U Y = I makes this the generalized pencil
    // (U^T M U, U^T U); with m = n it is exactly the full eigenproblem.
    Matrix m_tilde = u.transpose() * pl.m * u;
    m_tilde = 0.5 * (m_tilde + m_tilde.transpose()).eval();
    Matrix metric = u.transpose() * u;
    metric = 0.5 * (metric + metric.transpose()).eval();
    metric.diagonal().array() += 1e-12 * metric.trace() / static_cast<double>(m);

    Eigen::LLT<Matrix> llt(metric);
    if (llt.info() != Eigen::Success)
        throw NumericalError("lll_embed: projection metric not positive definite");
    const Matrix l = llt.matrixL();
    const Matrix inv_l =
        l.triangularView<Eigen::Lower>().solve(Matrix::Identity(m, m));
    Matrix reduced = inv_l * m_tilde * inv_l.transpose();
    reduced = 0.5 * (reduced + reduced.transpose()).eval();
    // deflate the constant pencil direction (U 1_m = 1_n)
    Vector constant = l.transpose() * Vector::Ones(m);
    constant.normalize();
    reduced += (reduced.norm() + 1.0) * constant * constant.transpose();
    const auto eig = numlin::sym_eigen(reduced);

    Matrix y_tilde(m, p);
    for (Index c = 0; c < p; ++c)
        y_tilde.col(c) = inv_l.transpose() * eig.eigenvectors.col(c);

    LllResult out;
    out.landmark_y = y_tilde;
    out.projection = std::move(u);
    out.all.y = center_and_whiten(out.projection * y_tilde);
    out.all.eigenvalues = eig.eigenvalues.head(p);
    out.all.scale = EmbeddingScale::UnitCovariance;
    out.all.disconnected_warning = eig.eigenvalues(0) < 1e-8;
    return out;
}

}  // namespace lle::scalable
