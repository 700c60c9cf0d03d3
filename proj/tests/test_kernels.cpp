#include "lle/kernels.hpp"

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/neighbors.hpp"
#include "lle/numlin.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lle;
using namespace lle::kernels;

TEST_CASE("kernel_matrix: linear, gaussian, delta") {
    const Matrix ortho = Matrix::Identity(3, 3);
    const KernelMatrix lin = kernel_matrix(ortho, KernelDescriptor::linear());
    CHECK((lin.k - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);

    dataset::Rng rng(1);
    const Matrix x = oracle::random_matrix(2, 3, rng);
    const double sigma = 1.3;
    const KernelMatrix g = kernel_matrix(x, KernelDescriptor::gaussian(sigma));
    CHECK(g.k.diagonal().isApproxToConstant(1.0));
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            CHECK(g.k(i, j) ==
                  doctest::Approx(std::exp(-(x.col(i) - x.col(j)).squaredNorm() /
                                           (2.0 * sigma * sigma))));
    CHECK(g.k.minCoeff() > 0.0);
    CHECK(g.k.maxCoeff() <= 1.0);

    CHECK_THROWS_AS(kernel_matrix(x, KernelDescriptor::delta()),
                    ContractViolation);
    const KernelMatrix d = delta_kernel({0, 1, 0});
    CHECK(d.k(0, 2) == 1.0);
    CHECK(d.k(0, 1) == 0.0);
    CHECK(d.k(1, 1) == 1.0);
}

TEST_CASE("local_kernel_gram: linear kernel reduces to raw local gram") {
    dataset::Rng rng(7);
    const Matrix x = oracle::random_matrix(3, 8, rng);
    const KernelMatrix lin = kernel_matrix(x, KernelDescriptor::linear());
    const NeighborGraph g = neighbors::knn_graph(
        neighbors::pairwise_feature_space(lin), 3);
    for (Index i = 0; i < 8; ++i) {
        Matrix nb(3, 3);
        for (int j = 0; j < 3; ++j) nb.col(j) = x.col(g.neighbors[i][j]);
        const Matrix raw = core::local_gram(x.col(i), nb, 0.0);
        const Matrix viak = local_kernel_gram(i, g, lin, 0.0);
        CHECK((raw - viak).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("local_kernel_gram: coincident neighbor zeroes its row/col") {
    Matrix x(2, 4);
    x << 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 1.0, -1.0;  // point 1 equals point 0
    const KernelMatrix g = kernel_matrix(x, KernelDescriptor::gaussian(1.0));
    NeighborGraph graph;
    graph.neighbors = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    const Matrix ki = local_kernel_gram(0, graph, g, 0.0);
    CHECK(ki.row(0).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(ki.col(0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("local_kernel_gram matches the four-term loop") {
    dataset::Rng rng(9);
    const Matrix x = oracle::random_matrix(2, 7, rng);
    const KernelMatrix km = kernel_matrix(x, KernelDescriptor::gaussian(0.9));
    const NeighborGraph g =
        neighbors::knn_graph(neighbors::pairwise_feature_space(km), 3);
    const Index i = 2;
    const auto& nbr = g.neighbors[i];
    const Matrix got = local_kernel_gram(i, g, km, 0.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double expect = km.k(i, i) - km.k(i, nbr[a]) -
                                  km.k(i, nbr[b]) + km.k(nbr[a], nbr[b]);
            CHECK(got(a, b) == doctest::Approx(expect).epsilon(1e-10));
        }
}

TEST_CASE("kernel_lle with linear kernel reproduces plain lle") {
    dataset::Rng rng(4);
    const Matrix x = oracle::random_matrix(3, 15, rng);
    const Embedding plain = core::lle(x, 4, 2, 1e-3);
    const Embedding viak =
        kernel_lle(x, KernelDescriptor::linear(), 4, 2, 1e-3);
    for (Index c = 0; c < 2; ++c) {
        const double same = (plain.y.col(c) - viak.y.col(c)).norm();
        const double flip = (plain.y.col(c) + viak.y.col(c)).norm();
        CHECK(std::min(same, flip) <= 1e-8 * plain.y.col(c).norm());
    }
}

TEST_CASE("huge-sigma gaussian orders neighbors like the linear kernel") {
    dataset::Rng rng(10);
    const Matrix x = oracle::random_matrix(3, 12, rng);
    double diameter = 0.0;
    for (Index i = 0; i < 12; ++i)
        for (Index j = 0; j < 12; ++j)
            diameter = std::max(diameter, (x.col(i) - x.col(j)).norm());

    const KernelMatrix wide =
        kernel_matrix(x, KernelDescriptor::gaussian(1e6 * diameter));
    const KernelMatrix lin = kernel_matrix(x, KernelDescriptor::linear());
    const NeighborGraph gw =
        neighbors::knn_graph(neighbors::pairwise_feature_space(wide), 4);
    const NeighborGraph gl =
        neighbors::knn_graph(neighbors::pairwise_feature_space(lin), 4);
    for (Index i = 0; i < 12; ++i) CHECK(gw.neighbors[i] == gl.neighbors[i]);
}

TEST_CASE("kernel_lle on a swiss roll satisfies the embedding contract") {
    const auto [x, params] = dataset::generate_swiss_roll(200, 0.0, 3);
    const double sigma = median_heuristic_sigma(x);
    const Embedding emb =
        kernel_lle(x, KernelDescriptor::gaussian(sigma), 8, 2, 1e-3);
    const Matrix cov = emb.y.transpose() * emb.y / 200.0;
    CHECK((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(emb.y.colwise().sum().cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("lle_kernel_view: mu shift and pseudo-inverse") {
    // a ring gives M a clean spectral gap above the constant direction
    Matrix x(2, 14);
    for (Index i = 0; i < 14; ++i) {
        const double a = 2.0 * 3.14159265358979 * static_cast<double>(i) / 14.0;
        x(0, i) = std::cos(a);
        x(1, i) = std::sin(a);
    }
    const auto pl = core::lle_pipeline(x, 2, 2);
    const auto eig = numlin::sym_eigen(pl.m);
    const double lmax = eig.eigenvalues.maxCoeff();

    const KernelMatrix shifted =
        lle_kernel_view(pl.m, LleKernelMode::MuShift, lmax);
    const auto keig = numlin::sym_eigen(shifted.k);
    CHECK(std::abs(keig.eigenvalues.minCoeff()) <= 1e-8 * lmax);

    CHECK_THROWS_AS(lle_kernel_view(pl.m, LleKernelMode::MuShift, 0.5 * lmax),
                    NumericalError);

    // Top-p eigenvectors of mu I - M span the bottom nontrivial eigenvectors
    // of M (the constant direction removed).
    const double mu = lmax * (1.0 + 1e-6);
    const KernelMatrix kv = lle_kernel_view(pl.m, LleKernelMode::MuShift, mu);
    const auto ke = numlin::sym_eigen(kv.k);
    Matrix top(14, 2);
    top.col(0) = ke.eigenvectors.col(12);  // col 13 is the constant direction
    top.col(1) = ke.eigenvectors.col(11);
    Matrix bottom(14, 2);
    bottom.col(0) = eig.eigenvectors.col(1);
    bottom.col(1) = eig.eigenvectors.col(2);
    CHECK(oracle::max_principal_angle(top, bottom) <= 1e-8);

    // pseudo-inverse mode: M^dagger M is the projector orthogonal to 1
    const KernelMatrix pinv =
        lle_kernel_view(pl.m, LleKernelMode::PseudoInverse);
    const Matrix proj = pinv.k * pl.m;
    const Matrix expected =
        Matrix::Identity(14, 14) - Matrix::Constant(14, 14, 1.0 / 14.0);
    CHECK((proj - expected).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("hsic: self-dependence, constants, independence") {
    dataset::Rng rng(5);
    const Matrix x = oracle::random_matrix(2, 30, rng);
    const KernelMatrix kx = kernel_matrix(x, KernelDescriptor::linear());
    CHECK(hsic(kx, kx) > 0.0);

    // constant data, centered linear kernel is exactly zero
    Matrix constant = Matrix::Zero(2, 10);
    const KernelMatrix kc =
        kernel_matrix(constant, KernelDescriptor::linear());
    const KernelMatrix ky = kernel_matrix(
        Matrix(oracle::random_matrix(2, 10, rng)), KernelDescriptor::linear());
    CHECK(std::abs(hsic(kc, ky)) <= 1e-12);

    // independent random label kernels stay near zero relative to self-HSIC
    const Index n = 200;
    std::vector<int> la(n), lb(n);
    for (Index i = 0; i < n; ++i) {
        la[i] = rng.uniform() < 0.5 ? 0 : 1;
        lb[i] = rng.uniform() < 0.5 ? 0 : 1;
    }
    const KernelMatrix ka = delta_kernel(la);
    const KernelMatrix kb = delta_kernel(lb);
    CHECK(std::abs(hsic(ka, kb)) < 0.05 * hsic(ka, ka));

    CHECK_THROWS_AS(hsic(ka, kx), ContractViolation);
}

TEST_CASE("hsic is nonnegative for PSD inputs") {
    dataset::Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        KernelMatrix ka, kb;
        ka.k = oracle::random_spd(8, rng);
        kb.k = oracle::random_spd(8, rng);
        CHECK(hsic(ka, kb) >= -1e-10);
    }
}

TEST_CASE("kernel-trick consistency across the whole pipeline") {
    dataset::Rng rng(8);
    const Matrix x = oracle::random_matrix(4, 12, rng);
    const KernelMatrix lin = kernel_matrix(x, KernelDescriptor::linear());

    const Matrix de = neighbors::pairwise_euclidean(x);
    const Matrix df = neighbors::pairwise_feature_space(lin);
    const NeighborGraph ge = neighbors::knn_graph(de, 3);
    const NeighborGraph gf = neighbors::knn_graph(df, 3);
    for (Index i = 0; i < 12; ++i) REQUIRE(ge.neighbors[i] == gf.neighbors[i]);

    const auto w_raw = core::reconstruction_weights(x, ge, 1e-3);
    for (Index i = 0; i < 12; ++i) {
        const Matrix kg = local_kernel_gram(i, gf, lin, 1e-3);
        const Vector w_k = core::gram_weights(kg, "kernel");
        CHECK((w_raw.rows[i] - w_k).cwiseAbs().maxCoeff() <= 1e-8);
    }
}
