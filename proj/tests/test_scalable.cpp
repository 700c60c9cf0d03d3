#include "lle/scalable.hpp"

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/numlin.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace lle;
using namespace lle::scalable;

TEST_CASE("select_landmarks: all, stride, seeded random") {
    const LandmarkSet all = select_landmarks(6, 6, LandmarkStrategy::Stride);
    CHECK(all.indices == std::vector<int>{0, 1, 2, 3, 4, 5});

    const LandmarkSet strided = select_landmarks(10, 5, LandmarkStrategy::Stride);
    CHECK(strided.indices == std::vector<int>{0, 2, 4, 6, 8});

    const LandmarkSet r1 = select_landmarks(50, 10, LandmarkStrategy::UniformRandom, 7);
    const LandmarkSet r2 = select_landmarks(50, 10, LandmarkStrategy::UniformRandom, 7);
    CHECK(r1.indices == r2.indices);
    std::set<int> dedup(r1.indices.begin(), r1.indices.end());
    CHECK(dedup.size() == 10);

    CHECK_THROWS_AS(select_landmarks(5, 6, LandmarkStrategy::Stride),
                    ContractViolation);
}

TEST_CASE("nystrom_embed: exact factor when m = n") {
    dataset::Rng rng(3);
    const Matrix a = oracle::random_spd(8, rng);
    const Embedding emb = nystrom_embed(a, Matrix(8, 0), 8);
    // rows of emb.y are points, so the factor identity reads Y Y^T = A
    CHECK((emb.y * emb.y.transpose() - a).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(emb.scale == EmbeddingScale::KernelFactor);
}

TEST_CASE("nystrom_embed: exact completion for low-rank kernels") {
    dataset::Rng rng(5);
    // rank-3 PSD 50x50, m=10 landmarks
    const Matrix f = oracle::random_matrix(3, 50, rng);
    const Matrix kernel = f.transpose() * f;
    const Index m = 10;
    const Matrix a = kernel.topLeftCorner(m, m);
    const Matrix b = kernel.topRightCorner(m, 50 - m);
    const Matrix c = kernel.bottomRightCorner(50 - m, 50 - m);

    // rank(K) <= m with invertible A: the completion is exact
    Matrix a_reg = a;
    a_reg.diagonal().array() += 1e-12;
    CHECK((b.transpose() * a_reg.fullPivLu().solve(b) - c).norm() <=
          1e-8 * c.norm());
}

TEST_CASE("nystrom_embed reconstruction of a full-rank landmark block") {
    dataset::Rng rng(6);
    const Matrix f = oracle::random_matrix(3, 50, rng);
    Matrix kernel = f.transpose() * f;
    // a tiny ridge keeps the 10x10 landmark block numerically invertible
    kernel.diagonal().array() += 1e-8;
    const Matrix a = kernel.topLeftCorner(10, 10);
    const Matrix b = kernel.topRightCorner(10, 40);
    const Embedding emb = nystrom_embed(a, b, 10);
    const Matrix rebuilt = emb.y * emb.y.transpose();
    CHECK((rebuilt - kernel).norm() <= 1e-6 * kernel.norm());
}

TEST_CASE("nystrom_embed flags rank deficiency") {
    dataset::Rng rng(8);
    const Matrix f = oracle::random_matrix(2, 6, rng);
    const Matrix a = f.transpose() * f;  // rank 2 < 6
    CHECK_THROWS_WITH_AS(nystrom_embed(a, Matrix(6, 0), 3),
                         doctest::Contains("landmarks"), NumericalError);
}

TEST_CASE("nystrom error shrinks as landmarks double") {
    dataset::Rng rng(11);
    const Matrix f = oracle::random_matrix(8, 60, rng);  // rank-8 kernel
    const Matrix kernel = f.transpose() * f;
    double mean_err[3] = {0, 0, 0};
    const Index ms[3] = {5, 10, 20};
    for (int mi = 0; mi < 3; ++mi) {
        const Index m = ms[mi];
        for (int draw = 0; draw < 20; ++draw) {
            const LandmarkSet lm = select_landmarks(
                60, m, LandmarkStrategy::UniformRandom, 100 + draw);
            std::vector<int> rest;
            std::vector<char> mark(60, 0);
            for (int i : lm.indices) mark[i] = 1;
            for (int i = 0; i < 60; ++i)
                if (!mark[i]) rest.push_back(i);
            Matrix a(m, m), b(m, 60 - m), c(60 - m, 60 - m);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < m; ++j)
                    a(i, j) = kernel(lm.indices[i], lm.indices[j]);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < 60 - m; ++j)
                    b(i, j) = kernel(lm.indices[i], rest[j]);
            for (Index i = 0; i < 60 - m; ++i)
                for (Index j = 0; j < 60 - m; ++j)
                    c(i, j) = kernel(rest[i], rest[j]);
            a.diagonal().array() += 1e-10;  // keep A invertible for m > 8
            mean_err[mi] +=
                (c - b.transpose() * a.fullPivLu().solve(b)).norm() / 20.0;
        }
    }
    CHECK(mean_err[1] <= mean_err[0] + 1e-9);
    CHECK(mean_err[2] <= mean_err[1] + 1e-9);
}

TEST_CASE("nystrom_lle with all landmarks spans the exact subspace") {
    const auto [x, params] = dataset::generate_swiss_roll(80, 0.0, 13);
    const LandmarkSet all = select_landmarks(80, 80, LandmarkStrategy::Stride);
    const Embedding approx = nystrom_lle(x, 6, 2, all);
    const Embedding exact = core::lle(x, 6, 2);
    CHECK(oracle::max_principal_angle(approx.y, exact.y) < 1e-4);
    const Matrix cov = approx.y.transpose() * approx.y / 80.0;
    CHECK((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(approx.y.colwise().sum().cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("nystrom_lle approximates the exact embedding on a swiss roll") {
    const auto [x, params] = dataset::generate_swiss_roll(1000, 0.0, 17);
    const LandmarkSet lm = select_landmarks(1000, 100, LandmarkStrategy::Stride);
    const Embedding approx = nystrom_lle(x, 10, 2, lm);
    const Embedding exact = core::lle(x, 10, 2);
    CHECK(oracle::aligned_procrustes_distance(exact.y, approx.y) < 0.2);
}

TEST_CASE("nystrom_lle rejects too few landmarks") {
    const auto [x, params] = dataset::generate_swiss_roll(40, 0.0, 2);
    const LandmarkSet lm = select_landmarks(40, 2, LandmarkStrategy::Stride);
    CHECK_THROWS_AS(nystrom_lle(x, 5, 2, lm), ContractViolation);
}

TEST_CASE("lll_embed: landmark self-representation and exact-subspace limit") {
    // noise keeps the spectral gaps of M resolvable, so the m = n pencil
    // reduces to the full eigenproblem within tight angles
    const auto [x, params] = dataset::generate_swiss_roll(60, 1.0, 23);
    const LandmarkSet all = select_landmarks(60, 60, LandmarkStrategy::Stride);

    // tiny regularization: a point that is a landmark reproduces itself
    const LllResult tight = lll_embed(x, 6, 2, all, 1e-10);
    for (Index i = 0; i < 10; ++i) {
        Vector rec = Vector::Zero(3);
        for (Index j = 0; j < 60; ++j) rec += tight.projection(i, j) * x.col(j);
        CHECK((rec - x.col(i)).norm() <= 1e-8);
    }

    // default regularization: the m = n pencil is the full eigenproblem
    // conjugated by the invertible projection, so the subspaces agree
    const LllResult res = lll_embed(x, 6, 2, all);
    const Embedding exact = core::lle(x, 6, 2);
    CHECK(oracle::max_principal_angle(res.all.y, exact.y) < 1e-4);
}

TEST_CASE("lll_embed approximates the exact embedding with 60 landmarks") {
    // noise keeps the bottom spectrum resolvable at this scale
    const auto [x, params] = dataset::generate_swiss_roll(1000, 1.0, 3);
    const LandmarkSet lm = select_landmarks(1000, 60, LandmarkStrategy::Stride);
    const LllResult res = lll_embed(x, 10, 2, lm);
    const Embedding exact = core::lle(x, 10, 2);
    CHECK(oracle::aligned_procrustes_distance(exact.y, res.all.y) < 0.3);
    const Matrix cov = res.all.y.transpose() * res.all.y / 1000.0;
    CHECK((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(res.all.y.colwise().sum().cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("lll_embed wants p+2 landmarks") {
    const auto [x, params] = dataset::generate_swiss_roll(30, 0.0, 3);
    const LandmarkSet lm = select_landmarks(30, 3, LandmarkStrategy::Stride);
    CHECK_THROWS_AS(lll_embed(x, 4, 2, lm), ContractViolation);
}

TEST_CASE("incremental_update: empty batch is a no-op") {
    const auto [x, params] = dataset::generate_swiss_roll(50, 0.0, 37);
    const IncrementalState st = incremental_init(x, 5, 2, 1e-3);
    const IncrementalState same = incremental_update(st, Matrix(3, 0));
    CHECK(same.y == st.y);
    CHECK(same.n() == st.n());
}

TEST_CASE("incremental_update keeps the embedding contract") {
    const auto [x, params] = dataset::generate_swiss_roll(120, 0.0, 41);
    IncrementalState st = incremental_init(x.leftCols(100), 6, 2, 1e-3);
    const Matrix batch = x.middleCols(40, 10);  // coincident re-insertions
    const IncrementalState updated = incremental_update(st, batch);
    CHECK(updated.n() == 110);
    const Matrix cov = updated.y.transpose() * updated.y / 110.0;
    CHECK((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(updated.y.colwise().sum().cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("incremental objective lands near the full recomputation") {
    const auto [x, params] = dataset::generate_swiss_roll(220, 0.0, 43);
    IncrementalState st = incremental_init(x.leftCols(200), 8, 2, 1e-3);
    const IncrementalState updated = incremental_update(st, x.rightCols(20));

    core::Pipeline pl = core::lle_pipeline(x, 8, 2);
    const double obj_inc =
        (updated.y.transpose() * updated.m * updated.y).trace();
    const double obj_full =
        (pl.embedding.y.transpose() * pl.m * pl.embedding.y).trace();
    CHECK(obj_inc <= 1.10 * obj_full + 1e-12);
    CHECK(obj_inc >= obj_full - 1e-9);  // full solve is the optimum
}
