#include "lle/oos.hpp"

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/kernels.hpp"
#include "lle/neighbors.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace lle;
using namespace lle::oos;

namespace {

TrainedModel toy_model(Index n = 30, int k = 5, Index p = 2,
                       std::uint64_t seed = 19) {
    const auto [x, params] = dataset::generate_swiss_roll(n, 0.0, seed);
    return train(x, k, p, 1e-3);
}

}  // namespace

TEST_CASE("oos_reconstruct: training point reproduces its own reconstruction") {
    // tiny regularization so the coincident self neighbor dominates exactly
    const auto [x, params] = dataset::generate_swiss_roll(40, 0.0, 19);
    const TrainedModel model = train(x, 5, 2, 1e-9);
    // Feeding training point i back in reproduces sum_j w_ij y_j: the
    // training embedding up to the training objective's own residual.
    const Matrix w = model.w.toDense();
    Matrix xt(3, 3);
    for (int t = 0; t < 3; ++t) xt.col(t) = model.x.col(t * 7);
    const OosResult res = oos_reconstruct(model, xt);
    for (int t = 0; t < 3; ++t) {
        const Index i = t * 7;
        const Vector expected = (w.row(i) * model.y).transpose();
        // the output sits between y_i and its reconstruction, so the gap is
        // bounded by the training objective residual at i
        const double residual =
            (model.y.row(i).transpose() - expected).norm();
        CHECK((res.y.row(t).transpose() - expected).norm() <=
              residual * (1.0 + 1e-6) + 1e-6 * model.y.row(i).norm());
    }
}

TEST_CASE("oos_reconstruct: midpoint of two training points, k=2") {
    Matrix x(2, 6);
    x << 0.0, 1.0, 4.0, 9.0, 16.0, 25.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0;
    const TrainedModel model = train(x, 2, 1, 1e-3);
    const Matrix mid = 0.5 * (x.col(1) + x.col(2));
    const OosResult res = oos_reconstruct(model, mid);
    const Vector expected =
        0.5 * (model.y.row(1) + model.y.row(2)).transpose();
    CHECK((res.y.row(0).transpose() - expected).norm() <= 1e-8);
}

TEST_CASE("oos_reconstruct batch lands inside the neighbor hull scale") {
    const auto [x, params] = dataset::generate_swiss_roll(120, 0.0, 7);
    const TrainedModel model = train(x.leftCols(115), 6, 2, 1e-3);
    const Matrix batch = x.rightCols(5);
    const OosResult res = oos_reconstruct(model, batch);
    // each output stays within the diameter of its neighbors' embeddings,
    // scaled by the weight mass
    for (Index t = 0; t < 5; ++t) {
        CHECK(res.y.row(t).allFinite());
        double hull = 0.0;
        for (Index a = 0; a < model.n(); ++a)
            for (Index b = 0; b < model.n(); ++b)
                hull = std::max(hull, (model.y.row(a) - model.y.row(b)).norm());
        CHECK(res.y.row(t).norm() <= 10.0 * hull);
    }
    // permutation equivariance
    Matrix reversed(3, 5);
    for (Index t = 0; t < 5; ++t) reversed.col(t) = batch.col(4 - t);
    const OosResult res2 = oos_reconstruct(model, reversed);
    for (Index t = 0; t < 5; ++t)
        CHECK((res2.y.row(t) - res.y.row(4 - t)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("center_oos_kernel: consistency, constants, four-term loop") {
    dataset::Rng rng(3);
    const Matrix x = oracle::random_matrix(2, 8, rng);
    const KernelMatrix km =
        kernels::kernel_matrix(x, KernelDescriptor::gaussian(1.0));
    const Matrix k = km.k;
    const Index n = 8;

    // centering a copy of training columns matches the double-centered
    // training kernel
    const Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    const Matrix hkh = h * k * h;
    const Matrix centered = center_oos_kernel(k, k);
    CHECK((centered - hkh).cwiseAbs().maxCoeff() <= 1e-12);

    // constant kernel -> zero matrix
    const Matrix ones_kernel = Matrix::Ones(n, n);
    CHECK(center_oos_kernel(ones_kernel, Matrix::Ones(n, 3))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    // random cross kernel matches the explicit four-term formula
    const Matrix kt = oracle::random_matrix(n, 4, rng);
    const Matrix got = center_oos_kernel(k, kt);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < 4; ++j) {
            double v = kt(i, j);
            v -= kt.col(j).mean();
            v -= k.row(i).mean();
            v += k.mean();
            CHECK(got(i, j) == doctest::Approx(v).epsilon(1e-12));
        }
}

TEST_CASE("oos_eigenfunctions matches a straight-line reimplementation") {
    const TrainedModel model = toy_model(30, 5, 2);
    dataset::Rng rng(9);
    Matrix xt = model.x.leftCols(4);
    for (Index c = 0; c < 4; ++c)
        for (Index r = 0; r < 3; ++r) xt(r, c) += 0.05 * rng.normal();

    const double mu = model.lambda_max * 10.0 + 1.0;
    const OosResult got = oos_eigenfunctions(model, xt, mu);

    // independent recomputation straight from the formula
    const Matrix omega = oos_weights(model, xt);
    const Matrix w = model.w.toDense();
    for (Index t = 0; t < 4; ++t)
        for (Index r = 0; r < 2; ++r) {
            double sum = 0.0;
            for (Index j = 0; j < model.n(); ++j) {
                double k2 = 2.0 * omega(j, t);
                for (Index s = 0; s < model.n(); ++s)
                    k2 -= w(s, j) * omega(s, t);
                sum += model.y(j, r) * ((mu - 1.0) * omega(j, t) + k2);
            }
            sum /= std::sqrt(mu - model.eigenvalues(r));
            CHECK(got.y(t, r) == doctest::Approx(sum).epsilon(1e-10));
        }
}

TEST_CASE("oos_eigenfunctions: zero displacement is finite") {
    const TrainedModel model = toy_model(25, 4, 2);
    const Matrix xt = model.x.col(3);
    const OosResult res =
        oos_eigenfunctions(model, xt, model.lambda_max * (1.0 + 1e-6));
    CHECK(res.y.allFinite());
}

TEST_CASE("oos_eigenfunctions rejects too-small mu") {
    const TrainedModel model = toy_model(25, 4, 2);
    CHECK_THROWS_AS(oos_eigenfunctions(model, model.x.col(0), 0.0),
                    NumericalError);
}

TEST_CASE("large-mu eigenfunctions align with linear reconstruction") {
    const TrainedModel model = toy_model(60, 6, 2);
    dataset::Rng rng(23);
    Matrix xt(3, 6);
    for (Index c = 0; c < 6; ++c)
        xt.col(c) = model.x.col(c * 9) +
                    0.05 * Vector(oracle::random_matrix(3, 1, rng));

    const double mu = 1e9;
    const OosResult eig = oos_eigenfunctions(model, xt, mu);
    const OosResult rec = oos_reconstruct(model, xt);

    // The corollary equates the maps per dimension up to the known scale
    // sqrt(delta_r) / (mu - 1); undo it and compare directions per point.
    Matrix rescaled = eig.y;
    for (Index r = 0; r < 2; ++r)
        rescaled.col(r) *=
            std::sqrt(mu - model.eigenvalues(r)) / (mu - 1.0);
    for (Index t = 0; t < 6; ++t) {
        const double cosine = rescaled.row(t).dot(rec.y.row(t)) /
                              (rescaled.row(t).norm() * rec.y.row(t).norm());
        CHECK(cosine > 1.0 - 1e-6);
    }
}

TEST_CASE("oos_kernel_mapping reproduces the training embedding") {
    const TrainedModel model = toy_model(30, 5, 2);
    const OosResult res = oos_kernel_mapping(model, model.x, 1.0);
    CHECK((res.y - model.y).norm() <= 1e-6 * model.y.norm());
}

TEST_CASE("oos_kernel_mapping: single training point") {
    Matrix x(2, 1);
    x << 0.5, -0.25;
    TrainedModel model;
    model.x = x;
    model.y = Matrix::Constant(1, 2, 3.0);
    model.k = 1;
    model.eps_scale = 1e-3;
    Matrix xt(2, 3);
    xt << 0.5, 1.0, 0.0, -0.25, 0.5, 0.0;
    const OosResult res = oos_kernel_mapping(model, xt, 1.0);
    for (Index t = 0; t < 3; ++t) {
        CHECK(res.y(t, 0) == doctest::Approx(3.0));
        CHECK(res.y(t, 1) == doctest::Approx(3.0));
    }
}

TEST_CASE("oos_kernel_mapping survives duplicated training data") {
    Matrix x(2, 8);
    x << 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
         0.0, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0;  // duplicate first column
    const TrainedModel model = train(x, 3, 1, 1e-3);
    const Matrix xt = 0.5 * (x.col(2) + x.col(3));
    const OosResult res = oos_kernel_mapping(model, xt, 1.0);
    CHECK(res.y.allFinite());
}

TEST_CASE("oos_kernel_mapping flags isolated test points") {
    Matrix x(1, 5);
    x << 0.0, 1.0, 2.0, 3.0, 4.0;
    const TrainedModel model = train(x, 2, 1, 1e-3);
    Matrix far(1, 1);
    far << 1e6;
    CHECK_THROWS_WITH_AS(oos_kernel_mapping(model, far, 1.0),
                         doctest::Contains("isolated"), NumericalError);
}

TEST_CASE("held-out swiss roll points: kernel map near reconstruction") {
    const auto [x, params] = dataset::generate_swiss_roll(200, 0.0, 31);
    const TrainedModel model = train(x.leftCols(180), 8, 2, 1e-3);
    const Matrix xt = x.rightCols(20);
    const OosResult rec = oos_reconstruct(model, xt);
    const OosResult map = oos_kernel_mapping(model, xt, 1.0);
    double diameter = 0.0;
    for (Index a = 0; a < model.n(); ++a)
        for (Index b = a + 1; b < model.n(); ++b)
            diameter = std::max(diameter,
                                (model.y.row(a) - model.y.row(b)).norm());
    double mean_gap = 0.0;
    for (Index t = 0; t < 20; ++t)
        mean_gap += (rec.y.row(t) - map.y.row(t)).norm();
    mean_gap /= 20.0;
    CHECK(mean_gap < 0.10 * diameter);
}
