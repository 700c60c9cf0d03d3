#include "lle/numlin.hpp"

#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace lle;
using namespace lle::numlin;

TEST_CASE("sym_eigen identity and diagonal") {
    const auto id = sym_eigen(Matrix::Identity(3, 3));
    CHECK(id.eigenvalues.isApprox(Vector::Ones(3)));

    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 3.0, 1.0, 2.0;
    const auto res = sym_eigen(d);
    CHECK(res.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(res.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(res.eigenvalues(2) == doctest::Approx(3.0));
}

TEST_CASE("sym_eigen residual and orthonormality on random symmetric") {
    dataset::Rng rng(7);
    const Matrix a0 = oracle::random_matrix(6, 6, rng);
    const Matrix a = 0.5 * (a0 + a0.transpose());
    const auto res = sym_eigen(a);
    for (Index i = 0; i < 6; ++i) {
        const Vector v = res.eigenvectors.col(i);
        CHECK((a * v - res.eigenvalues(i) * v).norm() <= 1e-8 * a.norm());
    }
    CHECK((res.eigenvectors.transpose() * res.eigenvectors -
           Matrix::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
}

TEST_CASE("sym_eigen sign convention: largest-magnitude component positive") {
    dataset::Rng rng(12);
    const Matrix a0 = oracle::random_matrix(5, 5, rng);
    const auto res = sym_eigen(Matrix(0.5 * (a0 + a0.transpose())));
    for (Index c = 0; c < 5; ++c) {
        Index best = 0;
        for (Index r = 1; r < 5; ++r)
            if (std::abs(res.eigenvectors(r, c)) >
                std::abs(res.eigenvectors(best, c)))
                best = r;
        CHECK(res.eigenvectors(best, c) > 0.0);
    }
}

TEST_CASE("sym_eigen rejects bad input") {
    CHECK_THROWS_AS(sym_eigen(Matrix::Zero(2, 3)), ContractViolation);
    Matrix asym(2, 2);
    asym << 0.0, 1.0, -1.0, 0.0;
    CHECK_THROWS_AS(sym_eigen(asym), ContractViolation);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eigen(bad), ContractViolation);
}

TEST_CASE("pseudo_inverse: invertible, projector, tall matrix") {
    Matrix a(2, 2);
    a << 3.0, 1.0, 2.0, 4.0;
    CHECK((pseudo_inverse(a) - a.inverse()).cwiseAbs().maxCoeff() <= 1e-10);

    dataset::Rng rng(3);
    Vector u = oracle::random_matrix(4, 1, rng);
    u.normalize();
    const Matrix proj = u * u.transpose();
    CHECK((pseudo_inverse(proj) - proj).cwiseAbs().maxCoeff() <= 1e-10);

    const Matrix tall = oracle::random_matrix(4, 3, rng);
    const Matrix normal_eq =
        (tall.transpose() * tall).inverse() * tall.transpose();
    CHECK((pseudo_inverse(tall) - normal_eq).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("pseudo_inverse Moore-Penrose conditions and involution") {
    dataset::Rng rng(5);
    const Matrix a = oracle::random_matrix(5, 3, rng);
    const Matrix pinv = pseudo_inverse(a);
    CHECK((a * pinv * a - a).norm() <= 1e-8 * a.norm());
    CHECK((pinv * a * pinv - pinv).norm() <= 1e-8 * pinv.norm());
    CHECK((pseudo_inverse(pinv) - a).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("solve_spd basic and residual") {
    Vector b(2);
    b << 1.0, 2.0;
    CHECK(solve_spd(Matrix::Identity(2, 2), b).isApprox(b));

    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2.0, 4.0;
    Vector rhs(2);
    rhs << 2.0, 4.0;
    CHECK(solve_spd(d, rhs).isApprox(Vector::Ones(2)));

    dataset::Rng rng(11);
    const Matrix a = oracle::random_spd(5, rng);
    const Vector b5 = oracle::random_matrix(5, 1, rng);
    const Vector x = solve_spd(a, b5);
    CHECK((a * x - b5).norm() <= 1e-8 * (a.norm() * x.norm() + b5.norm()));
}

TEST_CASE("solve_spd names the failing solve") {
    const Matrix singular = Matrix::Ones(3, 3);
    const Vector b = Vector::Ones(3);
    CHECK_THROWS_WITH_AS(solve_spd(singular, b, "local gram"),
                         doctest::Contains("local gram"), NumericalError);
}

TEST_CASE("svd: diagonal, zero, random reconstruction") {
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 2.0, 1.0;
    const auto r = svd(d);
    CHECK(r.singular_values(0) == doctest::Approx(2.0));
    CHECK(r.singular_values(1) == doctest::Approx(1.0));

    CHECK(svd(Matrix::Zero(3, 2)).singular_values.cwiseAbs().maxCoeff() <= 1e-15);

    dataset::Rng rng(2);
    const Matrix a = oracle::random_matrix(4, 4, rng);
    const auto f = svd(a);
    CHECK((f.u * f.singular_values.asDiagonal() * f.v.transpose() - a).norm() <=
          1e-8 * a.norm());
    CHECK((f.u.transpose() * f.u - Matrix::Identity(4, 4)).norm() <= 1e-10);
    CHECK((f.v.transpose() * f.v - Matrix::Identity(4, 4)).norm() <= 1e-10);
}

TEST_CASE("deterministic outputs for identical inputs") {
    dataset::Rng rng(9);
    const Matrix a0 = oracle::random_matrix(6, 6, rng);
    const Matrix a = 0.5 * (a0 + a0.transpose());
    const auto r1 = sym_eigen(a);
    const auto r2 = sym_eigen(a);
    CHECK(r1.eigenvectors == r2.eigenvectors);
    CHECK(r1.eigenvalues == r2.eigenvalues);
    const Matrix p1 = pseudo_inverse(a);
    const Matrix p2 = pseudo_inverse(a);
    CHECK(p1 == p2);
}
