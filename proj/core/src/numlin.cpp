#include "lle/numlin.hpp"

#include "lle/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace lle::numlin {

void require_finite(const Matrix& a, const std::string& name) {
    if (!a.allFinite())
        throw ContractViolation(name + ": non-finite entries");
}

SymEigenResult sym_eigen(const Matrix& a) {
    require_finite(a, "sym_eigen");
    require(a.rows() == a.cols(), "sym_eigen: matrix must be square");
    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(scale, 1e-300))
        throw ContractViolation("sym_eigen: matrix not symmetric to tolerance");

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    if (es.info() != Eigen::Success)
        throw NumericalError("sym_eigen: eigensolver failed to converge");

    Matrix v = es.eigenvectors();
    for (Index c = 0; c < v.cols(); ++c) {
        Index best = 0;
        double mag = std::abs(v(0, c));
        for (Index r = 1; r < v.rows(); ++r) {
            if (std::abs(v(r, c)) > mag) {  // strict: ties keep lowest index
                mag = std::abs(v(r, c));
                best = r;
            }
        }
        if (v(best, c) < 0.0) v.col(c) = -v.col(c);
    }
    return {es.eigenvalues(), std::move(v)};
}

Matrix pseudo_inverse(const Matrix& a, double tol) {
    require_finite(a, "pseudo_inverse");
    require(tol > 0.0, "pseudo_inverse: tol must be positive");
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s.size() == 0) return Matrix::Zero(a.cols(), a.rows());
    const double cutoff = tol * s(0);
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

Eigen::LDLT<Matrix> factor_spd(const Matrix& a, const std::string& context) {
    require_finite(a, context);
    require(a.rows() == a.cols(), context + ": matrix must be square");
    Eigen::LDLT<Matrix> ldlt(0.5 * (a + a.transpose()));
    const Vector d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.size() ? d.maxCoeff() : 0.0;
    if (ldlt.info() != Eigen::Success || dmax <= 0.0 ||
        d.minCoeff() <= 1e-14 * dmax)
        throw NumericalError(context + ": matrix singular to tolerance");
    return ldlt;
}

}  // namespace

Vector solve_spd(const Matrix& a, const Vector& b, const std::string& context) {
    require(a.rows() == b.size(), context + ": size mismatch");
    return factor_spd(a, context).solve(b);
}

Matrix solve_spd(const Matrix& a, const Matrix& b, const std::string& context) {
    require(a.rows() == b.rows(), context + ": size mismatch");
    return factor_spd(a, context).solve(b);
}

SvdResult svd(const Matrix& a) {
    require_finite(a, "svd");
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

}  // namespace lle::numlin
