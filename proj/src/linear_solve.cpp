#include "tvssl/error.hpp"
#include "tvssl/opt_core.hpp"

#include <cmath>
#include <limits>

namespace tvssl {

SpdSolver::SpdSolver(const Matrix& a) : a_(a) {
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "SPD solve needs a square matrix");
    llt_.compute(a_);
    if (llt_.info() != Eigen::Success) {
        const double m = static_cast<double>(std::max<Eigen::Index>(1, a_.rows()));
        jitter_ = 1e-10 * std::max(a_.trace(), std::numeric_limits<double>::min()) / m;
        Matrix ridge = a_;
        ridge.diagonal().array() += jitter_;
        llt_.compute(ridge);
        require(llt_.info() == Eigen::Success, ErrorCode::Factorization,
                "matrix is not positive definite even after jitter");
    }
}

Vector SpdSolver::solve(const Vector& b) const {
    require(b.size() == a_.rows(), ErrorCode::DimensionMismatch, "right-hand side length mismatch");
    Vector x = llt_.solve(b);
    const double bn = b.norm();
    Vector res = b - a_ * x;
    if (res.norm() > 1e-8 * bn) x += llt_.solve(res);
    return x;
}

Matrix SpdSolver::solve(const Matrix& b) const {
    require(b.rows() == a_.rows(), ErrorCode::DimensionMismatch, "right-hand side rows mismatch");
    return llt_.solve(b);
}

LuSolver::LuSolver(const Matrix& a) : a_(a) {
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "LU solve needs a square matrix");
    lu_.compute(a_);
    const double rc = lu_.rcond();
    require(std::isfinite(rc) && rc > 1e3 * std::numeric_limits<double>::epsilon(),
            ErrorCode::Factorization,
            "system matrix is singular to working precision (rcond=" + std::to_string(rc) + ")");
}

Vector LuSolver::solve(const Vector& b) const {
    require(b.size() == a_.rows(), ErrorCode::DimensionMismatch, "right-hand side length mismatch");
    Vector x = lu_.solve(b);
    Vector res = b - a_ * x;
    if (res.norm() > 1e-10 * b.norm()) x += lu_.solve(res);
    return x;
}

Matrix LuSolver::solve(const Matrix& b) const {
    require(b.rows() == a_.rows(), ErrorCode::DimensionMismatch, "right-hand side rows mismatch");
    return lu_.solve(b);
}

Matrix LuSolver::solve_transposed(const Matrix& b) const {
    require(b.rows() == a_.rows(), ErrorCode::DimensionMismatch, "right-hand side rows mismatch");
    return lu_.transpose().solve(b);
}

Vector solve_spd(const Matrix& a, const Vector& b) {
    return SpdSolver(a).solve(b);
}

}  // namespace tvssl
