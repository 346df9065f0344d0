#include "tvssl/svm_prox.hpp"

#include "tvssl/error.hpp"

#include <cmath>

namespace tvssl {

namespace {

Matrix build_system(const Matrix& k, const Matrix* lap, double lambda, double gamma, double r) {
    require(k.rows() == k.cols(), ErrorCode::DimensionMismatch, "kernel matrix must be square");
    require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::InvalidParameter, "lambda must be positive");
    require(std::isfinite(r) && r >= 0.0, ErrorCode::InvalidParameter, "r must be non-negative");
    require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::InvalidParameter,
            "gamma must be non-negative");
    Matrix m = r * k;
    m.diagonal().array() += lambda;
    if (lap && gamma > 0.0) {
        require(lap->rows() == k.rows() && lap->cols() == k.cols(), ErrorCode::DimensionMismatch,
                "graph and kernel cover different point sets");
        m.noalias() += gamma * (*lap) * k;
    }
    return m;
}

}  // namespace

KernelSvmProx::KernelSvmProx(const Matrix& k, const Matrix* energy_laplacian, double lambda,
                             double gamma, double r, std::vector<Eigen::Index> constrained)
    : k_(k), r_(r), constrained_(std::move(constrained)),
      m_lu_(build_system(k, energy_laplacian, lambda, gamma, r)) {
    for (auto i : constrained_)
        require(i >= 0 && i < k.rows(), ErrorCode::InvalidParameter,
                "constrained node index out of range");

    // M^T S = K gives S = M^{-T} K = K M^{-1}, which is symmetric.
    Matrix s = m_lu_.solve_transposed(k);
    const double nrm = s.norm();
    asym_ = nrm > 0.0 ? (s - s.transpose()).norm() / nrm : 0.0;
    s = 0.5 * (s + s.transpose()).eval();

    const auto c = static_cast<Eigen::Index>(constrained_.size());
    s_rows_.resize(c, k.cols());
    for (Eigen::Index a = 0; a < c; ++a) s_rows_.row(a) = s.row(constrained_[static_cast<std::size_t>(a)]);
    s_cc_.resize(c, c);
    for (Eigen::Index b = 0; b < c; ++b) s_cc_.col(b) = s_rows_.col(constrained_[static_cast<std::size_t>(b)]);
}

SvmProxResult KernelSvmProx::solve(const Vector& center, const Vector& y, double mu,
                                   const QpOptions& opts, const Vector* warm_beta) const {
    const auto n = k_.rows();
    const auto c = static_cast<Eigen::Index>(constrained_.size());
    require(y.size() == c, ErrorCode::DimensionMismatch, "one label per constrained node required");
    const bool has_center = r_ > 0.0;
    if (has_center)
        require(center.size() == n, ErrorCode::DimensionMismatch, "prox centre must have length N");

    const Matrix q = y.asDiagonal() * s_cc_ * y.asDiagonal();
    Vector p = Vector::Zero(c);
    if (has_center) p = r_ * y.cwiseProduct(s_rows_ * center);

    SvmProxResult out;
    out.dual = qp_box_eq(q, p, y, mu, opts, warm_beta);
    out.bias = out.dual.nu;

    Vector rhs = Vector::Zero(n);
    for (Eigen::Index a = 0; a < c; ++a)
        rhs[constrained_[static_cast<std::size_t>(a)]] += y[a] * out.dual.beta[a];
    if (has_center) rhs += r_ * center;
    out.alpha = m_lu_.solve(rhs);
    out.f = k_ * out.alpha;
    return out;
}

IdentitySvmProxResult svm_prox_identity(const Vector& e, const Vector& y, double mu, double r,
                                        const QpOptions& opts, const Vector* warm_beta) {
    require(e.size() == y.size(), ErrorCode::DimensionMismatch, "e and y differ in length");
    require(std::isfinite(r) && r > 0.0, ErrorCode::InvalidParameter, "r must be positive");
    const auto n = e.size();
    const Vector q_diag = Vector::Constant(n, 1.0 / r);  // Y Y / r with y_i^2 = 1
    const Vector p = y.cwiseProduct(e);

    IdentitySvmProxResult out;
    out.dual = qp_box_eq_diagonal(q_diag, p, y, mu, opts, warm_beta);
    out.bias = out.dual.nu;
    out.h = e + y.cwiseProduct(out.dual.beta) / r;
    return out;
}

}  // namespace tvssl
