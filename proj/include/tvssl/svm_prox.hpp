#pragma once

#include "tvssl/opt_core.hpp"
#include "tvssl/types.hpp"

#include <vector>

namespace tvssl {

struct SvmProxResult {
    Vector alpha;       // expansion coefficients, length N
    Vector f;           // K alpha
    DualSolution dual;  // over the constrained points
    double bias = 0.0;  // equality multiplier of the dual, i.e. the primal b
};

/// Kernel SVM subproblem
///
///   min_{alpha, b, xi}  lambda/2 a^T K a + gamma/2 (K a)^T L (K a)
///                       + r/2 ||K a - e||^2 + mu sum_{i in C} xi_i
///   s.t. y_i((K a)_i + b) >= 1 - xi_i, xi_i >= 0   for i in C
///
/// with L the energy Laplacian 2(D - W) (or none). This single form covers
/// the plain SVM (gamma = r = 0), Laplacian SVM (r = 0), the Cheeger SVM prox
/// (gamma = 0) and both multiclass channel proxes.
///
/// With M = lambda I + gamma L K + r K the dual is the box/equality QP with
/// Q = Y S Y, p = r Y S e, where S = K M^{-1} is symmetric, and the primal is
/// recovered as alpha = M^{-1}(Y beta + r e). S is formed by solving
/// M^T S = K. Matrix factorizations happen once per instance, so an instance
/// can be reused across outer iterations with different centres and labels.
class KernelSvmProx {
public:
    /// `constrained` lists the node indices carrying margin constraints.
    KernelSvmProx(const Matrix& k, const Matrix* energy_laplacian, double lambda, double gamma,
                  double r, std::vector<Eigen::Index> constrained);

    /// `center` has length N (ignored when r == 0); `y` has one +-1 label per
    /// constrained node.
    SvmProxResult solve(const Vector& center, const Vector& y, double mu, const QpOptions& opts,
                        const Vector* warm_beta = nullptr) const;

    const std::vector<Eigen::Index>& constrained() const { return constrained_; }

    /// Relative asymmetry ||S - S^T|| / ||S|| before symmetrization.
    double symmetry_deviation() const { return asym_; }

    /// S restricted to the constrained nodes.
    const Matrix& s_block() const { return s_cc_; }

private:
    const Matrix& k_;
    double r_;
    std::vector<Eigen::Index> constrained_;
    LuSolver m_lu_;
    Matrix s_rows_;  // rows of S at the constrained nodes, |C| x N
    Matrix s_cc_;
    double asym_ = 0.0;
};

struct IdentitySvmProxResult {
    Vector h;
    DualSolution dual;
    double bias = 0.0;
};

/// h-subproblem of the TV-SVM splitting:
///   min_{h, b, xi} mu sum xi_i + r/2 ||h - e||^2  s.t. y_i(h_i + b) >= 1 - xi_i, xi >= 0
/// Dual Q = Y Y / r (diagonal), p = Y e, recovery h = e + Y beta / r.
IdentitySvmProxResult svm_prox_identity(const Vector& e, const Vector& y, double mu, double r,
                                        const QpOptions& opts, const Vector* warm_beta = nullptr);

}  // namespace tvssl
