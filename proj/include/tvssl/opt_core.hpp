#pragma once

#include "tvssl/graph.hpp"
#include "tvssl/types.hpp"

#include <optional>
#include <vector>

namespace tvssl {

// ---------------------------------------------------------------------------
// Linear systems
// ---------------------------------------------------------------------------

/// Cholesky factorization of a symmetric PSD matrix, kept for repeated
/// solves. On failure a ridge of 1e-10 * trace / m is added once.
class SpdSolver {
public:
    SpdSolver() = default;
    explicit SpdSolver(const Matrix& a);

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;

    Eigen::Index size() const { return a_.rows(); }
    bool jittered() const { return jitter_ > 0.0; }

private:
    Matrix a_;
    Eigen::LLT<Matrix> llt_;
    double jitter_ = 0.0;
};

/// Partial-pivot LU for the nonsymmetric closed forms (eta J K + lambda I +
/// gamma L K and friends). Throws Factorization when the matrix is singular
/// to working precision.
class LuSolver {
public:
    LuSolver() = default;
    explicit LuSolver(const Matrix& a);

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& b) const;
    /// Solves a^T x = b with the same factorization.
    Matrix solve_transposed(const Matrix& b) const;

    double rcond() const { return lu_.rcond(); }

private:
    Matrix a_;
    Eigen::PartialPivLU<Matrix> lu_;
};

/// One-shot SPD solve. The residual ||A x - b|| is at most 1e-8 ||b||;
/// one step of iterative refinement is taken when needed.
Vector solve_spd(const Matrix& a, const Vector& b);

// ---------------------------------------------------------------------------
// Graph-TV proximal operator (ROF on a graph)
// ---------------------------------------------------------------------------

struct TvProxOptions {
    int max_iters = 500;
    double tol = 1e-6;
    int power_iters = 20;
};

struct ProxTrace {
    int iterations_run = 0;
    std::vector<double> primal_energy;
    double final_gap = 0.0;
};

struct TvProxResult {
    NodeFunction g;
    ProxTrace trace;
};

/// argmin_u weight * graph_tv(u) + 1/2 ||u - z||^2 by Chambolle-Pock
/// iterations on the edge-difference operator with sigma = tau = 0.99 / ||D||.
/// Stops on a duality gap <= tol, or on a relative energy change <= tol over
/// 10 iterations once the gap is within 10 tol.
TvProxResult tv_prox(const SimilarityGraph& g, const NodeFunction& z, double weight,
                     const TvProxOptions& opts = {});

/// Objective value weight * graph_tv(u) + 1/2 ||u - z||^2.
double tv_prox_objective(const SimilarityGraph& g, const NodeFunction& z, double weight,
                         const NodeFunction& u);

/// Estimate of ||D||^2 for (D u)_e = w_e (u_i - u_j): power iteration capped by
/// the Gershgorin bound 2 max_i sum_j w_ij^2.
double edge_operator_norm_sq(const SimilarityGraph& g, int power_iters);

// ---------------------------------------------------------------------------
// Box + single-equality dual QP
// ---------------------------------------------------------------------------

struct KktResiduals {
    double eq = 0.0;             // |beta^T y|
    double box = 0.0;            // max bound violation
    double stationarity = 0.0;   // ||beta - P(beta + grad)||_inf
};

struct DualSolution {
    Vector beta;
    double objective = 0.0;  // beta^T 1 - 1/2 beta^T Q beta - beta^T p
    double nu = 0.0;         // multiplier of beta^T y = 0, fitted on free coordinates
    int iterations = 0;
    bool converged = false;
    KktResiduals kkt;
};

struct QpOptions {
    double tol = 1e-6;
    int max_iters = 5000;
};

/// max_beta beta^T 1 - 1/2 beta^T Q beta - beta^T p
///   s.t. beta^T y = 0, 0 <= beta_i <= mu
/// Projected gradient with Barzilai-Borwein steps and a 1/L fallback. The
/// feasible-set projection is exact (breakpoint search on the multiplier).
DualSolution qp_box_eq(const Matrix& q, const Vector& p, const Vector& y, double mu,
                       const QpOptions& opts = {}, const Vector* warm_start = nullptr);

/// Same problem with Q = diag(q_diag).
DualSolution qp_box_eq_diagonal(const Vector& q_diag, const Vector& p, const Vector& y, double mu,
                                const QpOptions& opts = {}, const Vector* warm_start = nullptr);

/// Euclidean projection of v onto {beta : beta^T y = 0, 0 <= beta <= mu}
/// for y in {-1, +1}^m.
Vector project_box_hyperplane(const Vector& v, const Vector& y, double mu);

// ---------------------------------------------------------------------------
// Simplex projection and normalization
// ---------------------------------------------------------------------------

/// Euclidean projection onto {u : sum u = 1, u >= 0} by Michelot's finite
/// algorithm. Sums run in sorted order, so the result is exactly
/// permutation-equivariant.
Vector project_simplex(const Vector& v);

/// Projects every row of `channels` (node x class) onto the simplex.
void project_rows_to_simplex(Matrix& channels);

struct NormalizedFunction {
    NodeFunction values;
    bool degenerate = false;  // input was constant, output is zero
};

/// Rescale to ||f||_2 = scale, then subtract the mean.
NormalizedFunction normalize_ball_zero_mean(const NodeFunction& f, double scale);

/// Rescale to ||f||_2 = scale.
NodeFunction normalize_ball(const NodeFunction& f, double scale);

}  // namespace tvssl
