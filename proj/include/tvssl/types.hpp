#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace tvssl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// N points by d attributes, one point per row.
using DataMatrix = Eigen::MatrixXd;

/// Values of a function on the nodes of a graph, f_i = f(x_i).
using NodeFunction = Eigen::VectorXd;

enum class NormScale {
    N,      // rescale to ||f||_2 = N
    SqrtN,  // rescale to ||f||_2 = sqrt(N)
};

/// Scalars consumed by the classifiers. Not every algorithm reads every
/// field; the unused ones are ignored.
struct HyperParams {
    double eta = 1.0;     // label fidelity
    double lambda = 1.0;  // RKHS norm weight
    double gamma = 1.0;   // graph regularizer weight
    double mu = 1.0;      // slack weight (SVM box bound)
    double r = 1.0;       // penalty for single-split methods and kernel proxes
    double r1 = 1.0;      // f-g penalty in the two-split methods
    double r2 = 1.0;      // h-g penalty in the two-split methods
    double c = 1.0;       // Cheeger step constant
    int outer_iters = 200;
    int inner_iters = 500;  // primal-dual iterations inside tv_prox
    double tol = 1e-5;
    double qp_tol = 1e-6;
    int qp_iters = 5000;

    NormScale norm_scale = NormScale::N;
    bool simplex_last = false;      // multiclass: renormalize before simplex projection
    bool use_bias = false;          // add the dual-recovered bias at prediction
    bool unlabeled_margins = true;  // SVM margins on pseudo-labelled unlabeled points

    /// Throws InvalidParameter when a positivity or count invariant fails.
    void validate() const;
};

double norm_target(NormScale scale, std::size_t n);

}  // namespace tvssl
