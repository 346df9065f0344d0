#pragma once

// Slow, independent reference solvers used by the unit and acceptance tests.
// None of them share code with the library's optimizers.

#include "tvssl/graph.hpp"
#include "tvssl/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using tvssl::Matrix;
using tvssl::Vector;

/// Hinge-loss primal over a linear margin map:
///
///   min_{x, b}  1/2 x^T H x - c^T x + c0 + mu sum_i max(0, 1 - y_i (a_i^T x + b))
///
/// where a_i is row i of A (one row per constrained point). H must be
/// positive definite.
struct HingeProblem {
    Matrix h;
    Vector c;
    double c0 = 0.0;
    Matrix a;
    Vector y;
    double mu = 1.0;
};

struct HingeSolution {
    Vector x;
    double b = 0.0;
    double objective = 0.0;
    bool found = false;
};

double hinge_objective(const HingeProblem& p, const Vector& x, double b);

/// Smallest objective over b for fixed x (exact: piecewise linear in b).
double hinge_objective_best_b(const HingeProblem& p, const Vector& x);

/// Exhaustive search over the 3^m partitions of the constrained points into
/// {inside the margin, on it, outside}. Each partition gives an equality
/// constrained quadratic solved exactly; the best candidate that is
/// consistent with its partition is the global minimizer. m <= 10.
HingeSolution hinge_partition_oracle(const HingeProblem& p);

/// max beta^T 1 - 1/2 beta^T Q beta - beta^T p, y^T beta = 0, 0 <= beta <= mu,
/// by enumerating which coordinates sit at 0, at mu or strictly between.
struct QpSolution {
    Vector beta;
    double objective = 0.0;
    bool found = false;
};
QpSolution box_eq_active_set_oracle(const Matrix& q, const Vector& p, const Vector& y, double mu);
double box_eq_objective(const Matrix& q, const Vector& p, const Vector& beta);

/// argmin weight * graph_tv(u) + 1/2 ||u - z||^2 by subgradient descent with
/// step 1/(t+1) (the objective is 1-strongly convex), best iterate kept.
struct TvOracleResult {
    Vector u;
    double objective = 0.0;
};
TvOracleResult tv_prox_subgradient(const tvssl::SimilarityGraph& g, const Vector& z, double weight,
                                   long iterations);

/// Projection onto the probability simplex by sorting.
Vector simplex_sort(const Vector& v);

/// Dense weight matrix of the union-symmetrized k-NN graph, by full sort.
/// sigma > 0 selects a fixed scale, otherwise self-tuning with rank m.
Matrix knn_brute_force(const tvssl::DataMatrix& data, std::size_t k, double sigma, std::size_t m);

// ---- generators ----------------------------------------------------------

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0);
Vector random_signs(std::mt19937_64& rng, Eigen::Index n);
tvssl::DataMatrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d);
/// Random connected weighted graph: a random spanning path plus extra edges.
tvssl::SimilarityGraph random_graph(std::mt19937_64& rng, std::size_t n, double extra_prob);
/// Path, cycle, star, complete and random graphs on 2..max_nodes nodes.
std::vector<tvssl::SimilarityGraph> small_graph_suite(std::size_t max_nodes, std::uint64_t seed);

}  // namespace oracle
