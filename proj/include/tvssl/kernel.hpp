#pragma once

#include "tvssl/types.hpp"

namespace tvssl {

/// Dense Gram matrix of the Gaussian RBF kernel over a training set.
struct KernelMatrix {
    Matrix values;
    double bandwidth = 1.0;

    Eigen::Index size() const { return values.rows(); }
};

/// k(a, b) = exp(-||a - b||^2 / (2 bandwidth^2))
double rbf(const Eigen::Ref<const Eigen::RowVectorXd>& a,
           const Eigen::Ref<const Eigen::RowVectorXd>& b, double bandwidth);

KernelMatrix rbf_gram(const DataMatrix& data, double bandwidth);

/// Cross Gram matrix, rows indexed by query points.
Matrix rbf_cross(const DataMatrix& query, const DataMatrix& train, double bandwidth);

/// f(x_q) = sum_j k(x_q, x_j) alpha_j for every query row.
Vector kernel_expand(const Vector& alpha, const DataMatrix& train, const DataMatrix& query,
                     double bandwidth);

/// Lower median of the pairwise distances over an evenly strided subsample of
/// at most max_points rows.
double median_bandwidth(const DataMatrix& data, Eigen::Index max_points = 1000);

}  // namespace tvssl
