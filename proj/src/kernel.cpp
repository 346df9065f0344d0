#include "tvssl/kernel.hpp"

#include "tvssl/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tvssl {

namespace {

void check_bandwidth(double bandwidth) {
    require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidParameter,
            "kernel bandwidth must be positive");
}

}  // namespace

double rbf(const Eigen::Ref<const Eigen::RowVectorXd>& a,
           const Eigen::Ref<const Eigen::RowVectorXd>& b, double bandwidth) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

KernelMatrix rbf_gram(const DataMatrix& data, double bandwidth) {
    check_bandwidth(bandwidth);
    const auto n = data.rows();
    KernelMatrix k{Matrix(n, n), bandwidth};
    for (Eigen::Index i = 0; i < n; ++i) {
        k.values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = rbf(data.row(i), data.row(j), bandwidth);
            k.values(i, j) = v;
            k.values(j, i) = v;
        }
    }
    return k;
}

Matrix rbf_cross(const DataMatrix& query, const DataMatrix& train, double bandwidth) {
    check_bandwidth(bandwidth);
    require(query.cols() == train.cols(), ErrorCode::DimensionMismatch,
            "query and training data have different attribute counts");
    Matrix out(query.rows(), train.rows());
    for (Eigen::Index q = 0; q < query.rows(); ++q)
        for (Eigen::Index j = 0; j < train.rows(); ++j)
            out(q, j) = rbf(query.row(q), train.row(j), bandwidth);
    return out;
}

Vector kernel_expand(const Vector& alpha, const DataMatrix& train, const DataMatrix& query,
                     double bandwidth) {
    require(alpha.size() == train.rows(), ErrorCode::DimensionMismatch,
            "alpha length " + std::to_string(alpha.size()) + " does not match " +
                std::to_string(train.rows()) + " training points");
    return rbf_cross(query, train, bandwidth) * alpha;
}

double median_bandwidth(const DataMatrix& data, Eigen::Index max_points) {
    const auto n = data.rows();
    require(n >= 2, ErrorCode::InvalidParameter, "median heuristic needs at least 2 points");
    const Eigen::Index m = std::min(n, std::max<Eigen::Index>(2, max_points));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(m));
    for (Eigen::Index t = 0; t < m; ++t) rows[static_cast<std::size_t>(t)] = (t * n) / m;

    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b)
            dist.push_back((data.row(rows[a]) - data.row(rows[b])).norm());
    const auto mid = dist.begin() + static_cast<std::ptrdiff_t>((dist.size() - 1) / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    require(*mid > 0.0, ErrorCode::DegenerateScale, "median pairwise distance is zero");
    return *mid;
}

}  // namespace tvssl
