#include "tvssl/error.hpp"
#include "tvssl/opt_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tvssl {

Vector project_simplex(const Vector& v) {
    const auto c = v.size();
    require(c >= 1, ErrorCode::InvalidParameter, "simplex projection needs at least one entry");

    // Michelot: repeatedly shift the active set onto the hyperplane sum = 1 and
    // drop entries that went negative. The active set is always a prefix of the
    // values sorted in decreasing order, so sums are taken in that order.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] > v[b]; });

    std::size_t active = order.size();
    double shift = 0.0;
    while (true) {
        double sum = 0.0;
        for (std::size_t t = active; t-- > 0;) sum += v[order[t]];
        shift = (sum - 1.0) / static_cast<double>(active);
        std::size_t keep = active;
        while (keep > 0 && v[order[keep - 1]] - shift < 0.0) --keep;
        if (keep == active) break;
        active = keep;
    }

    Vector u = Vector::Zero(c);
    for (std::size_t t = 0; t < active; ++t) u[order[t]] = v[order[t]] - shift;
    return u;
}

void project_rows_to_simplex(Matrix& channels) {
    for (Eigen::Index i = 0; i < channels.rows(); ++i)
        channels.row(i) = project_simplex(channels.row(i).transpose()).transpose();
}

NodeFunction normalize_ball(const NodeFunction& f, double scale) {
    require(std::isfinite(scale) && scale > 0.0, ErrorCode::InvalidParameter,
            "normalization scale must be positive");
    const double nrm = f.norm();
    require(nrm > 0.0 && std::isfinite(nrm), ErrorCode::DegenerateInput,
            "cannot normalize a zero or non-finite function");
    return f * (scale / nrm);
}

NormalizedFunction normalize_ball_zero_mean(const NodeFunction& f, double scale) {
    NormalizedFunction out;
    out.values = normalize_ball(f, scale);
    out.values.array() -= out.values.mean();
    const double spread = out.values.cwiseAbs().maxCoeff();
    out.degenerate = !(spread > 1e-12 * scale);
    if (out.degenerate) out.values.setZero();
    return out;
}

}  // namespace tvssl
