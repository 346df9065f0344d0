#include "tvssl/error.hpp"
#include "tvssl/types.hpp"

#include <cmath>

namespace tvssl {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "invalid_parameter";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::DegenerateScale: return "degenerate_scale";
        case ErrorCode::DegenerateInput: return "degenerate_input";
        case ErrorCode::Factorization: return "factorization";
        case ErrorCode::Divergence: return "divergence";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
        case ErrorCode::InsufficientLabels: return "insufficient_labels";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::Unsupported: return "unsupported";
    }
    return "unknown";
}

namespace {

void positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, ErrorCode::InvalidParameter,
            std::string(name) + " must be positive and finite");
}

void non_negative(double v, const char* name) {
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidParameter,
            std::string(name) + " must be non-negative and finite");
}

}  // namespace

void HyperParams::validate() const {
    positive(eta, "eta");
    positive(lambda, "lambda");
    non_negative(gamma, "gamma");
    positive(mu, "mu");
    positive(r, "r");
    positive(r1, "r1");
    positive(r2, "r2");
    positive(c, "c");
    positive(tol, "tol");
    positive(qp_tol, "qp_tol");
    require(outer_iters >= 1 && inner_iters >= 1 && qp_iters >= 1, ErrorCode::InvalidParameter,
            "iteration limits must be at least 1");
}

double norm_target(NormScale scale, std::size_t n) {
    return scale == NormScale::N ? static_cast<double>(n) : std::sqrt(static_cast<double>(n));
}

}  // namespace tvssl
