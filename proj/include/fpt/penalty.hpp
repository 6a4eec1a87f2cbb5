#pragma once

// The fraction penalty p_a(t) = a|t| / (1 + a|t|), a bounded concave
// surrogate for the l0 indicator, and its vector sum. Sharpness grows
// with a; p_a(t) -> [t != 0] as a -> infinity.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace fpt {

namespace detail {

inline void require_finite(double v, const char* where) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(where) + ": non-finite argument");
    }
}

}  // namespace detail

struct PenaltyParams {
    double a;

    explicit PenaltyParams(double sharpness) : a(sharpness) {
        if (!std::isfinite(a) || a <= 0.0) {
            throw std::invalid_argument("PenaltyParams: a must be positive and finite");
        }
    }
};

// Scalar penalty value in [0, 1); symmetric, strictly increasing in |t|.
inline double fraction_penalty(double t, const PenaltyParams& params) {
    detail::require_finite(t, "fraction_penalty");
    const double at = params.a * std::fabs(t);
    if (std::isinf(at)) return 1.0;  // a*|t| overflowed; the ratio's limit
    return at / (1.0 + at);
}

// Sum of the scalar penalty over all entries; bounded by the l0 count.
inline double fraction_penalty_sum(std::span<const double> x, const PenaltyParams& params) {
    double s = 0.0;
    for (double v : x) s += fraction_penalty(v, params);
    return s;
}

// Subadditivity chain:
//   p(|xi+xj|) <= p(|xi|+|xj|) <= p(|xi|) + p(|xj|) <= 2 p((|xi|+|xj|)/2)
// checked up to an absolute tolerance.
inline bool check_subadditivity_chain(double xi, double xj, const PenaltyParams& params,
                                      double tol = 1e-12) {
    detail::require_finite(xi, "check_subadditivity_chain");
    detail::require_finite(xj, "check_subadditivity_chain");
    const double s = std::fabs(xi) + std::fabs(xj);
    const double v0 = fraction_penalty(xi + xj, params);
    const double v1 = fraction_penalty(s, params);
    const double v2 = fraction_penalty(xi, params) + fraction_penalty(xj, params);
    const double v3 = 2.0 * fraction_penalty(s / 2.0, params);
    return v0 <= v1 + tol && v1 <= v2 + tol && v2 <= v3 + tol;
}

// The penalty is not homogeneous; scaling obeys
//   p(|ct|) <= |c| p(|t|) for |c| > 1   and   p(|ct|) >= |c| p(|t|) for |c| <= 1.
inline bool check_scaling_bounds(double c, double t, const PenaltyParams& params,
                                 double tol = 1e-12) {
    detail::require_finite(c, "check_scaling_bounds");
    detail::require_finite(t, "check_scaling_bounds");
    const double lhs = fraction_penalty(c * t, params);
    const double rhs = std::fabs(c) * fraction_penalty(t, params);
    return std::fabs(c) > 1.0 ? lhs <= rhs + tol : lhs + tol >= rhs;
}

}  // namespace fpt
