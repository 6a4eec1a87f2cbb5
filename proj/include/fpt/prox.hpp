#pragma once

// Closed-form scalar thresholding operator for the fraction penalty.
//
// For f(y) = (y - x)^2 + lambda * p_a(|y|) the global minimizer is 0 inside
// a dead zone |x| <= t and otherwise the outermost real root of a structured
// cubic, available in trigonometric form (resolvent below). The dead-zone
// radius switches at lambda = 1/a^2:
//   t = t2 = lambda*a/2            for lambda <= 1/a^2  (operator continuous)
//   t = t3 = sqrt(lambda) - 1/(2a) for lambda >  1/a^2  (operator jumps; every
//       nonzero output has magnitude >= sqrt(lambda) - 1/a)
// The third constant t1 <= t3 <= t2 marks where the cubic stops having three
// real roots; the resolvent is only defined for |t| > t1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpt/penalty.hpp"

namespace fpt {

enum class ThresholdRegime { SmallLambda, LargeLambda };

struct ThresholdTriple {
    double t1;
    double t2;
    double t3;
    ThresholdRegime regime;
    double t;  // active dead-zone radius: t2 in SmallLambda, t3 in LargeLambda
};

inline ThresholdTriple compute_thresholds(double lambda, double a) {
    if (!std::isfinite(lambda) || !std::isfinite(a) || lambda <= 0.0 || a <= 0.0) {
        throw std::domain_error("compute_thresholds: lambda and a must be positive");
    }
    ThresholdTriple out{};
    out.t1 = (std::cbrt(27.0 * lambda * a * a / 8.0) - 1.0) / a;
    out.t2 = lambda * a / 2.0;
    out.t3 = std::sqrt(lambda) - 1.0 / (2.0 * a);
    out.regime = lambda <= 1.0 / (a * a) ? ThresholdRegime::SmallLambda
                                         : ThresholdRegime::LargeLambda;
    out.t = out.regime == ThresholdRegime::SmallLambda ? out.t2 : out.t3;
    return out;
}

namespace detail {

// Trigonometric form of the outermost real root; caller guarantees |t| > t1.
inline double resolvent_at(double t, double lambda, double a) {
    const double abs_t = std::fabs(t);
    const double s = 1.0 + a * abs_t;
    // At |t| = t1 the argument is exactly 1; rounding can push it past +/-1.
    const double arg =
        std::clamp(27.0 * lambda * a * a / (4.0 * s * s * s) - 1.0, -1.0, 1.0);
    const double phi = std::acos(arg);
    const double root =
        ((s / 3.0) * (1.0 + 2.0 * std::cos(phi / 3.0 - std::numbers::pi / 3.0)) - 1.0) / a;
    return t < 0.0 ? -root : root;
}

}  // namespace detail

// Largest real root of 2y(ay+1)^2 - 2t(ay+1)^2 + lambda*a = 0 for t > t1
// (smallest root of the sign-mirrored cubic for t < -t1). Odd in t, and
// |resolvent(t)| <= |t|. Outside |t| > t1 the three-real-roots guarantee
// fails, so the call is rejected rather than extended.
inline double resolvent(double t, double lambda, double a) {
    detail::require_finite(t, "resolvent");
    const ThresholdTriple th = compute_thresholds(lambda, a);
    if (!(std::fabs(t) > th.t1)) {
        throw std::domain_error("resolvent: |t| must exceed t1");
    }
    return detail::resolvent_at(t, lambda, a);
}

struct ProxConfig {
    double lambda;
    double mu;
    double a;

    ProxConfig(double lambda_, double mu_, double a_) : lambda(lambda_), mu(mu_), a(a_) {
        if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(a) ||
            lambda <= 0.0 || mu <= 0.0 || a <= 0.0) {
            throw std::invalid_argument("ProxConfig: lambda, mu, a must be positive");
        }
    }

    // The scalar operator sees lambda*mu when used inside the iteration.
    double effective_lambda() const { return lambda * mu; }
};

// Global minimizer of (y - x)^2 + lambda_eff * p_a(|y|). The dead zone is
// closed: |x| == t maps to 0.
inline double prox_scalar(double x, double lambda_eff, double a) {
    detail::require_finite(x, "prox_scalar");
    const ThresholdTriple th = compute_thresholds(lambda_eff, a);
    if (std::fabs(x) <= th.t) return 0.0;
    return detail::resolvent_at(x, lambda_eff, a);
}

inline double prox_scalar(double x, const ProxConfig& cfg) {
    return prox_scalar(x, cfg.effective_lambda(), cfg.a);
}

// Componentwise prox; suppressed entries are bitwise 0.0, so supports can be
// read off without an epsilon.
inline std::vector<double> prox_vector(std::span<const double> z, double lambda_eff, double a) {
    const ThresholdTriple th = compute_thresholds(lambda_eff, a);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double zi = z[i];
        detail::require_finite(zi, "prox_vector");
        out[i] = std::fabs(zi) <= th.t ? 0.0 : detail::resolvent_at(zi, lambda_eff, a);
    }
    return out;
}

inline std::vector<double> prox_vector(std::span<const double> z, const ProxConfig& cfg) {
    return prox_vector(z, cfg.effective_lambda(), cfg.a);
}

}  // namespace fpt
