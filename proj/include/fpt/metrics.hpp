#pragma once

// Success and error measures: relative squared l2 error, normalized support
// distance, and the success predicate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpt {

struct SupportSet {
    std::vector<std::size_t> indices;  // strictly increasing

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

// Entries with |x_i| > eps; eps = 0 keeps exact nonzeros only.
inline SupportSet support_of(std::span<const double> x, double eps = 0.0) {
    SupportSet s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::fabs(x[i]) > eps) s.indices.push_back(i);
    }
    return s;
}

inline double rel_sq_error(std::span<const double> x_hat, std::span<const double> x_true) {
    if (x_hat.size() != x_true.size()) {
        throw std::invalid_argument("rel_sq_error: size mismatch");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x_hat.size(); ++i) {
        const double d = x_hat[i] - x_true[i];
        num += d * d;
        den += x_true[i] * x_true[i];
    }
    if (den == 0.0) throw std::invalid_argument("rel_sq_error: zero ground truth");
    return num / den;
}

// (max{|S1|,|S2|} - |S1 and S2|) / max{|S1|,|S2|}; 0 iff equal, 1 iff disjoint.
inline double support_distance(const SupportSet& s1, const SupportSet& s2) {
    if (s1.empty() && s2.empty()) {
        throw std::invalid_argument("support_distance: both supports empty");
    }
    std::size_t inter = 0;
    auto it1 = s1.indices.begin();
    auto it2 = s2.indices.begin();
    while (it1 != s1.indices.end() && it2 != s2.indices.end()) {
        if (*it1 < *it2) {
            ++it1;
        } else if (*it2 < *it1) {
            ++it2;
        } else {
            ++inter;
            ++it1;
            ++it2;
        }
    }
    const double big = static_cast<double>(std::max(s1.size(), s2.size()));
    return (big - static_cast<double>(inter)) / big;
}

inline bool is_success(std::span<const double> x_hat, std::span<const double> x_true,
                       double threshold = 1e-5) {
    return rel_sq_error(x_hat, x_true) <= threshold;
}

}  // namespace fpt
