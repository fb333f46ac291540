#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "besov_ns/initial_fields.hpp"

namespace besov_ns::testing {

/// Samples fn(c, x, y, z) on the physical grid and transforms.
inline FourierField sample(const TorusGrid& g, int components,
                           const std::function<double(int, double, double, double)>& fn) {
    return detail::from_function(g, components, fn);
}

/// Real field with every non-Nyquist mode up to |k| <= cap filled.
inline FourierField rough_field(const TorusGrid& g, int components, std::uint64_t seed, double slope = 0.5,
                                double cap = 0.0) {
    return random_field(g, components, seed, slope, cap);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace besov_ns::testing
