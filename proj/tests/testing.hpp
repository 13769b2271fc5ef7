#pragma once

// Shared helpers for numeric checks in the test suites.

#include <cmath>
#include <functional>

#include "foga/core/rng.hpp"
#include "foga/core/tensor.hpp"

namespace foga::testing {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

/// Central finite difference of f with respect to one scalar slot.
template <class F>
double central_diff(F&& f, double* slot, double eps = 1e-5) {
    const double orig = *slot;
    *slot = orig + eps;
    const double fp = f();
    *slot = orig - eps;
    const double fm = f();
    *slot = orig;
    return (fp - fm) / (2.0 * eps);
}

/// Fixed random weights turning a tensor-valued map into a scalar.
inline Tensor<double> probe_weights(const Tensor<double>& like, std::uint64_t seed) {
    Tensor<double> w = Tensor<double>::zeros_like(like);
    Rng rng(seed);
    w.fill_uniform(rng, -1.0, 1.0);
    return w;
}

inline double weighted_sum(const Tensor<double>& y, const Tensor<double>& w) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
    return s;
}

}  // namespace foga::testing
