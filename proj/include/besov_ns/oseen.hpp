#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/parallel.hpp"
#include "besov_ns/spectral_ops.hpp"
#include "besov_ns/time_trace.hpp"

namespace besov_ns {

/// Exponential-integrator rule for the Duhamel integral. Order 2 treats the
/// forcing as piecewise linear on each sample interval and integrates the
/// heat kernel exactly; order 1 freezes the left value. Substeps split each
/// interval (forcing linearly interpolated), which only matters for order 1.
struct OseenQuadrature {
    int order = 2;
    int substeps = 1;

    void validate() const {
        if (order != 1 && order != 2) throw std::invalid_argument("OseenQuadrature: order must be 1 or 2");
        if (substeps < 1) throw std::invalid_argument("OseenQuadrature: substeps must be >= 1");
    }
};

namespace detail {

/// Per-mode step weights: I(t+h) = decay·I(t) + left·G(t) + right·G(t+h).
struct StepWeights {
    double decay = 1.0;
    double left = 0.0;
    double right = 0.0;
};

/// ∫_0^h e^{-λτ} dτ and (1/h)∫_0^h τ e^{-λτ} dτ with small-λh series.
inline void kernel_moments(double lambda, double h, double& m0, double& m1) {
    const double z = lambda * h;
    if (z < 1e-2) {
        m0 = h * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0 + z * z * z * z / 120.0);
        m1 = h * (0.5 - z / 3.0 + z * z / 8.0 - z * z * z / 30.0 + z * z * z * z / 144.0);
    } else {
        const double e = std::exp(-z);
        m0 = -std::expm1(-z) / lambda;
        m1 = (1.0 - e * (1.0 + z)) / (lambda * z);
    }
}

inline StepWeights step_weights(double lambda, double h, const OseenQuadrature& quad) {
    StepWeights w;
    const int s_count = quad.substeps;
    const double hs = h / s_count;
    double m0 = 0.0, m1 = 0.0;
    kernel_moments(lambda, hs, m0, m1);
    // Sub-interval s covers [s hs, (s+1) hs]; its contribution is damped by the
    // remaining (S-1-s) sub-steps. Interpolation fractions are α_a = s/S, α_b = (s+1)/S.
    for (int s = 0; s < s_count; ++s) {
        const double damp = std::exp(-lambda * hs * (s_count - 1 - s));
        const double aa = static_cast<double>(s) / s_count;
        const double ab = static_cast<double>(s + 1) / s_count;
        double wa, wb;
        if (quad.order == 2) {
            wa = m1;
            wb = m0 - m1;
        } else {
            wa = m0;
            wb = 0.0;
        }
        w.left += damp * (wa * (1.0 - aa) + wb * (1.0 - ab));
        w.right += damp * (wa * aa + wb * ab);
    }
    w.decay = std::exp(-lambda * h);
    return w;
}

}  // namespace detail

/// Duhamel integral of a forcing trace G (already projected, d components):
/// returns L(t_m) = -∫_{t_start}^{t_m} e^{(t_m - s)Δ} G(s) ds for every sample
/// m >= start, with t_start = t_{start}. The first output sample is zero.
inline TimeTrace duhamel_integrate(const TimeTrace& forcing, const OseenQuadrature& quad, std::size_t start = 0) {
    quad.validate();
    if (start >= forcing.size()) throw std::invalid_argument("duhamel_integrate: start index outside trace");
    const TorusGrid& g = forcing.grid();
    const int nc = forcing.field(start).components();
    const std::size_t modes = g.size();
    std::vector<double> lambda(modes);
    for (std::size_t flat = 0; flat < modes; ++flat) lambda[flat] = g.k_squared(flat);

    TimeTrace out(g);
    FourierField acc(g, nc);
    out.push_back(forcing.time(start), acc);
    std::vector<detail::StepWeights> w(modes);
    double last_h = -1.0;
    for (std::size_t m = start; m + 1 < forcing.size(); ++m) {
        const double h = forcing.time(m + 1) - forcing.time(m);
        if (h != last_h) {
            for (std::size_t flat = 0; flat < modes; ++flat) w[flat] = detail::step_weights(lambda[flat], h, quad);
            last_h = h;
        }
        const FourierField& g0 = forcing.field(m);
        const FourierField& g1 = forcing.field(m + 1);
        for (int c = 0; c < nc; ++c) {
            auto a = acc.component(c);
            const auto l = g0.component(c);
            const auto r = g1.component(c);
            for (std::size_t flat = 0; flat < modes; ++flat) {
                const auto& wf = w[flat];
                a[flat] = wf.decay * a[flat] + wf.left * l[flat] + wf.right * r[flat];
            }
        }
        FourierField sample = -1.0 * acc;
        sample.set_divergence_free(g1.divergence_free() && g0.divergence_free());
        out.push_back(forcing.time(m + 1), std::move(sample));
    }
    return out;
}

/// ℙ∇·M(t) for every tensor sample of a trace.
inline TimeTrace projected_divergence_trace(const TimeTrace& tensors) {
    std::vector<FourierField> fields(tensors.size(), FourierField(tensors.grid(), tensors.grid().dim()));
    parallel_for(tensors.size(), [&](std::size_t i) { fields[i] = projected_divergence(tensors.field(i)); });
    return TimeTrace(tensors.grid(), tensors.times(), std::move(fields));
}

/// The Oseen operator -∫_0^t e^{(t-s)Δ} ℙ∇·F(s) ds at one instant t of a tensor
/// trace F, with F interpolated linearly inside the last partial interval.
inline FourierField oseen_apply(const TimeTrace& tensors, double t, const OseenQuadrature& quad) {
    quad.validate();
    if (tensors.size() < 2) throw std::invalid_argument("oseen_apply: trace needs at least two samples");
    if (t < tensors.start() || t > tensors.end()) {
        throw std::out_of_range("oseen_apply: t = " + std::to_string(t) + " outside trace span [" +
                                std::to_string(tensors.start()) + ", " + std::to_string(tensors.end()) + "]");
    }
    // Samples strictly before t, plus an interpolated endpoint at t.
    std::size_t k = 0;
    while (k + 1 < tensors.size() && tensors.time(k + 1) <= t) ++k;
    TimeTrace forcing(tensors.grid());
    for (std::size_t i = 0; i <= k; ++i) forcing.push_back(tensors.time(i), projected_divergence(tensors.field(i)));
    if (t > tensors.time(k)) {
        const double frac = (t - tensors.time(k)) / (tensors.time(k + 1) - tensors.time(k));
        FourierField gk = forcing.field(k);
        FourierField gk1 = projected_divergence(tensors.field(k + 1));
        FourierField end = (1.0 - frac) * gk + frac * gk1;
        forcing.push_back(t, std::move(end));
    }
    if (forcing.size() == 1) return FourierField(tensors.grid(), tensors.grid().dim());
    const auto integ = duhamel_integrate(forcing, quad);
    return integ.field(integ.size() - 1);
}

/// Oseen operator applied at every sample of a tensor trace.
inline TimeTrace oseen_trace(const TimeTrace& tensors, const OseenQuadrature& quad) {
    return duhamel_integrate(projected_divergence_trace(tensors), quad);
}

}  // namespace besov_ns
