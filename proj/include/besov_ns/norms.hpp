#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/littlewood_paley.hpp"
#include "besov_ns/spectral_ops.hpp"
#include "besov_ns/time_trace.hpp"

namespace besov_ns {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Regularity s and integrability q of B_q^{s,∞}.
struct BesovIndex {
    double s = 0.0;
    double q = kInf;

    BesovIndex() = default;
    BesovIndex(double reg, double integ) : s(reg), q(integ) {
        if (!(integ >= 1.0)) throw std::invalid_argument("BesovIndex: q must be >= 1");
    }
};

/// Time integrability p over [0, T] on top of a Besov index.
struct CheminLernerIndex {
    double p = kInf;
    BesovIndex besov;
    double T = 1.0;

    CheminLernerIndex() = default;
    CheminLernerIndex(double time_p, BesovIndex b, double horizon) : p(time_p), besov(b), T(horizon) {
        if (!(time_p >= 1.0)) throw std::invalid_argument("CheminLernerIndex: p must be >= 1");
        if (!(horizon > 0.0)) throw std::invalid_argument("CheminLernerIndex: T must be > 0");
    }
};

namespace detail {

inline void check_q(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lp_norm: q must be in [1, inf], got " + std::to_string(q));
}

/// Lebesgue norm of physical samples (component-major, Euclidean pointwise norm).
inline double lp_from_samples(const std::vector<double>& vals, int components, const TorusGrid& g, double q) {
    const std::size_t npts = vals.size() / static_cast<std::size_t>(components);
    double acc = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        double m2 = 0.0;
        for (int c = 0; c < components; ++c) {
            const double v = vals[static_cast<std::size_t>(c) * npts + i];
            m2 += v * v;
        }
        const double m = std::sqrt(m2);
        if (std::isinf(q)) {
            acc = std::max(acc, m);
        } else if (q == 2.0) {
            acc += m2;
        } else {
            acc += std::pow(m, q);
        }
    }
    if (std::isinf(q)) return acc;
    const double w = std::pow(g.spacing(), g.dim());
    return std::pow(w * acc, 1.0 / q);
}

/// ∫ of the piecewise-linear interpolant of (times, vals) over [a, b] ⊂ [t_0, t_M].
inline double integrate_linear(const std::vector<double>& times, const std::vector<double>& vals, double a, double b) {
    if (times.size() < 2 || b <= a) return 0.0;
    a = std::max(a, times.front());
    b = std::min(b, times.back());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double t0 = times[i], t1 = times[i + 1];
        const double lo = std::max(a, t0), hi = std::min(b, t1);
        if (hi <= lo) continue;
        const double slope = (vals[i + 1] - vals[i]) / (t1 - t0);
        const double vlo = vals[i] + slope * (lo - t0);
        const double vhi = vals[i] + slope * (hi - t0);
        total += 0.5 * (vlo + vhi) * (hi - lo);
    }
    return total;
}

}  // namespace detail

/// ((2π/N)^d Σ_x |f(x)|^q)^{1/q} over the physical grid; max for q = ∞.
inline double lp_norm(const FourierField& f, double q) {
    detail::check_q(q);
    return detail::lp_from_samples(to_physical(f), f.components(), f.grid(), q);
}

/// ‖Δ_j f‖_q for j = -1..J_max (index j+1).
inline std::vector<double> block_lp_norms(const FourierField& f, double q, const DyadicFamily& fam) {
    detail::check_q(q);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(fam.jmax() + 2));
    for (int j = -1; j <= fam.jmax(); ++j) out.push_back(lp_norm(block(f, j, fam), q));
    return out;
}

/// max over blocks of 2^{sj}·(block norm), the finite-lattice sup.
inline double besov_from_blocks(const std::vector<double>& block_norms, double s) {
    double m = 0.0;
    for (std::size_t i = 0; i < block_norms.size(); ++i) {
        const int j = static_cast<int>(i) - 1;
        m = std::max(m, std::exp2(s * j) * block_norms[i]);
    }
    return m;
}

/// max_{j ∈ {-1..J_max}} 2^{sj} ‖Δ_j f‖_q.
inline double besov_norm(const FourierField& f, const BesovIndex& idx, const DyadicFamily& fam) {
    return besov_from_blocks(block_lp_norms(f, idx.q, fam), idx.s);
}

/// max_j 2^{sj} (∫_0^T ‖Δ_j u(t)‖_q^p dt)^{1/p}, trapezoid in t on the samples
/// (integrand linearly interpolated at T); p = ∞ takes the sup over samples in [0, T].
inline double chemin_lerner_norm(const TimeTrace& u, const CheminLernerIndex& idx, const DyadicFamily& fam) {
    if (u.empty()) throw std::invalid_argument("chemin_lerner_norm: empty trace");
    const int nb = fam.jmax() + 2;
    std::vector<std::vector<double>> per_block(static_cast<std::size_t>(nb));
    std::vector<double> times;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0 && u.time(i - 1) >= idx.T) break;
        times.push_back(u.time(i));
        const auto norms = block_lp_norms(u.field(i), idx.besov.q, fam);
        for (int b = 0; b < nb; ++b) per_block[static_cast<std::size_t>(b)].push_back(norms[static_cast<std::size_t>(b)]);
    }
    const double t_lo = u.start();
    double result = 0.0;
    for (int b = 0; b < nb; ++b) {
        const auto& vals = per_block[static_cast<std::size_t>(b)];
        double tn;
        if (std::isinf(idx.p)) {
            tn = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) {
                if (times[i] <= idx.T * (1.0 + 1e-12)) tn = std::max(tn, vals[i]);
            }
        } else if (times.size() < 2) {
            throw std::invalid_argument("chemin_lerner_norm: finite p needs at least two samples");
        } else {
            std::vector<double> powered(vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i) powered[i] = std::pow(vals[i], idx.p);
            tn = std::pow(detail::integrate_linear(times, powered, t_lo, idx.T), 1.0 / idx.p);
        }
        result = std::max(result, std::exp2(idx.besov.s * (b - 1)) * tn);
    }
    return result;
}

/// max over samples t > 0 of t^{μ/2} ‖u(t)‖_∞.
inline double weighted_sup_norm(const TimeTrace& u, double mu) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double t = u.time(i);
        if (t <= 0.0) continue;
        m = std::max(m, std::pow(t, mu / 2.0) * lp_norm(u.field(i), kInf));
    }
    return m;
}

/// The θ-grid used by heat_characterization_norm: 32 geometric points from δ·2^{-20} to δ.
inline std::vector<double> heat_theta_grid(double delta) {
    constexpr int kPoints = 32;
    std::vector<double> th(kPoints);
    for (int i = 0; i < kPoints; ++i) th[static_cast<std::size_t>(i)] = delta * std::exp2(-20.0 * (kPoints - 1 - i) / (kPoints - 1));
    th.back() = delta;
    return th;
}

/// max over the θ-grid of θ^{s/2} ‖e^{θΔ} f‖_q; equivalent to the B_q^{-s,∞} norm for s > 0.
inline double heat_characterization_norm(const FourierField& f, double s, double q, double delta) {
    if (!(s > 0.0)) throw std::invalid_argument("heat_characterization_norm: s must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("heat_characterization_norm: delta must be > 0");
    double m = 0.0;
    for (double th : heat_theta_grid(delta)) m = std::max(m, std::pow(th, s / 2.0) * lp_norm(heat_semigroup(f, th), q));
    return m;
}

/// Nonhomogeneous H^α norm ((2π)^d Σ_k (1+|k|²)^α |f̂(k)|²)^{1/2}; α = 0 gives the L² norm.
inline double sobolev_h_norm(const FourierField& f, double alpha) {
    const TorusGrid& g = f.grid();
    double s = 0.0;
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        double e = 0.0;
        for (int c = 0; c < f.components(); ++c) e += std::norm(f(c, flat));
        if (e == 0.0) continue;
        s += std::pow(1.0 + g.k_squared(flat), alpha) * e;
    }
    return std::sqrt(g.volume() * s);
}

/// Left side, right-side factors and their ratio for an inequality check.
struct RatioReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double exponent_q = 0.0;  // Lebesgue exponent of the left side where relevant
    std::vector<double> factors;
};

inline double safe_ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
    return num / den;
}

/// Lebesgue exponent of the precise Sobolev inequality with p = 2: 1/q = (1 - α/β)/2.
inline double gmo_exponent(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < beta)) throw std::invalid_argument("check_gmo: requires 0 < alpha < beta");
    return 2.0 / (1.0 - alpha / beta);
}

/// ‖f‖_q against ‖f‖_{H^α}^{1-α/β} ‖f‖_{B_∞^{α-β,∞}}^{α/β}.
inline RatioReport check_gmo(const FourierField& f, double alpha, double beta, const DyadicFamily& fam) {
    const double q = gmo_exponent(alpha, beta);
    RatioReport r;
    r.exponent_q = q;
    const double h = sobolev_h_norm(f, alpha);
    const double b = besov_norm(f, BesovIndex(alpha - beta, kInf), fam);
    r.factors = {h, b};
    r.lhs = lp_norm(f, q);
    r.rhs = std::pow(h, 1.0 - alpha / beta) * std::pow(b, alpha / beta);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    return r;
}

/// ‖f‖_∞ against ‖f‖_{B_∞^{-r,∞}}^{σ/(r+σ)} ‖f‖_{B_∞^{σ,∞}}^{r/(r+σ)}.
inline RatioReport check_interpolation(const FourierField& f, double r, double sigma, const DyadicFamily& fam) {
    if (!(r > 0.0 && sigma > 0.0)) throw std::invalid_argument("check_interpolation: requires r > 0 and sigma > 0");
    const auto norms = block_lp_norms(f, kInf, fam);
    const double low = besov_from_blocks(norms, -r);
    const double high = besov_from_blocks(norms, sigma);
    RatioReport rep;
    rep.exponent_q = kInf;
    rep.factors = {low, high};
    rep.lhs = lp_norm(f, kInf);
    rep.rhs = std::pow(low, sigma / (r + sigma)) * std::pow(high, r / (r + sigma));
    rep.ratio = safe_ratio(rep.lhs, rep.rhs);
    return rep;
}

/// Besov norm of every sample of a trace.
inline std::vector<double> besov_series(const TimeTrace& u, const BesovIndex& idx, const DyadicFamily& fam) {
    std::vector<double> out;
    out.reserve(u.size());
    for (const auto& f : u.fields()) out.push_back(besov_norm(f, idx, fam));
    return out;
}

}  // namespace besov_ns
