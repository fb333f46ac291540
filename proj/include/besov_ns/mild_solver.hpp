#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "besov_ns/norms.hpp"
#include "besov_ns/oseen.hpp"

namespace besov_ns {

/// Configuration of a mild-solution run on [0, T].
struct SolverConfig {
    TorusGrid grid{2, 64};
    double T = 1.0;
    double dt = 1e-3;
    int n_picard = 8;
    ProductMode dealias = ProductMode::Padded;
    double tol_fixpoint = 1e-10;
    OseenQuadrature quad{};
    bool nonlinear = true;
    int geometric_samples = 16;
    double geometric_decades = 8.0;  // first geometric sample at dt·2^{-geometric_decades}
    double blowup_threshold = 1e8;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
        if (!(T > 0.0)) throw std::invalid_argument("SolverConfig: T must be > 0");
        if (n_picard < 1) throw std::invalid_argument("SolverConfig: n_picard must be >= 1");
        if (geometric_samples < 0) throw std::invalid_argument("SolverConfig: geometric_samples must be >= 0");
        if (!(tol_fixpoint >= 0.0)) throw std::invalid_argument("SolverConfig: tol_fixpoint must be >= 0");
        quad.validate();
    }

    /// 0, then geometric samples from dt·2^{-decades} up to dt, then uniform steps dt, ending exactly at T.
    std::vector<double> time_grid() const {
        validate();
        std::vector<double> t{0.0};
        const double tiny = T * 1e-12;
        auto add = [&](double x) {
            if (x < T - tiny && x > t.back()) t.push_back(x);
        };
        const int g = geometric_samples;
        for (int i = 0; i < g; ++i) {
            const double e = g == 1 ? 0.0 : -geometric_decades * (g - 1 - i) / (g - 1);
            add(dt * std::exp2(e));
        }
        for (long k = 2;; ++k) {
            const double x = dt * static_cast<double>(k);
            if (x >= T - tiny) break;
            add(x);
        }
        t.push_back(T);
        return t;
    }
};

/// Thrown when a mode becomes non-finite or ‖u(t)‖_∞ exceeds the threshold.
class BlowupSuspected : public std::runtime_error {
public:
    BlowupSuspected(double last_valid, TimeTrace partial, int iteration)
        : std::runtime_error("blow-up suspected after t = " + std::to_string(last_valid) + " (Picard iteration " +
                             std::to_string(iteration) + ")"),
          last_valid_time_(last_valid),
          partial_(std::move(partial)),
          iteration_(iteration) {}

    double last_valid_time() const { return last_valid_time_; }
    const TimeTrace& partial_trace() const { return partial_; }
    int iteration() const { return iteration_; }

private:
    double last_valid_time_;
    TimeTrace partial_;
    int iteration_;
};

namespace detail {

struct Forcing {
    TimeTrace trace;
    std::size_t first_bad = std::numeric_limits<std::size_t>::max();
};

/// ℙ∇·(u ⊗ v) at every sample; records the first sample whose physical values
/// are non-finite or exceed `threshold` in pointwise Euclidean norm.
inline Forcing nonlinear_forcing(const TimeTrace& u, const TimeTrace& v, ProductMode mode, double threshold) {
    if (u.size() != v.size()) throw std::invalid_argument("bilinear_B: sample count mismatch");
    const TorusGrid& g = u.grid();
    if (!(g == v.grid())) throw std::invalid_argument("bilinear_B: grid mismatch");
    const int d = g.dim();
    const int side = product_side(g, mode);
    std::vector<FourierField> out(u.size(), FourierField(g, d));
    std::vector<char> bad(u.size(), 0);
    parallel_for(u.size(), [&](std::size_t i) {
        if (u.time(i) != v.time(i)) throw std::invalid_argument("bilinear_B: time grids differ");
        const auto pu = to_physical(u.field(i), side);
        const bool same = &u == &v;
        const auto pv = same ? std::vector<double>() : to_physical(v.field(i), side);
        const auto& pvr = same ? pu : pv;
        const std::size_t npts = pu.size() / static_cast<std::size_t>(d);
        for (std::size_t p = 0; p < npts && !bad[i]; ++p) {
            double m2 = 0.0;
            for (int c = 0; c < d; ++c) m2 += pu[c * npts + p] * pu[c * npts + p];
            if (!std::isfinite(m2) || m2 > threshold * threshold) bad[i] = 1;
        }
        if (bad[i]) return;
        std::vector<double> prod(static_cast<std::size_t>(d * d) * npts);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const double* x = pu.data() + a * npts;
                const double* y = pvr.data() + b * npts;
                double* o = prod.data() + static_cast<std::size_t>(a * d + b) * npts;
                for (std::size_t p = 0; p < npts; ++p) o[p] = x[p] * y[p];
            }
        }
        out[i] = projected_divergence(from_physical(g, prod, d * d, side));
    });
    Forcing f{TimeTrace(g, u.times(), std::move(out))};
    for (std::size_t i = 0; i < bad.size(); ++i) {
        if (bad[i]) {
            f.first_bad = i;
            break;
        }
    }
    return f;
}

inline TimeTrace heat_trace(const FourierField& u0, const std::vector<double>& times, double t0 = 0.0) {
    std::vector<FourierField> fields(times.size(), FourierField(u0.grid(), u0.components()));
    parallel_for(times.size(), [&](std::size_t i) { fields[i] = heat_semigroup(u0, times[i] - t0); });
    return TimeTrace(u0.grid(), times, std::move(fields));
}

inline double sup_l2_distance(const TimeTrace& a, const TimeTrace& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, l2_norm(a.field(i) - b.field(i)));
    return m;
}

}  // namespace detail

/// B(u, v)(t) = -∫_0^t e^{(t-s)Δ} ℙ∇·(u ⊗ v)(s) ds at every sample.
inline TimeTrace bilinear_B(const TimeTrace& u, const TimeTrace& v, const OseenQuadrature& quad,
                            ProductMode mode = ProductMode::Padded) {
    auto f = detail::nonlinear_forcing(u, v, mode, kInf);
    return duhamel_integrate(f.trace, quad);
}

struct RestartReport {
    double residual = 0.0;
    std::vector<double> per_sample;  // relative residual at samples after t0
};

/// max over samples t > t_{t0_index} of ‖u(t) - e^{(t-t0)Δ}u(t0) - B_{t0}(u,u)(t)‖₂ / ‖u(t)‖₂,
/// with B_{t0} the Duhamel integral started at t0.
inline RestartReport restart_check(const TimeTrace& u, std::size_t t0_index, const OseenQuadrature& quad,
                                   ProductMode mode = ProductMode::Padded, bool nonlinear = true) {
    if (t0_index >= u.size()) throw std::invalid_argument("restart_check: t0 index outside trace");
    RestartReport rep;
    const double t0 = u.time(t0_index);
    std::vector<double> times(u.times().begin() + static_cast<std::ptrdiff_t>(t0_index), u.times().end());
    const TimeTrace lin = detail::heat_trace(u.field(t0_index), times, t0);
    TimeTrace duh(u.grid());
    if (nonlinear) {
        const auto f = detail::nonlinear_forcing(u, u, mode, kInf);
        duh = duhamel_integrate(f.trace, quad, t0_index);
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        const FourierField& ui = u.field(t0_index + i);
        FourierField diff = ui - lin.field(i);
        if (nonlinear) diff -= duh.field(i);
        const double num = l2_norm(diff);
        const double den = l2_norm(ui);
        const double r = den > 0.0 ? num / den : num;
        rep.per_sample.push_back(r);
        rep.residual = std::max(rep.residual, r);
    }
    return rep;
}

struct PicardDiagnostics {
    std::vector<double> sigma;               // σ_n = sup_t ‖u_(n+1) - u_(n)‖₂
    std::vector<double> contraction_ratio;   // σ_{n+1}/σ_n
    bool non_contraction = false;
    int iterations = 0;
    bool early_stop = false;
    double fixed_point_residual = 0.0;
    std::vector<std::string> warnings;
};

struct PicardResult {
    TimeTrace solution;
    PicardDiagnostics diagnostics;
};

/// Picard sequence u_(0) = e^{tΔ}u0, u_(n+1) = e^{tΔ}u0 + B(u_(n), u_(n)) on the
/// configured time grid. Stops after n_picard iterations or once σ_n < tol_fixpoint.
inline PicardResult picard_solve(const FourierField& u0_in, const SolverConfig& cfg) {
    cfg.validate();
    if (!(u0_in.grid() == cfg.grid)) throw std::invalid_argument("picard_solve: initial field grid differs from config grid");
    if (u0_in.components() != cfg.grid.dim()) throw std::invalid_argument("picard_solve: initial field must have d components");
    PicardDiagnostics diag;
    FourierField u0 = u0_in;
    if (!all_finite(u0)) throw BlowupSuspected(0.0, TimeTrace(cfg.grid), 0);
    if (divergence_defect(u0) > 1e-12) {
        diag.warnings.push_back("initial field was not divergence-free; projected with leray_project");
        u0 = leray_project(u0);
    }
    u0.set_divergence_free(true);

    const auto times = cfg.time_grid();
    const TimeTrace heat = detail::heat_trace(u0, times);
    TimeTrace current = heat;

    auto forcing_or_throw = [&](const TimeTrace& u, int iteration) {
        auto f = detail::nonlinear_forcing(u, u, cfg.dealias, cfg.blowup_threshold);
        if (f.first_bad != std::numeric_limits<std::size_t>::max()) {
            const double last = f.first_bad == 0 ? 0.0 : u.time(f.first_bad - 1);
            throw BlowupSuspected(last, u.prefix(f.first_bad), iteration);
        }
        return std::move(f.trace);
    };

    for (int n = 0; n < cfg.n_picard; ++n) {
        TimeTrace next(cfg.grid);
        if (cfg.nonlinear) {
            const TimeTrace b = duhamel_integrate(forcing_or_throw(current, n), cfg.quad);
            for (std::size_t i = 0; i < times.size(); ++i) {
                FourierField s = heat.field(i) + b.field(i);
                if (!all_finite(s)) {
                    throw BlowupSuspected(i == 0 ? 0.0 : times[i - 1], next, n + 1);
                }
                s.set_divergence_free(true);
                next.push_back(times[i], std::move(s));
            }
        } else {
            next = heat;
        }
        const double sigma = detail::sup_l2_distance(next, current);
        if (!diag.sigma.empty() && diag.sigma.back() > 0.0) {
            const double ratio = sigma / diag.sigma.back();
            diag.contraction_ratio.push_back(ratio);
            if (ratio >= 1.0) diag.non_contraction = true;
        }
        diag.sigma.push_back(sigma);
        current = std::move(next);
        diag.iterations = n + 1;
        if (sigma < cfg.tol_fixpoint) {
            diag.early_stop = n + 1 < cfg.n_picard;
            break;
        }
    }
    if (diag.non_contraction) diag.warnings.push_back("successive Picard distances did not contract");
    if (cfg.nonlinear) forcing_or_throw(current, diag.iterations);
    diag.fixed_point_residual = restart_check(current, 0, cfg.quad, cfg.dealias, cfg.nonlinear).residual;
    return {std::move(current), std::move(diag)};
}

}  // namespace besov_ns
