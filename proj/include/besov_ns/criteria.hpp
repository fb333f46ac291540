#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/initial_fields.hpp"
#include "besov_ns/mild_solver.hpp"
#include "besov_ns/report.hpp"

namespace besov_ns {

/// Exponents and thresholds shared by the criteria experiments.
struct CriterionParams {
    double r = 0.5;
    double sigma = 0.75;
    std::vector<double> delta_list{0.1, 0.05, 0.025};
    double epsilon_guess = 0.0;  // 0 means "use the frozen constant"

    void validate() const {
        if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("CriterionParams: r must lie in (0, 1]");
        if (!(sigma > r && sigma < 1.0)) throw std::invalid_argument("CriterionParams: sigma must lie in (r, 1)");
        for (double d : delta_list) {
            if (!(d > 0.0)) throw std::invalid_argument("CriterionParams: window sizes must be > 0");
        }
        if (!(epsilon_guess >= 0.0)) throw std::invalid_argument("CriterionParams: epsilon_guess must be >= 0");
    }

    /// Time exponent 2/(1-r); infinite at r = 1.
    double time_exponent() const { return r < 1.0 ? 2.0 / (1.0 - r) : kInf; }
};

namespace detail {

inline double time_exponent(double r) { return r < 1.0 ? 2.0 / (1.0 - r) : kInf; }

/// Least-squares slope of log y against log x over entries with x, y > 0.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0) || !std::isfinite(y[i])) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

/// Value at time x of the running integral of the piecewise-linear interpolant.
inline double cumulative_at(const std::vector<double>& t, const std::vector<double>& v, const std::vector<double>& cum,
                            double x) {
    if (x <= t.front()) return 0.0;
    if (x >= t.back()) return cum.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = x - t[i];
    const double slope = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    return cum[i] + h * (v[i] + 0.5 * slope * h);
}

}  // namespace detail

/// Θ(δ) from a precomputed series b(t) = ‖u(t)‖_{B^{-r,∞}_∞}: max over samples
/// t0 < T/2 of (∫_{t0}^{t0+δ} b^{2/(1-r)} dt)^{(1-r)/2}, trapezoid in t.
inline double theta_window(const std::vector<double>& times, const std::vector<double>& besov_values, double r,
                           double delta) {
    if (times.size() != besov_values.size()) throw std::invalid_argument("theta_window: length mismatch");
    if (times.size() < 2) throw std::invalid_argument("theta_window: needs at least two samples");
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("theta_window: r must lie in (0, 1]");
    if (!(delta > 0.0)) throw std::invalid_argument("theta_window: delta must be > 0");
    const double T = times.back();
    if (delta > 0.5 * T * (1.0 + 1e-12)) throw std::invalid_argument("theta_window: delta exceeds T/2");
    const double p = detail::time_exponent(r);
    double best = 0.0;
    if (std::isinf(p)) {
        for (std::size_t i = 0; i < times.size() && times[i] < 0.5 * T; ++i) {
            for (std::size_t k = i; k < times.size() && times[k] <= times[i] + delta; ++k) best = std::max(best, besov_values[k]);
        }
        return best;
    }
    std::vector<double> powered(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) powered[i] = std::pow(besov_values[i], p);
    std::vector<double> cum(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
        cum[i] = cum[i - 1] + 0.5 * (powered[i] + powered[i - 1]) * (times[i] - times[i - 1]);
    }
    for (std::size_t i = 0; i < times.size() && times[i] < 0.5 * T; ++i) {
        const double integral = detail::cumulative_at(times, powered, cum, times[i] + delta) - cum[i];
        best = std::max(best, integral);
    }
    return std::pow(std::max(best, 0.0), 1.0 / p);
}

inline double theta_window(const TimeTrace& u, double r, double delta, const DyadicFamily& fam) {
    return theta_window(u.times(), besov_series(u, BesovIndex(-r, kInf), fam), r, delta);
}

/// h(μ, δ) from a precomputed series b(t) = ‖u(t)‖_{B^{μ,∞}_∞}: max over samples
/// 0 < t ≤ δ of t^{(μ+1)/2} b(t).
inline double h_metric(const std::vector<double>& times, const std::vector<double>& besov_values, double mu,
                       double delta) {
    if (times.size() != besov_values.size()) throw std::invalid_argument("h_metric: length mismatch");
    if (times.empty()) throw std::invalid_argument("h_metric: empty series");
    if (!(delta > 0.0) || delta > times.back() * (1.0 + 1e-12)) {
        throw std::invalid_argument("h_metric: delta outside the sampled span");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t <= 0.0) continue;
        if (t > delta * (1.0 + 1e-12)) break;
        m = std::max(m, std::pow(t, 0.5 * (mu + 1.0)) * besov_values[i]);
    }
    return m;
}

inline double h_metric(const TimeTrace& u, double mu, double delta, const DyadicFamily& fam) {
    const TimeTrace w = u.up_to(delta);
    return h_metric(w.times(), besov_series(w, BesovIndex(mu, kInf), fam), mu, delta);
}

/// √t ‖u(t)‖_∞ near t = 0, averaged per decade of t anchored at the smallest
/// positive sample. The verdict asks the averages over the (up to three)
/// decades nearest 0 to fall strictly as t decreases, and the fitted
/// small-t slope to be positive.
inline ExperimentReport regularity_monitor(const std::vector<double>& times, const std::vector<double>& sup_norms) {
    if (times.size() != sup_norms.size()) throw std::invalid_argument("regularity_monitor: length mismatch");
    std::vector<double> t, v;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] <= 0.0) continue;
        t.push_back(times[i]);
        v.push_back(std::sqrt(times[i]) * sup_norms[i]);
    }
    if (t.size() < 2) throw std::invalid_argument("regularity_monitor: needs positive sample times");
    const double tmin = t.front();
    const int available = static_cast<int>(std::floor(std::log10(t.back() / tmin) + 1e-12));
    const int decades = std::min(3, available);
    if (decades < 2) {
        throw std::invalid_argument("regularity_monitor: trace resolves fewer than two decades of t near 0");
    }
    std::vector<double> avg(static_cast<std::size_t>(decades), 0.0), mid(static_cast<std::size_t>(decades), 0.0);
    std::vector<double> fit_t, fit_v;
    for (int k = 0; k < decades; ++k) {
        const double lo = tmin * std::pow(10.0, k), hi = tmin * std::pow(10.0, k + 1);
        double s = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= lo * (1.0 - 1e-12) && t[i] < hi * (1.0 - 1e-12)) {
                s += v[i];
                ++n;
                fit_t.push_back(t[i]);
                fit_v.push_back(v[i]);
            }
        }
        if (n == 0) throw std::invalid_argument("regularity_monitor: decade " + std::to_string(k) + " has no samples");
        avg[static_cast<std::size_t>(k)] = s / n;
        mid[static_cast<std::size_t>(k)] = std::sqrt(lo * hi);
    }
    constexpr double kMargin = 1e-6;
    bool decreasing = true;
    for (int k = 0; k + 1 < decades; ++k) {
        if (!(avg[static_cast<std::size_t>(k)] < (1.0 - kMargin) * avg[static_cast<std::size_t>(k + 1)])) decreasing = false;
    }
    const double slope = detail::log_log_slope(fit_t, fit_v);

    ExperimentReport rep("regularity");
    rep.add_series("sqrt_t_sup_norm", t, v);
    rep.add_series("decade_average", mid, avg);
    rep.add_scalar("decades_used", decades);
    rep.add_scalar("small_t_slope", slope);
    rep.add_scalar("smallest_decade_average", avg.front());
    rep.add_verdict("decays_toward_zero", decreasing && slope > 0.0, {"decade_average", "small_t_slope"});
    return rep;
}

inline ExperimentReport regularity_monitor(const TimeTrace& u) {
    std::vector<double> sup(u.size());
    parallel_for(u.size(), [&](std::size_t i) { sup[i] = lp_norm(u.field(i), kInf); });
    return regularity_monitor(u.times(), sup);
}

/// Blow-up lower-bound functional on a norm series b(t) = ‖u(t)‖_{B^{-r,∞}_∞}
/// sampled at t < T*. A run is flagged when the liminf of (T*-t)^{(1-r)/2} b
/// over the last decade before T* reaches ε and the series is not decaying
/// (log-log slope in T*-t at most (1-r)/4).
inline ExperimentReport blowup_tracker(const std::vector<double>& times, const std::vector<double>& besov_values,
                                       double t_star, double r, double epsilon) {
    if (times.size() != besov_values.size()) throw std::invalid_argument("blowup_tracker: length mismatch");
    if (times.size() < 8) throw std::invalid_argument("blowup_tracker: trace shorter than 8 samples");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("blowup_tracker: r must lie in (0, 1)");
    const double w = 0.5 * (1.0 - r);
    std::vector<double> t, s, gap;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] < t_star)) continue;
        t.push_back(times[i]);
        gap.push_back(t_star - times[i]);
        s.push_back(std::pow(t_star - times[i], w) * besov_values[i]);
    }
    if (t.size() < 2) throw std::invalid_argument("blowup_tracker: fewer than two samples before T*");
    const double dmin = *std::min_element(gap.begin(), gap.end());
    std::vector<double> tail_gap, tail_val;
    double liminf = kInf;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (gap[i] <= 10.0 * dmin * (1.0 + 1e-12)) {
            liminf = std::min(liminf, s[i]);
            tail_gap.push_back(gap[i]);
            tail_val.push_back(s[i]);
        }
    }
    if (tail_gap.size() < 3) {
        tail_gap.assign(gap.end() - 3, gap.end());
        tail_val.assign(s.end() - 3, s.end());
    }
    const double slope = detail::log_log_slope(tail_gap, tail_val);
    const bool decaying = std::isnan(slope) ? liminf == 0.0 : slope > 0.5 * w;

    // ∫_{T*/2}^{T*} b^{2/(1-r)} dt over the samples in the window
    const double p = 2.0 / (1.0 - r);
    std::vector<double> wt, wv;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= 0.5 * t_star && times[i] <= t_star && std::isfinite(besov_values[i])) {
            wt.push_back(times[i]);
            wv.push_back(std::pow(besov_values[i], p));
        }
    }
    const double tail_integral = wt.size() >= 2 ? detail::integrate_linear(wt, wv, wt.front(), wt.back()) : 0.0;

    const bool flagged = liminf >= epsilon && !decaying;
    ExperimentReport rep("blowup");
    rep.add_series("weighted_critical_norm", t, s);
    rep.add_series("besov_minus_r_norm", times, besov_values);
    rep.add_scalar("t_star", t_star);
    rep.add_scalar("liminf_last_decade", liminf);
    rep.add_scalar("decay_exponent", slope);
    rep.add_scalar("epsilon", epsilon);
    rep.add_scalar("tail_integral", tail_integral);
    rep.add_verdict("series_tends_to_zero", decaying, {"weighted_critical_norm", "decay_exponent"});
    rep.add_verdict("no_blowup_flag", !flagged, {"liminf_last_decade", "epsilon", "decay_exponent"});
    return rep;
}

inline ExperimentReport blowup_tracker(const TimeTrace& u, double r, double epsilon, const DyadicFamily& fam) {
    if (u.size() < 8) throw std::invalid_argument("blowup_tracker: trace shorter than 8 samples");
    std::vector<double> b(u.size());
    parallel_for(u.size(), [&](std::size_t i) { b[i] = besov_norm(u.field(i), BesovIndex(-r, kInf), fam); });
    return blowup_tracker(u.times(), b, u.end(), r, epsilon);
}

/// Outcome of the scalar bootstrap lemma on a sampled series.
struct BootstrapResult {
    bool hypotheses_met = false;
    std::optional<bool> verdict;  // set only when the hypotheses hold
    std::optional<std::size_t> first_violation;
    std::string reason;
    double lower_root = 0.0;  // (1 - √(1-4AB)) / (2B)
    double upper_root = 0.0;  // (1 + √(1-4AB)) / (2B)
};

/// Gate: A, B > 0, 4AB < 1, f(0) ≤ 2A, f ≤ A + B f² at every sample (to one
/// part in 1e12), and no pair of consecutive samples jumping across the
/// forbidden gap between the roots of B x² - x + A. Verdict: max f ≤ 2A.
inline BootstrapResult bootstrap_check(const std::vector<double>& f, double A, double B) {
    BootstrapResult res;
    if (f.empty()) throw std::invalid_argument("bootstrap_check: empty series");
    if (!(A > 0.0 && B > 0.0)) {
        res.reason = "A and B must be positive";
        return res;
    }
    if (!(4.0 * A * B < 1.0)) {
        res.reason = "4AB >= 1";
        return res;
    }
    const double disc = std::sqrt(1.0 - 4.0 * A * B);
    res.lower_root = 2.0 * A / (1.0 + disc);  // same root, no cancellation
    res.upper_root = (1.0 + disc) / (2.0 * B);
    if (!(f[0] <= 2.0 * A)) {
        res.reason = "f(0) > 2A";
        return res;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i]) || f[i] > (A + B * f[i] * f[i]) * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "f > A + B f^2 at sample " << i;
            res.reason = os.str();
            return res;
        }
        if (i > 0) {
            const double lo = std::min(f[i - 1], f[i]), hi = std::max(f[i - 1], f[i]);
            if (lo <= res.lower_root && hi >= res.upper_root) {
                std::ostringstream os;
                os << "samples " << i - 1 << " and " << i << " jump across the forbidden gap";
                res.reason = os.str();
                return res;
            }
        }
    }
    res.hypotheses_met = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] > 2.0 * A) {
            res.first_violation = i;
            break;
        }
    }
    res.verdict = !res.first_violation.has_value();
    return res;
}

/// sup over samples of ‖u(t)‖_{B^{-r,∞}_∞} against multiple × ‖u0‖_{B^{-r,∞}_∞}.
inline ExperimentReport persistence_check(const FourierField& u0, const SolverConfig& cfg, double r, double multiple) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("persistence_check: r must lie in (0, 1)");
    const auto res = picard_solve(u0, cfg);
    const DyadicFamily fam(cfg.grid);
    const auto& u = res.solution;
    std::vector<double> b(u.size());
    parallel_for(u.size(), [&](std::size_t i) { b[i] = besov_norm(u.field(i), BesovIndex(-r, kInf), fam); });
    const double data = b.front();
    const double sup = *std::max_element(b.begin(), b.end());
    ExperimentReport rep("persistence");
    rep.add_series("besov_minus_r_norm", u.times(), b);
    rep.add_scalar("data_norm", data);
    rep.add_scalar("sup_norm", sup);
    rep.add_scalar("ratio", safe_ratio(sup, data));
    rep.add_scalar("frozen_multiple", multiple);
    rep.add_verdict("bounded_by_data", sup <= multiple * data, {"sup_norm", "data_norm", "frozen_multiple"});
    return rep;
}

/// max of the two Chemin-Lerner norms defining 𝒵_δ:
/// L̃^{2/(1+r)}_δ B_q^{1+r,∞} and L̃^{2/(1-r)}_δ B_∞^{-r,∞}.
inline double z_delta_norm(const TimeTrace& u, double r, double q, double delta, const DyadicFamily& fam) {
    const double a = chemin_lerner_norm(u, CheminLernerIndex(2.0 / (1.0 + r), BesovIndex(1.0 + r, q), delta), fam);
    const double b = chemin_lerner_norm(u, CheminLernerIndex(detail::time_exponent(r), BesovIndex(-r, kInf), delta), fam);
    return std::max(a, b);
}

/// Two method variants solved from the same data at successive refinement
/// levels. Level ℓ uses dt/2^ℓ and n_picard·2^ℓ; variant B multiplies the
/// iteration count by picard_factor_b.
struct UniquenessConfig {
    SolverConfig base;
    int levels = 2;
    OseenQuadrature quad_a{2, 1};
    OseenQuadrature quad_b{2, 1};
    int picard_factor_b = 2;
    double z_q = 4.0;
    double required_reduction = 10.0;
    double roundoff_floor = 1e-12;  // differences below floor·‖u‖_𝒵 count as converged
    std::uint64_t probe_seed = 0;

    void validate() const {
        base.validate();
        quad_a.validate();
        quad_b.validate();
        if (levels < 2) throw std::invalid_argument("UniquenessConfig: needs at least two refinement levels");
        if (picard_factor_b < 1) throw std::invalid_argument("UniquenessConfig: picard_factor_b must be >= 1");
        if (!(z_q >= 1.0)) throw std::invalid_argument("UniquenessConfig: z_q must be >= 1");
    }

    SolverConfig variant(int level, bool second) const {
        SolverConfig c = base;
        c.dt = base.dt / std::exp2(level);
        c.n_picard = base.n_picard * (1 << level) * (second ? picard_factor_b : 1);
        c.quad = second ? quad_b : quad_a;
        c.tol_fixpoint = 0.0;
        return c;
    }
};

inline std::string delta_key(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

inline ExperimentReport uniqueness_experiment(const FourierField& u0, const UniquenessConfig& ucfg,
                                              const CriterionParams& params) {
    ucfg.validate();
    params.validate();
    if (params.delta_list.empty()) throw std::invalid_argument("uniqueness_experiment: empty delta_list");
    if (params.r >= 1.0) throw std::invalid_argument("uniqueness_experiment: requires r < 1");
    const DyadicFamily fam(ucfg.base.grid);
    auto deltas = params.delta_list;
    std::sort(deltas.begin(), deltas.end(), std::greater<>());
    if (deltas.front() > ucfg.base.T) throw std::invalid_argument("uniqueness_experiment: delta exceeds T");

    ExperimentReport rep("uniqueness");
    std::vector<std::vector<double>> diff(deltas.size()), size(deltas.size());
    std::vector<double> level_index;
    std::optional<PicardResult> coarse_a, coarse_b;
    for (int level = 0; level < ucfg.levels; ++level) {
        const SolverConfig ca = ucfg.variant(level, false), cb = ucfg.variant(level, true);
        auto fa = std::async(std::launch::async, [&] { return picard_solve(u0, ca); });
        auto fb = std::async(std::launch::async, [&] { return picard_solve(u0, cb); });
        std::optional<PicardResult> ra, rb;
        try {
            ra = fa.get();
            rb = fb.get();
        } catch (const BlowupSuspected& e) {
            rep.add_scalar("halted_at_level", level);
            rep.add_scalar("last_valid_time", e.last_valid_time());
            rep.add_verdict("solves_completed", false, {"halted_at_level"});
            return rep;
        }
        const TimeTrace w = trace_difference(ra->solution, rb->solution);
        level_index.push_back(level);
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            diff[k].push_back(z_delta_norm(w, params.r, ucfg.z_q, deltas[k], fam));
            size[k].push_back(z_delta_norm(ra->solution, params.r, ucfg.z_q, deltas[k], fam));
        }
        if (level == 0) {
            coarse_a = std::move(ra);
            coarse_b = std::move(rb);
        }
    }

    bool shrinks = true;
    double min_reduction = kInf, max_difference = 0.0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const std::string key = delta_key(deltas[k]);
        rep.add_series("z_difference_delta_" + key, level_index, diff[k]);
        rep.add_series("z_norm_delta_" + key, level_index, size[k]);
        for (std::size_t l = 0; l < diff[k].size(); ++l) max_difference = std::max(max_difference, diff[k][l]);
        for (std::size_t l = 0; l + 1 < diff[k].size(); ++l) {
            const double red = safe_ratio(diff[k][l], diff[k][l + 1]);
            min_reduction = std::min(min_reduction, red);
            const bool at_floor = diff[k][l + 1] <= ucfg.roundoff_floor * size[k][l + 1];
            if (!(red >= ucfg.required_reduction || at_floor)) shrinks = false;
        }
    }

    // contraction factor on the smallest window, from the coarsest level where the difference is largest
    const double dmin = deltas.back();
    const TimeTrace u1 = coarse_a->solution.prefix(coarse_a->solution.up_to(dmin).size() + 1);
    const TimeTrace u2 = coarse_b->solution.prefix(u1.size());
    const TimeTrace w = trace_difference(u1, u2);
    const double wz = z_delta_norm(w, params.r, ucfg.z_q, dmin, fam);
    const double uz = z_delta_norm(u1, params.r, ucfg.z_q, dmin, fam);
    const OseenQuadrature& quad = ucfg.quad_a;
    const ProductMode mode = ucfg.base.dealias;
    double kappa = 0.0, source = 0.0;
    if (wz > ucfg.roundoff_floor * uz && wz > 0.0) {
        const TimeTrace d = trace_difference(bilinear_B(u1, u1, quad, mode), bilinear_B(u2, u2, quad, mode));
        kappa = z_delta_norm(d, params.r, ucfg.z_q, dmin, fam) / wz;
    } else {
        // linearization at u1 along a heat-smoothed random solenoidal probe
        const FourierField probe = leray_project(random_field(u0.grid(), u0.components(), ucfg.probe_seed, 1.0));
        const TimeTrace pw = detail::heat_trace(probe, u1.times());
        TimeTrace lin = bilinear_B(u1, pw, quad, mode);
        const TimeTrace other = bilinear_B(pw, u1, quad, mode);
        for (std::size_t i = 0; i < lin.size(); ++i) lin.field(i) += other.field(i);
        kappa = safe_ratio(z_delta_norm(lin, params.r, ucfg.z_q, dmin, fam), z_delta_norm(pw, params.r, ucfg.z_q, dmin, fam));
        source = 1.0;
    }
    rep.add_scalar("min_reduction_per_level", min_reduction);
    rep.add_scalar("max_difference", max_difference);
    rep.add_scalar("contraction_factor", kappa);
    rep.add_scalar("contraction_from_linearization", source);
    rep.add_scalar("smallest_delta", dmin);
    rep.add_verdict("solves_completed", true, {"max_difference"});
    rep.add_verdict("difference_shrinks", shrinks, {"min_reduction_per_level"});
    rep.add_verdict("contraction_below_one", kappa < 1.0, {"contraction_factor"});
    return rep;
}

/// Smallness chain on one trace: with Θ(δ0) below 1/(2C1), check
/// h(σ,δ) ≤ 2C1Θ(δ) and h(-r,δ) ≤ 2C2Θ(δ) for every δ ≤ δ0 in delta_list.
inline ExperimentReport chain_check(const TimeTrace& u, const CriterionParams& params, double c1, double c2,
                                    const DyadicFamily& fam) {
    params.validate();
    if (params.delta_list.empty()) throw std::invalid_argument("chain_check: empty delta_list");
    std::vector<double> bneg(u.size()), bsig(u.size());
    parallel_for(u.size(), [&](std::size_t i) {
        const auto norms = block_lp_norms(u.field(i), kInf, fam);
        bneg[i] = besov_from_blocks(norms, -params.r);
        bsig[i] = besov_from_blocks(norms, params.sigma);
    });
    auto deltas = params.delta_list;
    std::sort(deltas.begin(), deltas.end());
    std::vector<double> th, hs, hr;
    for (double d : deltas) {
        th.push_back(theta_window(u.times(), bneg, params.r, d));
        hs.push_back(h_metric(u.times(), bsig, params.sigma, d));
        hr.push_back(h_metric(u.times(), bneg, -params.r, d));
    }
    const double threshold = 1.0 / (2.0 * c1);
    const bool small = th.back() < threshold;
    bool e4 = true, e40 = true;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        e4 = e4 && hs[k] <= 2.0 * c1 * th[k];
        e40 = e40 && hr[k] <= 2.0 * c2 * th[k];
    }
    ExperimentReport rep("chain");
    rep.add_series("theta", deltas, th);
    rep.add_series("h_sigma", deltas, hs);
    rep.add_series("h_minus_r", deltas, hr);
    rep.add_scalar("theta_delta0", th.back());
    rep.add_scalar("smallness_threshold", threshold);
    rep.add_scalar("c1", c1);
    rep.add_scalar("c2", c2);
    rep.add_verdict("theta_small", small, {"theta_delta0", "smallness_threshold"});
    rep.add_verdict("h_sigma_bound", !small || e4, {"h_sigma", "theta", "c1"});
    rep.add_verdict("h_minus_r_bound", !small || e40, {"h_minus_r", "theta", "c2"});
    return rep;
}

}  // namespace besov_ns
