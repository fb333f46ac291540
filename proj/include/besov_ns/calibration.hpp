#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "besov_ns/constants.hpp"
#include "besov_ns/criteria.hpp"
#include "besov_ns/paraproduct.hpp"

namespace besov_ns {

/// Corpus sizes and seeds for constant measurement. Calibration and
/// regression checks use disjoint seeds.
struct CalibrationConfig {
    std::uint64_t seed = 0;
    std::size_t corpus_size = 100;
    double band = 0.2;
    double r = 0.5;
    double sigma = 0.75;
    std::vector<int> grid_sizes{32, 64};
    std::vector<int> stability_sizes{32, 64, 128};
    std::vector<double> heat_char_s{0.25, 0.5, 0.75};
    std::vector<double> bilinear_horizons{0.25, 0.5, 1.0};
    std::vector<double> delta_list{0.1, 0.05, 0.025};
};

namespace calibration {

inline std::uint64_t stream(std::uint64_t seed, std::uint64_t check, std::uint64_t i) {
    return seed * 1000003ULL + check * 10007ULL + i;
}

/// Multi-scale random scalar field; spectral slope cycles through 0.5..1.4.
inline FourierField corpus_field(const TorusGrid& g, std::uint64_t seed) {
    return random_field(g, 1, seed, 0.5 + 0.1 * static_cast<double>(seed % 10));
}

/// Random solenoidal field supported in the shell K/1.19 < |k| ≤ 1.19·K.
inline FourierField shell_field(const TorusGrid& g, std::uint64_t seed, double K) {
    FourierField f = random_field(g, g.dim(), seed, 0.0, K * 1.19);
    f -= random_field(g, g.dim(), seed, 0.0, K / 1.19);
    return leray_project(f);
}

struct Range {
    double min = kInf;
    double max = 0.0;

    void add(double x) {
        min = std::min(min, x);
        max = std::max(max, x);
    }
    double geometric_mean() const { return std::sqrt(min * max); }
};

inline Range range_of(const std::vector<double>& v) {
    Range r;
    for (double x : v) r.add(x);
    return r;
}

/// heat_characterization_norm(f, s, ∞, 1) / besov_norm(f, (-s, ∞)).
inline std::vector<double> heat_char_ratios(const TorusGrid& g, double s, std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) {
        const auto f = corpus_field(g, stream(seed, 1, i));
        out[i] = heat_characterization_norm(f, s, kInf, 1.0) / besov_norm(f, BesovIndex(-s, kInf), fam);
    });
    return out;
}

/// Bernstein ratio 2^{-jd/2} ‖Δ_j δ‖_∞ / ‖Δ_j δ‖_2 for the lattice Dirac field,
/// maximized over interior blocks 1 ≤ j < J_max.
inline double bernstein_constant(const TorusGrid& g) {
    const DyadicFamily fam(g);
    FourierField dirac(g, 1);
    for (std::size_t k = 0; k < g.size(); ++k) dirac(0, k) = 1.0;
    double m = 0.0;
    for (int j = 1; j < fam.jmax(); ++j) {
        const auto b = block(dirac, j, fam);
        m = std::max(m, lp_norm(b, kInf) / (std::exp2(0.5 * j * g.dim()) * lp_norm(b, 2.0)));
    }
    return m;
}

/// Law constants of Π₁, Π₂ with the default exponents on random pairs.
inline LawConstantReport law_constant(const TorusGrid& g, std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<std::pair<FourierField, FourierField>> corpus;
    for (std::size_t i = 0; i < count; ++i) {
        corpus.emplace_back(random_field(g, 1, stream(seed, 2, 2 * i), 0.5),
                            random_field(g, 1, stream(seed, 2, 2 * i + 1), 1.5));
    }
    return estimate_law_constant(ParaproductLawSpec{}, corpus, fam);
}

/// Chemin-Lerner law constants on time-constant traces at horizons T and 2T.
inline std::pair<LawConstantReport, LawConstantReport> cl_law_horizons(const TorusGrid& g, std::size_t count,
                                                                       std::uint64_t seed, double T) {
    const DyadicFamily fam(g);
    ParaproductLawSpec spec;
    spec.p1 = 4.0;
    spec.p2 = 4.0;
    std::vector<double> times;
    for (int i = 0; i <= 16; ++i) times.push_back(2.0 * T * i / 16);
    std::vector<std::pair<TimeTrace, TimeTrace>> corpus;
    for (std::size_t i = 0; i < count; ++i) {
        const auto f = random_field(g, 1, stream(seed, 3, 2 * i), 0.5);
        const auto h = random_field(g, 1, stream(seed, 3, 2 * i + 1), 1.5);
        TimeTrace tf(g), th(g);
        for (double t : times) {
            tf.push_back(t, f);
            th.push_back(t, h);
        }
        corpus.emplace_back(std::move(tf), std::move(th));
    }
    return {estimate_law_constant(spec, corpus, T, fam), estimate_law_constant(spec, corpus, 2.0 * T, fam)};
}

inline std::vector<double> gmo_ratios(const TorusGrid& g, std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = check_gmo(corpus_field(g, stream(seed, 4, i)), 0.5, 1.0, fam).ratio; });
    return out;
}

inline std::vector<double> interpolation_ratios(const TorusGrid& g, double r, double sigma, std::size_t count,
                                                std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) {
        out[i] = check_interpolation(corpus_field(g, stream(seed, 5, i)), r, sigma, fam).ratio;
    });
    return out;
}

/// sup_t t^{(s2-s1)/2} ‖e^{tΔ}f‖_{B^{s2}} / ‖f‖_{B^{s1}} with s1 = -1/2, s2 = 1/2, q = ∞,
/// t on the heat θ-grid of [0, 1].
inline std::vector<double> heat_smoothing_ratios(const TorusGrid& g, std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    const double s1 = -0.5, s2 = 0.5;
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) {
        const auto f = corpus_field(g, stream(seed, 6, i));
        double m = 0.0;
        for (double t : heat_theta_grid(1.0)) {
            m = std::max(m, std::pow(t, 0.5 * (s2 - s1)) * besov_norm(heat_semigroup(f, t), BesovIndex(s2, kInf), fam));
        }
        out[i] = m / besov_norm(f, BesovIndex(s1, kInf), fam);
    });
    return out;
}

/// weighted_sup_norm(e^{tΔ}f, r) / besov_norm(f, (-r, ∞)), t on the heat θ-grid of [0, 1].
inline std::vector<double> weighted_sup_ratios(const TorusGrid& g, double r, std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) {
        const auto f = corpus_field(g, stream(seed, 7, i));
        const auto u = detail::heat_trace(f, heat_theta_grid(1.0));
        out[i] = weighted_sup_norm(u, r) / besov_norm(f, BesovIndex(-r, kInf), fam);
    });
    return out;
}

struct BilinearConstants {
    double c_one_r = 0.0;           // L^∞_1 × L^∞_r → L^∞_r
    std::vector<double> T;
    std::vector<double> c_r_r;      // L^∞_r × L^∞_r → L^∞_r per horizon
    double slope = 0.0;             // fitted exponent of c_r_r against T
};

/// Bilinear estimates for B on heat flows of shell fields at radii K = 2^{m/4}.
inline BilinearConstants bilinear_constants(const TorusGrid& g, double r, const std::vector<double>& horizons,
                                            std::uint64_t seed) {
    BilinearConstants out;
    std::vector<double> radii;
    for (double K = 1.0; K < g.points() / 3.0; K *= std::pow(2.0, 0.25)) radii.push_back(K);
    for (double T : horizons) {
        SolverConfig cfg;
        cfg.grid = g;
        cfg.T = T;
        cfg.dt = T / 64.0;
        const auto times = cfg.time_grid();
        std::vector<double> c1(radii.size() * 2, 0.0), c2(radii.size() * 2, 0.0);
        parallel_for(radii.size() * 2, [&](std::size_t idx) {
            const double K = radii[idx / 2];
            const std::uint64_t s = stream(seed, 8, idx);
            const auto f = shell_field(g, 2 * s, K), h = shell_field(g, 2 * s + 1, K);
            if (l2_norm(f) == 0.0 || l2_norm(h) == 0.0) return;
            const auto u = detail::heat_trace(f, times), v = detail::heat_trace(h, times);
            const double wb = weighted_sup_norm(bilinear_B(u, v, OseenQuadrature{}), r);
            const double wv = weighted_sup_norm(v, r);
            c1[idx] = wb / (weighted_sup_norm(u, 1.0) * wv);
            c2[idx] = wb / (weighted_sup_norm(u, r) * wv);
        });
        out.c_one_r = std::max(out.c_one_r, *std::max_element(c1.begin(), c1.end()));
        out.T.push_back(T);
        out.c_r_r.push_back(*std::max_element(c2.begin(), c2.end()));
    }
    out.slope = detail::log_log_slope(out.T, out.c_r_r);
    return out;
}

inline TimeTrace chain_heat_trace(const FourierField& u0) {
    SolverConfig cfg;
    cfg.grid = u0.grid();
    cfg.T = 0.25;
    cfg.dt = 0.005;
    return detail::heat_trace(u0, cfg.time_grid());
}

struct ChainConstants {
    double c1 = 0.0;  // sup h(σ,δ)/Θ(δ)
    double c2 = 0.0;  // sup h(-r,δ)/Θ(δ)
};

/// C₁, C₂ measured on heat flows of random B^{-r,∞}_∞ data over the window list.
inline ChainConstants chain_constants(const TorusGrid& g, double r, double sigma, const std::vector<double>& deltas,
                                      std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> c1(count), c2(count);
    parallel_for(count, [&](std::size_t i) {
        const auto u = chain_heat_trace(random_besov_field(g, -r, stream(seed, 9, i), 1.0));
        std::vector<double> bneg(u.size()), bsig(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            const auto norms = block_lp_norms(u.field(k), kInf, fam);
            bneg[k] = besov_from_blocks(norms, -r);
            bsig[k] = besov_from_blocks(norms, sigma);
        }
        for (double d : deltas) {
            const double th = theta_window(u.times(), bneg, r, d);
            c1[i] = std::max(c1[i], h_metric(u.times(), bsig, sigma, d) / th);
            c2[i] = std::max(c2[i], h_metric(u.times(), bneg, -r, d) / th);
        }
    });
    return {*std::max_element(c1.begin(), c1.end()), *std::max_element(c2.begin(), c2.end())};
}

/// Solver configuration of the small-data persistence corpus.
inline SolverConfig small_data_config(const TorusGrid& g) {
    SolverConfig cfg;
    cfg.grid = g;
    cfg.T = 0.25;
    cfg.dt = 0.01;
    cfg.n_picard = 6;
    return cfg;
}

/// sup_t ‖u(t)‖_{B^{-r}} / ‖u0‖_{B^{-r}} on small-data solver runs (amplitude 0.3).
inline std::vector<double> persistence_ratios(const TorusGrid& g, double r, std::size_t count, std::uint64_t seed) {
    std::vector<double> out;
    const auto cfg = small_data_config(g);
    for (std::size_t i = 0; i < count; ++i) {
        const auto u0 = random_besov_field(g, -0.5, stream(seed, 10, i), 0.3);
        out.push_back(persistence_check(u0, cfg, r, kInf).scalar("ratio"));
    }
    return out;
}

/// (∫_0^δ ‖u(t)‖_{B^{-r,∞}_∞}^{2/(1-r)} dt)^{(1-r)/2}, trapezoid in t.
inline double besov_time_norm(const TimeTrace& u, double r, double delta, const DyadicFamily& fam) {
    const double p = 2.0 / (1.0 - r);
    std::vector<double> b(u.size());
    for (std::size_t m = 0; m < u.size(); ++m) b[m] = std::pow(besov_norm(u.field(m), BesovIndex(-r, kInf), fam), p);
    return std::pow(detail::integrate_linear(u.times(), b, u.start(), delta), 1.0 / p);
}

/// ‖𝕃_u f‖ / (‖f‖ ‖u‖_{L^{2/(1-r)}_δ B^{-r}}) with both norms in L̃^{2/(1+r)}_δ B_4^{1+r},
/// u and f heat flows of random data, one value per window.
inline std::vector<double> linearized_ratios(const TorusGrid& g, double r, const std::vector<double>& deltas,
                                             std::size_t count, std::uint64_t seed) {
    const DyadicFamily fam(g);
    std::vector<double> out(deltas.size(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto u0 = random_besov_field(g, -r, stream(seed, 11, 2 * i), 1.0);
        const auto f0 = random_besov_field(g, -r, stream(seed, 11, 2 * i + 1), 1.0);
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            SolverConfig cfg;
            cfg.grid = g;
            cfg.T = deltas[k];
            cfg.dt = deltas[k] / 16.0;
            const auto times = cfg.time_grid();
            const auto u = detail::heat_trace(u0, times), f = detail::heat_trace(f0, times);
            const auto lf = apply_linearized(u, f, fam, OseenQuadrature{});
            const CheminLernerIndex z(2.0 / (1.0 + r), BesovIndex(1.0 + r, 4.0), deltas[k]);
            const double un = besov_time_norm(u, r, deltas[k], fam);
            out[k] = std::max(out[k], chemin_lerner_norm(lf, z, fam) / (chemin_lerner_norm(f, z, fam) * un));
        }
    }
    return out;
}

/// Measures every frozen constant and returns the file contents.
inline ConstantsFile calibrate_constants(const CalibrationConfig& cc, ExperimentReport* report = nullptr) {
    ConstantsFile out;
    const double band = cc.band;
    auto put_range = [&](const std::string& name, const Range& rg, const std::string& what) {
        out.set(name, FrozenConstant{rg.geometric_mean(), rg.min, rg.max, band, what});
    };
    auto put_max = [&](const std::string& name, double v, const std::string& what) {
        out.set(name, FrozenConstant{v, v, v, band, what});
    };
    const std::size_t n = cc.corpus_size;

    for (double s : cc.heat_char_s) {
        Range rg;
        for (int N : cc.grid_sizes) {
            for (double x : heat_char_ratios(TorusGrid(2, N), s, n, cc.seed)) rg.add(x);
        }
        put_range("heat_char_ratio_s" + delta_key(s), rg, "heat characterization / B^{-s,inf}_inf norm, q = inf");
    }

    Range bern, law1, law2;
    for (int N : cc.stability_sizes) {
        const TorusGrid g(2, N);
        bern.add(bernstein_constant(g));
        const auto law = law_constant(g, n, cc.seed);
        law1.add(law.pi1);
        law2.add(law.pi2);
    }
    put_range("bernstein", bern, "Dirac-field Bernstein ratio L2 -> Linf on interior blocks");
    put_range("paraproduct_law_pi1", law1, "Pi1 law constant, sigma1 = 1/4, sigma2 = 3/4, q = inf");
    put_range("paraproduct_law_pi2", law2, "Pi2 law constant, sigma1 = 1/4, sigma2 = 3/4, q = inf");

    double gmo = 0.0, interp = 0.0, smooth = 0.0;
    Range ws;
    for (int N : cc.grid_sizes) {
        const TorusGrid g(2, N);
        gmo = std::max(gmo, range_of(gmo_ratios(g, 2 * n, cc.seed)).max);
        interp = std::max(interp, range_of(interpolation_ratios(g, cc.r, cc.sigma, n, cc.seed)).max);
        smooth = std::max(smooth, range_of(heat_smoothing_ratios(g, n, cc.seed)).max);
        for (double x : weighted_sup_ratios(g, cc.r, n, cc.seed)) ws.add(x);
    }
    put_max("gmo", gmo, "sup of ||f||_4 / (||f||_{H^1/2}^{1/2} ||f||_{B^{-1/2,inf}_inf}^{1/2})");
    put_max("interpolation", interp, "sup of ||f||_inf / interpolation right side, r = 1/2, sigma = 3/4");
    put_max("heat_smoothing", smooth, "sup_t t^{1/2} ||e^{t Lap} f||_{B^{1/2}} / ||f||_{B^{-1/2}}, q = inf");
    put_range("weighted_sup_vs_besov", ws, "weighted_sup_norm(e^{t Lap} f, r) / ||f||_{B^{-r,inf}_inf}");

    const TorusGrid g32(2, 32);
    const auto bil = bilinear_constants(g32, cc.r, cc.bilinear_horizons, cc.seed);
    put_max("bilinear_c", bil.c_one_r, "B: L^inf_1 x L^inf_r -> L^inf_r on heat-flow shells");
    put_max("bilinear_rr_slope", bil.slope, "fitted exponent of the L^inf_r x L^inf_r constant against T");
    for (std::size_t i = 0; i < bil.T.size(); ++i) {
        put_max("bilinear_rr_T" + delta_key(bil.T[i]), bil.c_r_r[i], "L^inf_r x L^inf_r constant at this horizon");
    }
    put_max("epsilon", 1.0 / (4.0 * bil.c_one_r * bil.c_one_r), "1/(4C^2) with C = bilinear_c");

    const auto chain = chain_constants(g32, cc.r, cc.sigma, cc.delta_list, std::max<std::size_t>(n / 5, 4), cc.seed);
    put_max("chain_c1", chain.c1, "sup h(sigma, delta) / Theta(delta) on heat flows");
    put_max("chain_c2", chain.c2, "sup h(-r, delta) / Theta(delta) on heat flows");

    put_max("persistence_multiple", range_of(persistence_ratios(g32, cc.r, std::max<std::size_t>(n / 10, 3), cc.seed)).max,
            "sup_t ||u(t)||_{B^{-r}} / ||u0||_{B^{-r}} on small-data runs");

    const auto lin = linearized_ratios(g32, cc.r, cc.delta_list, std::max<std::size_t>(n / 20, 2), cc.seed);
    put_max("linearized_c", range_of(lin).max, "sup over windows of the linearized-operator norm ratio");

    if (report) {
        report->set_name("calibrate");
        for (const auto& [k, c] : out.entries()) report->add_scalar(k, c.value);
        report->add_series("bilinear_rr", bil.T, bil.c_r_r);
        report->add_series("linearized_ratio", cc.delta_list, lin);
    }
    return out;
}

}  // namespace calibration

}  // namespace besov_ns
