#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/norms.hpp"

namespace besov_ns {

/// Random real field with Gaussian coefficients of radial amplitude
/// (1+|k|)^{-slope} on 0 < |k| <= max_radius (0 means no cap). Nyquist modes
/// and the mean are zero.
inline FourierField random_field(const TorusGrid& grid, int components, std::uint64_t seed, double slope,
                                 double max_radius = 0.0) {
    FourierField f(grid, components);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int c = 0; c < components; ++c) {
        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            const double re = normal(rng);
            const double im = normal(rng);
            const auto idx = grid.unflatten(flat);
            bool nyquist = false;
            for (int a = 0; a < grid.dim(); ++a) nyquist = nyquist || grid.is_nyquist(idx[a]);
            const double r = std::sqrt(grid.k_squared(flat));
            if (nyquist || r == 0.0 || (max_radius > 0.0 && r > max_radius)) continue;
            f(c, flat) = std::pow(1.0 + r, -slope) * Complex(re, im);
        }
    }
    enforce_hermitian(f);
    return f;
}

enum class InitialKind { TaylorGreen, RandomBesov, SingleMode };

inline InitialKind parse_initial_kind(const std::string& name) {
    if (name == "taylor-green") return InitialKind::TaylorGreen;
    if (name == "random-besov") return InitialKind::RandomBesov;
    if (name == "single-mode") return InitialKind::SingleMode;
    throw std::invalid_argument("unknown initial field kind '" + name + "'");
}

inline std::string to_string(InitialKind k) {
    switch (k) {
        case InitialKind::TaylorGreen: return "taylor-green";
        case InitialKind::RandomBesov: return "random-besov";
        case InitialKind::SingleMode: return "single-mode";
    }
    return "unknown";
}

struct InitialFieldSpec {
    InitialKind kind = InitialKind::TaylorGreen;
    double s = -0.5;                       // random-besov regularity
    std::uint64_t seed = 0;                // random-besov seed
    double amplitude = 1.0;                // target B^{s,∞}_∞ norm (random-besov) or mode amplitude
    std::array<int, 3> wavevector{1, 0, 0};  // single-mode
};

namespace detail {

template <typename Fn>
FourierField from_function(const TorusGrid& grid, int components, Fn&& fn) {
    const std::size_t npts = grid.size();
    std::vector<double> vals(static_cast<std::size_t>(components) * npts);
    const double h = grid.spacing();
    for (std::size_t p = 0; p < npts; ++p) {
        const auto idx = grid.unflatten(p);
        const double x = idx[0] * h, y = idx[1] * h, z = grid.dim() == 3 ? idx[2] * h : 0.0;
        for (int c = 0; c < components; ++c) vals[static_cast<std::size_t>(c) * npts + p] = fn(c, x, y, z);
    }
    return from_physical(grid, vals, components);
}

}  // namespace detail

/// Taylor-Green vortex: (cos x sin y, -sin x cos y) in 2D and
/// (cos x sin y cos z, -sin x cos y cos z, 0) in 3D.
inline FourierField taylor_green(const TorusGrid& grid) {
    const int d = grid.dim();
    FourierField f = detail::from_function(grid, d, [d](int c, double x, double y, double z) {
        const double zf = d == 3 ? std::cos(z) : 1.0;
        if (c == 0) return std::cos(x) * std::sin(y) * zf;
        if (c == 1) return -std::sin(x) * std::cos(y) * zf;
        return 0.0;
    });
    enforce_hermitian(f);
    f.set_divergence_free(true);
    return f;
}

/// a·cos(k·x) with a unit amplitude vector orthogonal to k.
inline FourierField single_mode(const TorusGrid& grid, const std::array<int, 3>& k, double amplitude = 1.0) {
    const int d = grid.dim();
    double kv[3] = {static_cast<double>(k[0]), static_cast<double>(k[1]), d == 3 ? static_cast<double>(k[2]) : 0.0};
    const double kn = std::sqrt(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
    if (kn == 0.0) throw std::invalid_argument("single_mode: wavevector must be nonzero");
    for (int a = 0; a < d; ++a) {
        if (std::abs(k[a]) >= grid.points() / 2) throw std::invalid_argument("single_mode: wavevector not resolved below Nyquist");
    }
    double av[3] = {0.0, 0.0, 0.0};
    if (d == 2) {
        av[0] = -kv[1] / kn;
        av[1] = kv[0] / kn;
    } else {
        int axis = 0;
        for (int a = 1; a < 3; ++a) {
            if (std::abs(kv[a]) < std::abs(kv[axis])) axis = a;
        }
        double e[3] = {0.0, 0.0, 0.0};
        e[axis] = 1.0;
        av[0] = kv[1] * e[2] - kv[2] * e[1];
        av[1] = kv[2] * e[0] - kv[0] * e[2];
        av[2] = kv[0] * e[1] - kv[1] * e[0];
        const double an = std::sqrt(av[0] * av[0] + av[1] * av[1] + av[2] * av[2]);
        for (double& x : av) x /= an;
    }
    FourierField f(grid, d);
    const std::size_t plus = grid.flat_of_wavevector(k);
    const std::size_t minus = grid.flat_of_wavevector({-k[0], -k[1], -k[2]});
    for (int a = 0; a < d; ++a) {
        f(a, plus) += 0.5 * amplitude * av[a];
        f(a, minus) += 0.5 * amplitude * av[a];
    }
    f.set_divergence_free(true);
    return f;
}

/// Divergence-free random field with spectral slope matched to B^{s,∞}_∞,
/// rescaled so that its measured B^{s,∞}_∞ norm equals `amplitude`.
inline FourierField random_besov_field(const TorusGrid& grid, double s, std::uint64_t seed, double amplitude = 1.0) {
    const DyadicFamily fam(grid);
    FourierField f = leray_project(random_field(grid, grid.dim(), seed, s + grid.dim() / 2.0));
    const double norm = besov_norm(f, BesovIndex(s, kInf), fam);
    if (norm == 0.0) throw std::runtime_error("random_besov_field: degenerate draw");
    f *= amplitude / norm;
    f.set_divergence_free(true);
    return f;
}

inline FourierField make_initial_field(const InitialFieldSpec& spec, const TorusGrid& grid) {
    switch (spec.kind) {
        case InitialKind::TaylorGreen: {
            FourierField f = taylor_green(grid);
            if (spec.amplitude != 1.0) f *= spec.amplitude;
            return f;
        }
        case InitialKind::RandomBesov: return random_besov_field(grid, spec.s, spec.seed, spec.amplitude);
        case InitialKind::SingleMode: return single_mode(grid, spec.wavevector, spec.amplitude);
    }
    throw std::invalid_argument("make_initial_field: unknown kind");
}

}  // namespace besov_ns
