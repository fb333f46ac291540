#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/field.hpp"

namespace besov_ns {

namespace profile {

/// exp(-1/t) for t > 0, else 0.
inline double bump_edge(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// Smooth monotone step: 1 on [0, 1], 0 on [2, ∞).
inline double transition(double t) {
    const double a = bump_edge(2.0 - t);
    const double b = bump_edge(t - 1.0);
    return a / (a + b);
}

/// Radial low-pass profile φ(ξ) = transition(|ξ|).
inline double phi(double radius) { return transition(radius); }

/// Band profile ψ(ξ) = φ(ξ/2) - φ(ξ), supported in 1 < |ξ| < 4.
inline double psi(double radius) { return phi(radius / 2.0) - phi(radius); }

}  // namespace profile

/// Littlewood-Paley cutoff system on a lattice: block -1 is S_0 = φ(k), block
/// j in [0, J_max) is ψ(k/2^j), and the top block J_max is 1 - φ(k/2^J_max), so
/// the blocks sum to one on every lattice mode.
///
/// J_max is the last index whose unmodified band ψ(·/2^j) meets the lattice,
/// i.e. the largest j with 2^j < √d·N/2. With that choice φ(k/2^{J_max+1}) = 1
/// on the whole lattice, so S_{J_max+1} is the identity.
class DyadicFamily {
public:
    explicit DyadicFamily(const TorusGrid& grid) : grid_(grid) {
        const double kmax = grid.max_wavenumber();
        jmax_ = 0;
        while (std::ldexp(1.0, jmax_ + 1) < kmax) ++jmax_;

        const std::size_t m = grid.size();
        radius_.resize(m);
        for (std::size_t flat = 0; flat < m; ++flat) radius_[flat] = std::sqrt(grid.k_squared(flat));

        // low_[j] = φ(k/2^j) for j = 0..J_max+1
        low_.assign(static_cast<std::size_t>(jmax_ + 2), std::vector<double>(m));
        for (int j = 0; j <= jmax_ + 1; ++j) {
            const double scale = std::ldexp(1.0, -j);
            for (std::size_t flat = 0; flat < m; ++flat) low_[j][flat] = profile::phi(radius_[flat] * scale);
        }
        blocks_.assign(static_cast<std::size_t>(jmax_ + 2), std::vector<double>(m));
        blocks_[0] = low_[0];
        for (int j = 0; j < jmax_; ++j) {
            const double scale = std::ldexp(1.0, -j);
            auto& b = blocks_[static_cast<std::size_t>(j + 1)];
            for (std::size_t flat = 0; flat < m; ++flat) b[flat] = profile::psi(radius_[flat] * scale);
        }
        auto& top = blocks_[static_cast<std::size_t>(jmax_ + 1)];
        for (std::size_t flat = 0; flat < m; ++flat) top[flat] = 1.0 - low_[static_cast<std::size_t>(jmax_)][flat];
    }

    const TorusGrid& grid() const { return grid_; }
    int jmax() const { return jmax_; }

    /// Multiplier of block j ∈ {-1, ..., J_max}.
    std::span<const double> block_profile(int j) const {
        if (j < -1 || j > jmax_) {
            throw std::out_of_range("DyadicFamily: block index " + std::to_string(j) + " outside [-1, " +
                                    std::to_string(jmax_) + "]");
        }
        return blocks_[static_cast<std::size_t>(j + 1)];
    }

    /// Multiplier φ(k/2^j) of S_j for j >= 0; identity beyond J_max + 1.
    std::span<const double> low_pass_profile(int j) const {
        if (j < 0) throw std::out_of_range("DyadicFamily: low-pass index must be >= 0");
        if (j > jmax_ + 1) j = jmax_ + 1;
        return low_[static_cast<std::size_t>(j)];
    }

    std::span<const double> radii() const { return radius_; }

    /// One row per lattice mode: wavevector, |k|, then every block multiplier.
    void write_csv(std::ostream& os) const {
        const int d = grid_.dim();
        for (int a = 0; a < d; ++a) os << "k" << a << ",";
        os << "radius";
        for (int j = -1; j <= jmax_; ++j) os << ",block_" << j;
        os << "\n";
        os.precision(17);
        for (std::size_t flat = 0; flat < grid_.size(); ++flat) {
            const auto k = grid_.wavevector(flat);
            for (int a = 0; a < d; ++a) os << k[a] << ",";
            os << radius_[flat];
            for (int j = -1; j <= jmax_; ++j) os << "," << blocks_[static_cast<std::size_t>(j + 1)][flat];
            os << "\n";
        }
    }

private:
    TorusGrid grid_;
    int jmax_ = 0;
    std::vector<double> radius_;
    std::vector<std::vector<double>> low_;
    std::vector<std::vector<double>> blocks_;
};

inline DyadicFamily build_dyadic_family(const TorusGrid& grid) { return DyadicFamily(grid); }

/// Multiply every component of f by a real per-mode multiplier.
inline FourierField apply_multiplier(const FourierField& f, std::span<const double> mult) {
    if (mult.size() != f.grid().size()) throw std::invalid_argument("apply_multiplier: size mismatch");
    FourierField out = f;
    for (int c = 0; c < f.components(); ++c) {
        auto u = out.component(c);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= mult[i];
    }
    return out;
}

/// Δ_j f.
inline FourierField block(const FourierField& f, int j, const DyadicFamily& fam) {
    if (!(f.grid() == fam.grid())) throw std::invalid_argument("block: family built for a different grid");
    return apply_multiplier(f, fam.block_profile(j));
}

/// S_j f.
inline FourierField low_pass(const FourierField& f, int j, const DyadicFamily& fam) {
    if (!(f.grid() == fam.grid())) throw std::invalid_argument("low_pass: family built for a different grid");
    return apply_multiplier(f, fam.low_pass_profile(j));
}

}  // namespace besov_ns
