#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace besov_ns {

/// Periodic grid on the torus [0, 2π)^d with N points per axis.
///
/// Fourier modes are indexed by the FFT storage index n ∈ {0..N-1} per axis; the
/// signed wavenumber is n for n ≤ N/2 and n - N otherwise, so the lattice is
/// {-N/2+1, ..., N/2}^d with the Nyquist index N/2 carried as +N/2.
class TorusGrid {
public:
    static constexpr double period = 2.0 * std::numbers::pi;

    TorusGrid(int dim, int points) : d_(dim), n_(points) {
        if (dim != 2 && dim != 3) {
            throw std::invalid_argument("TorusGrid: dimension must be 2 or 3, got " + std::to_string(dim));
        }
        if (points < 8 || (points & (points - 1)) != 0) {
            throw std::invalid_argument("TorusGrid: N must be a power of two >= 8, got " + std::to_string(points));
        }
    }

    int dim() const { return d_; }
    int points() const { return n_; }

    /// Number of lattice modes (equivalently physical grid points), N^d.
    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < d_; ++a) s *= static_cast<std::size_t>(n_);
        return s;
    }

    int wavenumber(int idx) const { return idx <= n_ / 2 ? idx : idx - n_; }

    /// Wavenumber used by odd (derivative-type) multipliers. The Nyquist index
    /// maps to 0 so that i·k multipliers preserve Hermitian symmetry.
    double derivative_wavenumber(int idx) const {
        return idx == n_ / 2 ? 0.0 : static_cast<double>(wavenumber(idx));
    }

    bool is_nyquist(int idx) const { return idx == n_ / 2; }

    /// Per-axis storage indices of a flat index; axis 0 varies slowest.
    std::array<int, 3> unflatten(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = d_ - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
            flat /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    std::size_t flatten(const std::array<int, 3>& idx) const {
        std::size_t flat = 0;
        for (int a = 0; a < d_; ++a) flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[a]);
        return flat;
    }

    /// Storage index of the signed wavenumber k (taken modulo N).
    int index_of(int k) const { return ((k % n_) + n_) % n_; }

    std::size_t flat_of_wavevector(const std::array<int, 3>& k) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < d_; ++a) idx[a] = index_of(k[a]);
        return flatten(idx);
    }

    /// Flat index of the mode -k.
    std::size_t conjugate(std::size_t flat) const {
        auto idx = unflatten(flat);
        for (int a = 0; a < d_; ++a) idx[a] = (n_ - idx[a]) % n_;
        return flatten(idx);
    }

    std::array<int, 3> wavevector(std::size_t flat) const {
        auto idx = unflatten(flat);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < d_; ++a) k[a] = wavenumber(idx[a]);
        return k;
    }

    double k_squared(std::size_t flat) const {
        const auto k = wavevector(flat);
        double s = 0.0;
        for (int a = 0; a < d_; ++a) s += static_cast<double>(k[a]) * k[a];
        return s;
    }

    /// Largest |k| on the lattice, attained at the all-Nyquist corner.
    double max_wavenumber() const { return std::sqrt(static_cast<double>(d_)) * (n_ / 2); }

    /// Grid spacing 2π/N.
    double spacing() const { return period / n_; }

    /// (2π)^d, the torus volume.
    double volume() const { return std::pow(period, d_); }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) { return a.d_ == b.d_ && a.n_ == b.n_; }

private:
    int d_;
    int n_;
};

}  // namespace besov_ns
