#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/fft.hpp"
#include "besov_ns/grid.hpp"

namespace besov_ns {

using Complex = std::complex<double>;

/// Real field on the torus held as Fourier coefficients, with any number of
/// components (1 for scalars, d for vector fields, d*d for tensors).
///
/// Normalization: u(x) = Σ_k û(k) e^{ik·x}, so a constant field c has û(0) = c
/// and sin(x) has û(±1) = ∓i/2. Coefficients are stored component-major, each
/// component in the grid's flat mode order.
class FourierField {
public:
    FourierField(const TorusGrid& grid, int components)
        : grid_(grid), ncomp_(components), coef_(static_cast<std::size_t>(components) * grid.size()) {
        if (components < 1) throw std::invalid_argument("FourierField: component count must be >= 1");
    }

    const TorusGrid& grid() const { return grid_; }
    int components() const { return ncomp_; }
    std::size_t modes() const { return grid_.size(); }

    std::span<Complex> component(int c) { return {coef_.data() + offset(c), grid_.size()}; }
    std::span<const Complex> component(int c) const { return {coef_.data() + offset(c), grid_.size()}; }

    std::span<Complex> data() { return coef_; }
    std::span<const Complex> data() const { return coef_; }

    Complex& operator()(int c, std::size_t flat) { return coef_[offset(c) + flat]; }
    const Complex& operator()(int c, std::size_t flat) const { return coef_[offset(c) + flat]; }

    /// Set by operations whose output is divergence-free by construction.
    bool divergence_free() const { return div_free_; }
    void set_divergence_free(bool flag) { div_free_ = flag; }

    FourierField& operator+=(const FourierField& other) {
        check_compatible(other, "operator+=");
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += other.coef_[i];
        div_free_ = div_free_ && other.div_free_;
        return *this;
    }

    FourierField& operator-=(const FourierField& other) {
        check_compatible(other, "operator-=");
        for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= other.coef_[i];
        div_free_ = div_free_ && other.div_free_;
        return *this;
    }

    FourierField& operator*=(double a) {
        for (auto& c : coef_) c *= a;
        return *this;
    }

    friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
    friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
    friend FourierField operator*(double s, FourierField a) { return a *= s; }
    friend FourierField operator*(FourierField a, double s) { return a *= s; }

    void check_compatible(const FourierField& other, const char* where) const {
        if (!(grid_ == other.grid_)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
        if (ncomp_ != other.ncomp_) throw std::invalid_argument(std::string(where) + ": component count mismatch");
    }

private:
    std::size_t offset(int c) const { return static_cast<std::size_t>(c) * grid_.size(); }

    TorusGrid grid_;
    int ncomp_;
    std::vector<Complex> coef_;
    bool div_free_ = false;
};

inline void require_same_grid(const FourierField& a, const FourierField& b, const char* where) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

/// Physical values of every component on a side^d grid (side 0 means the
/// field's own N). For side > N the coefficients are zero-padded and the
/// Nyquist modes of the coarse grid are dropped.
inline std::vector<double> to_physical(const FourierField& f, int side = 0) {
    const TorusGrid& g = f.grid();
    const int n = g.points();
    if (side == 0) side = n;
    if (side < n) throw std::invalid_argument("to_physical: target side smaller than grid");
    auto& eng = detail::engine(g.dim(), side);
    const std::size_t npts = eng.size();
    std::vector<double> out(static_cast<std::size_t>(f.components()) * npts);
    auto buf = eng.buffer();
    const int d = g.dim();
    for (int c = 0; c < f.components(); ++c) {
        std::fill(buf.begin(), buf.end(), Complex{});
        const auto src = f.component(c);
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            const auto idx = g.unflatten(flat);
            std::size_t dst = 0;
            bool skip = false;
            for (int a = 0; a < d; ++a) {
                if (side > n && g.is_nyquist(idx[a])) { skip = true; break; }
                const int k = g.wavenumber(idx[a]);
                dst = dst * static_cast<std::size_t>(side) + static_cast<std::size_t>(((k % side) + side) % side);
            }
            if (!skip) buf[dst] = src[flat];
        }
        eng.backward();
        double* o = out.data() + static_cast<std::size_t>(c) * npts;
        for (std::size_t i = 0; i < npts; ++i) o[i] = buf[i].real();
    }
    return out;
}

/// Inverse of to_physical: transform side^d real samples per component and keep
/// the modes representable on `grid` (Nyquist zeroed when side > N).
inline FourierField from_physical(const TorusGrid& grid, std::span<const double> values, int components,
                                  int side = 0) {
    const int n = grid.points();
    if (side == 0) side = n;
    if (side < n) throw std::invalid_argument("from_physical: source side smaller than grid");
    auto& eng = detail::engine(grid.dim(), side);
    const std::size_t npts = eng.size();
    if (values.size() != static_cast<std::size_t>(components) * npts) {
        throw std::invalid_argument("from_physical: value count does not match side^d * components");
    }
    FourierField f(grid, components);
    auto buf = eng.buffer();
    const double scale = 1.0 / static_cast<double>(npts);
    const int d = grid.dim();
    for (int c = 0; c < components; ++c) {
        const double* v = values.data() + static_cast<std::size_t>(c) * npts;
        for (std::size_t i = 0; i < npts; ++i) buf[i] = Complex(v[i], 0.0);
        eng.forward();
        auto dst = f.component(c);
        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            const auto idx = grid.unflatten(flat);
            std::size_t src = 0;
            bool skip = false;
            for (int a = 0; a < d; ++a) {
                if (side > n && grid.is_nyquist(idx[a])) { skip = true; break; }
                const int k = grid.wavenumber(idx[a]);
                src = src * static_cast<std::size_t>(side) + static_cast<std::size_t>(((k % side) + side) % side);
            }
            dst[flat] = skip ? Complex{} : buf[src] * scale;
        }
    }
    return f;
}

/// Largest |â - b̂| over all coefficients.
inline double max_coefficient_difference(const FourierField& a, const FourierField& b) {
    a.check_compatible(b, "max_coefficient_difference");
    double m = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
    return m;
}

inline double max_coefficient_abs(const FourierField& a) {
    double m = 0.0;
    for (const auto& c : a.data()) m = std::max(m, std::abs(c));
    return m;
}

/// max_k |û(-k) - conj(û(k))|; zero for a real field.
inline double hermitian_defect(const FourierField& f) {
    const TorusGrid& g = f.grid();
    double m = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        const auto u = f.component(c);
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            m = std::max(m, std::abs(u[g.conjugate(flat)] - std::conj(u[flat])));
        }
    }
    return m;
}

/// Replace û(k) by (û(k) + conj(û(-k)))/2 so the field is exactly real.
inline void enforce_hermitian(FourierField& f) {
    const TorusGrid& g = f.grid();
    for (int c = 0; c < f.components(); ++c) {
        auto u = f.component(c);
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            const std::size_t cj = g.conjugate(flat);
            if (cj < flat) continue;
            const Complex avg = 0.5 * (u[flat] + std::conj(u[cj]));
            u[flat] = avg;
            u[cj] = std::conj(avg);
        }
    }
}

/// max_k |Σ_i k_i û_i(k)| / max_k |k|‖û(k)‖ with derivative wavenumbers: the
/// divergence relative to the field's own gradient scale. Requires a
/// d-component field; zero for the zero field.
inline double divergence_defect(const FourierField& f) {
    const TorusGrid& g = f.grid();
    const int d = g.dim();
    if (f.components() != d) throw std::invalid_argument("divergence_defect: expects a d-component field");
    double num = 0.0, den = 0.0;
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto idx = g.unflatten(flat);
        Complex div{};
        double mag2 = 0.0, k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const Complex v = f(a, flat);
            const double k = g.derivative_wavenumber(idx[a]);
            div += k * v;
            mag2 += std::norm(v);
            k2 += k * k;
        }
        num = std::max(num, std::abs(div));
        den = std::max(den, std::sqrt(k2 * mag2));
    }
    return den > 0.0 ? num / den : 0.0;
}

/// L² norm over the torus via Parseval: ((2π)^d Σ_k Σ_c |û_c(k)|²)^{1/2}. The
/// pointwise norm of a multi-component field is Euclidean.
inline double l2_norm(const FourierField& f) {
    double s = 0.0;
    for (const auto& c : f.data()) s += std::norm(c);
    return std::sqrt(f.grid().volume() * s);
}

inline bool all_finite(const FourierField& f) {
    for (const auto& c : f.data()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

}  // namespace besov_ns
