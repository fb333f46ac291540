#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "besov_ns/field.hpp"

namespace besov_ns {

/// How pointwise products are formed. Padded uses the 3/2 zero-padding rule;
/// Full multiplies grid values at native resolution, which reproduces the
/// discrete pointwise product exactly (aliasing included).
enum class ProductMode { Padded, Full };

inline int product_side(const TorusGrid& g, ProductMode mode) {
    return mode == ProductMode::Padded ? 3 * g.points() / 2 : g.points();
}

/// Pointwise product of f and g. Components multiply pairwise when counts
/// match; a scalar operand broadcasts over the other's components.
inline FourierField pointwise_product(const FourierField& f, const FourierField& g, ProductMode mode) {
    require_same_grid(f, g, "pointwise_product");
    const int cf = f.components();
    const int cg = g.components();
    if (cf != cg && cf != 1 && cg != 1) throw std::invalid_argument("pointwise_product: incompatible component counts");
    const int side = product_side(f.grid(), mode);
    const auto pf = to_physical(f, side);
    const auto pg = to_physical(g, side);
    const std::size_t npts = pf.size() / static_cast<std::size_t>(cf);
    const int cout = std::max(cf, cg);
    std::vector<double> prod(static_cast<std::size_t>(cout) * npts);
    for (int c = 0; c < cout; ++c) {
        const double* a = pf.data() + static_cast<std::size_t>(cf == 1 ? 0 : c) * npts;
        const double* b = pg.data() + static_cast<std::size_t>(cg == 1 ? 0 : c) * npts;
        double* o = prod.data() + static_cast<std::size_t>(c) * npts;
        for (std::size_t i = 0; i < npts; ++i) o[i] = a[i] * b[i];
    }
    return from_physical(f.grid(), prod, cout, side);
}

/// The d×d tensor u⊗v with entry (k, i) = u_k v_i stored at component k*d + i.
inline FourierField gradient_tensor(const FourierField& u, const FourierField& v, ProductMode mode = ProductMode::Padded) {
    require_same_grid(u, v, "gradient_tensor");
    const int d = u.grid().dim();
    if (u.components() != d || v.components() != d) {
        throw std::invalid_argument("gradient_tensor: operands must be d-component vector fields");
    }
    const int side = product_side(u.grid(), mode);
    const auto pu = to_physical(u, side);
    const auto pv = to_physical(v, side);
    const std::size_t npts = pu.size() / static_cast<std::size_t>(d);
    std::vector<double> prod(static_cast<std::size_t>(d * d) * npts);
    for (int k = 0; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
            const double* a = pu.data() + static_cast<std::size_t>(k) * npts;
            const double* b = pv.data() + static_cast<std::size_t>(i) * npts;
            double* o = prod.data() + static_cast<std::size_t>(k * d + i) * npts;
            for (std::size_t p = 0; p < npts; ++p) o[p] = a[p] * b[p];
        }
    }
    return from_physical(u.grid(), prod, d * d, side);
}

/// Component i of the result is Σ_k ∂_k M_{ki}, i.e. Σ_k (i k_k) M̂_{ki}(k).
inline FourierField divergence_of_tensor(const FourierField& m) {
    const TorusGrid& g = m.grid();
    const int d = g.dim();
    if (m.components() != d * d) throw std::invalid_argument("divergence_of_tensor: expects a d*d-component tensor");
    FourierField out(g, d);
    const Complex I(0.0, 1.0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto idx = g.unflatten(flat);
        for (int i = 0; i < d; ++i) {
            Complex s{};
            for (int k = 0; k < d; ++k) s += g.derivative_wavenumber(idx[k]) * m(k * d + i, flat);
            out(i, flat) = I * s;
        }
    }
    return out;
}

/// Gradient of a scalar field, (i k_a ĝ(k))_a.
inline FourierField gradient(const FourierField& scalar) {
    const TorusGrid& g = scalar.grid();
    if (scalar.components() != 1) throw std::invalid_argument("gradient: expects a scalar field");
    const int d = g.dim();
    FourierField out(g, d);
    const Complex I(0.0, 1.0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto idx = g.unflatten(flat);
        for (int a = 0; a < d; ++a) out(a, flat) = I * g.derivative_wavenumber(idx[a]) * scalar(0, flat);
    }
    return out;
}

/// Leray projection f̂ - k (k·f̂)/|k|² per mode. Modes whose derivative
/// wavevector vanishes (k = 0, pure Nyquist) are left unchanged.
inline FourierField leray_project(const FourierField& f) {
    const TorusGrid& g = f.grid();
    const int d = g.dim();
    if (f.components() != d) throw std::invalid_argument("leray_project: expects a d-component vector field");
    FourierField out = f;
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto idx = g.unflatten(flat);
        double k[3] = {0.0, 0.0, 0.0};
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            k[a] = g.derivative_wavenumber(idx[a]);
            k2 += k[a] * k[a];
        }
        if (k2 == 0.0) continue;
        Complex kf{};
        for (int a = 0; a < d; ++a) kf += k[a] * f(a, flat);
        for (int a = 0; a < d; ++a) out(a, flat) = f(a, flat) - k[a] * kf / k2;
    }
    out.set_divergence_free(true);
    return out;
}

/// e^{tΔ}: multiply every mode by exp(-|k|² t).
inline FourierField heat_semigroup(const FourierField& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: time must be >= 0, got " + std::to_string(t));
    const TorusGrid& g = f.grid();
    FourierField out = f;
    if (t == 0.0) return out;
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const double decay = std::exp(-g.k_squared(flat) * t);
        for (int c = 0; c < f.components(); ++c) out(c, flat) *= decay;
    }
    return out;
}

/// ℙ∇·(M): the Leray-projected tensor divergence that drives the Oseen integral.
inline FourierField projected_divergence(const FourierField& tensor) {
    return leray_project(divergence_of_tensor(tensor));
}

}  // namespace besov_ns
