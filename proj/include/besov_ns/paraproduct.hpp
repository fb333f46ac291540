#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besov_ns/norms.hpp"
#include "besov_ns/oseen.hpp"

namespace besov_ns {

/// Which simplified Bony operator: Π₁(f,g) = Σ_{j≥-1} S_{j+1}f Δ_j g,
/// Π₂(f,g) = Σ_{j≥0} S_j f Δ_j g.
enum class Paraproduct { Pi1, Pi2 };

namespace detail {

inline std::vector<double> paraproduct_physical(Paraproduct kind, const FourierField& f, const FourierField& g,
                                                const DyadicFamily& fam, int& out_components) {
    require_same_grid(f, g, "paraproduct");
    if (!(f.grid() == fam.grid())) throw std::invalid_argument("paraproduct: family built for a different grid");
    const int cf = f.components();
    const int cg = g.components();
    if (cf != cg && cf != 1 && cg != 1) throw std::invalid_argument("paraproduct: incompatible component counts");
    out_components = std::max(cf, cg);
    const std::size_t npts = f.grid().size();
    std::vector<double> acc(static_cast<std::size_t>(out_components) * npts, 0.0);
    const int first = kind == Paraproduct::Pi1 ? -1 : 0;
    for (int j = first; j <= fam.jmax(); ++j) {
        const int low_index = kind == Paraproduct::Pi1 ? j + 1 : j;
        const auto lo = to_physical(low_pass(f, low_index, fam));
        const auto bd = to_physical(block(g, j, fam));
        for (int c = 0; c < out_components; ++c) {
            const double* a = lo.data() + static_cast<std::size_t>(cf == 1 ? 0 : c) * npts;
            const double* b = bd.data() + static_cast<std::size_t>(cg == 1 ? 0 : c) * npts;
            double* o = acc.data() + static_cast<std::size_t>(c) * npts;
            for (std::size_t i = 0; i < npts; ++i) o[i] += a[i] * b[i];
        }
    }
    return acc;
}

}  // namespace detail

/// Π_k(f, g) with products at full grid resolution. Components pair up when
/// counts match; a scalar operand broadcasts.
inline FourierField paraproduct(Paraproduct kind, const FourierField& f, const FourierField& g, const DyadicFamily& fam) {
    int nc = 0;
    const auto acc = detail::paraproduct_physical(kind, f, g, fam, nc);
    return from_physical(f.grid(), acc, nc);
}

inline FourierField pi1(const FourierField& f, const FourierField& g, const DyadicFamily& fam) {
    return paraproduct(Paraproduct::Pi1, f, g, fam);
}

inline FourierField pi2(const FourierField& f, const FourierField& g, const DyadicFamily& fam) {
    return paraproduct(Paraproduct::Pi2, f, g, fam);
}

/// Tensor paraproduct with entry (a, b) = Π_k(u_a, v_b) at component a*d + b.
inline FourierField paraproduct_outer(Paraproduct kind, const FourierField& u, const FourierField& v,
                                      const DyadicFamily& fam) {
    const TorusGrid& grid = u.grid();
    const int d = grid.dim();
    if (u.components() != d || v.components() != d) {
        throw std::invalid_argument("paraproduct_outer: operands must be d-component vector fields");
    }
    const std::size_t npts = grid.size();
    std::vector<double> acc(static_cast<std::size_t>(d * d) * npts, 0.0);
    const int first = kind == Paraproduct::Pi1 ? -1 : 0;
    for (int j = first; j <= fam.jmax(); ++j) {
        const int low_index = kind == Paraproduct::Pi1 ? j + 1 : j;
        const auto lo = to_physical(low_pass(u, low_index, fam));
        const auto bd = to_physical(block(v, j, fam));
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const double* x = lo.data() + static_cast<std::size_t>(a) * npts;
                const double* y = bd.data() + static_cast<std::size_t>(b) * npts;
                double* o = acc.data() + static_cast<std::size_t>(a * d + b) * npts;
                for (std::size_t i = 0; i < npts; ++i) o[i] += x[i] * y[i];
            }
        }
    }
    return from_physical(grid, acc, d * d);
}

/// Exponents of a paraproduct law: Π_k maps B_{q1}^{-σ1,∞} × B_{q2}^{σ2,∞} into
/// B_q^{σ2-σ1,∞} with 1/q = 1/q1 + 1/q2 (and the time analogue with p).
struct ParaproductLawSpec {
    double sigma1 = 0.25;
    double sigma2 = 0.75;
    double q1 = kInf;
    double q2 = kInf;
    double p1 = kInf;
    double p2 = kInf;

    double q() const { return 1.0 / (1.0 / q1 + 1.0 / q2); }
    double p() const { return 1.0 / (1.0 / p1 + 1.0 / p2); }

    void validate() const {
        if (!(sigma1 > 0.0 && sigma2 > sigma1)) {
            throw std::invalid_argument("ParaproductLawSpec: requires 0 < sigma1 < sigma2");
        }
        if (!(q1 >= 1.0 && q2 >= 1.0 && p1 >= 1.0 && p2 >= 1.0)) {
            throw std::invalid_argument("ParaproductLawSpec: integrabilities must be >= 1");
        }
        if (1.0 / q1 + 1.0 / q2 > 1.0 || 1.0 / p1 + 1.0 / p2 > 1.0) {
            throw std::invalid_argument("ParaproductLawSpec: 1/q and 1/p must not exceed 1");
        }
    }
};

/// Largest observed ratio per operator, plus bookkeeping of skipped pairs.
struct LawConstantReport {
    double pi1 = 0.0;
    double pi2 = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;

    double max() const { return std::max(pi1, pi2); }
};

/// max over the corpus of ‖Π_k(f,g)‖_{B_q^{σ2-σ1}} / (‖f‖_{B_{q1}^{-σ1}} ‖g‖_{B_{q2}^{σ2}}).
inline LawConstantReport estimate_law_constant(const ParaproductLawSpec& spec,
                                               std::span<const std::pair<FourierField, FourierField>> corpus,
                                               const DyadicFamily& fam) {
    spec.validate();
    if (corpus.empty()) throw std::invalid_argument("estimate_law_constant: empty corpus");
    LawConstantReport rep;
    const BesovIndex target(spec.sigma2 - spec.sigma1, spec.q());
    for (const auto& [f, g] : corpus) {
        const double den = besov_norm(f, BesovIndex(-spec.sigma1, spec.q1), fam) *
                           besov_norm(g, BesovIndex(spec.sigma2, spec.q2), fam);
        if (den == 0.0) {
            ++rep.skipped;
            continue;
        }
        rep.pi1 = std::max(rep.pi1, besov_norm(pi1(f, g, fam), target, fam) / den);
        rep.pi2 = std::max(rep.pi2, besov_norm(pi2(f, g, fam), target, fam) / den);
        ++rep.evaluated;
    }
    return rep;
}

/// Time-dependent laws. CheminLerner measures both factors in L̃^{p_i}_T B;
/// Lebesgue measures the first factor in L^{p1}_T L^{q1}_x and targets
/// L̃^p_T B_q^{σ2,∞}.
enum class LawVariant { CheminLerner, Lebesgue };

inline TimeTrace paraproduct_trace(Paraproduct kind, const TimeTrace& f, const TimeTrace& g, const DyadicFamily& fam) {
    if (f.size() != g.size()) throw std::invalid_argument("paraproduct_trace: sample count mismatch");
    TimeTrace out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.time(i) != g.time(i)) throw std::invalid_argument("paraproduct_trace: time grids differ");
        out.push_back(f.time(i), paraproduct(kind, f.field(i), g.field(i), fam));
    }
    return out;
}

/// (∫_0^T ‖u(t)‖_q^p dt)^{1/p} by trapezoid; sup over samples for p = ∞.
inline double lebesgue_time_space_norm(const TimeTrace& u, double p, double q, double T) {
    std::vector<double> times, vals;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0 && u.time(i - 1) >= T) break;
        times.push_back(u.time(i));
        vals.push_back(lp_norm(u.field(i), q));
    }
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (times[i] <= T * (1.0 + 1e-12)) m = std::max(m, vals[i]);
        }
        return m;
    }
    for (auto& v : vals) v = std::pow(v, p);
    return std::pow(detail::integrate_linear(times, vals, u.start(), T), 1.0 / p);
}

inline LawConstantReport estimate_law_constant(const ParaproductLawSpec& spec,
                                               std::span<const std::pair<TimeTrace, TimeTrace>> corpus, double T,
                                               const DyadicFamily& fam, LawVariant variant = LawVariant::CheminLerner) {
    spec.validate();
    if (corpus.empty()) throw std::invalid_argument("estimate_law_constant: empty corpus");
    LawConstantReport rep;
    const double target_s = variant == LawVariant::CheminLerner ? spec.sigma2 - spec.sigma1 : spec.sigma2;
    const CheminLernerIndex target(spec.p(), BesovIndex(target_s, spec.q()), T);
    for (const auto& [f, g] : corpus) {
        const double nf = variant == LawVariant::CheminLerner
                              ? chemin_lerner_norm(f, CheminLernerIndex(spec.p1, BesovIndex(-spec.sigma1, spec.q1), T), fam)
                              : lebesgue_time_space_norm(f, spec.p1, spec.q1, T);
        const double ng = chemin_lerner_norm(g, CheminLernerIndex(spec.p2, BesovIndex(spec.sigma2, spec.q2), T), fam);
        const double den = nf * ng;
        if (den == 0.0) {
            ++rep.skipped;
            continue;
        }
        rep.pi1 = std::max(rep.pi1, chemin_lerner_norm(paraproduct_trace(Paraproduct::Pi1, f, g, fam), target, fam) / den);
        rep.pi2 = std::max(rep.pi2, chemin_lerner_norm(paraproduct_trace(Paraproduct::Pi2, f, g, fam), target, fam) / den);
        ++rep.evaluated;
    }
    return rep;
}

/// The linearized operator f ↦ Σ_{k=1,2} 𝕃_Oss(Π_k(u, f)) on a common time grid,
/// with Π_k taken entrywise on the tensor u ⊗ f.
inline TimeTrace apply_linearized(const TimeTrace& u, const TimeTrace& f, const DyadicFamily& fam,
                                  const OseenQuadrature& quad) {
    if (u.size() != f.size()) throw std::invalid_argument("apply_linearized: sample count mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.time(i) != f.time(i)) throw std::invalid_argument("apply_linearized: time grids differ");
    }
    const TorusGrid& grid = u.grid();
    std::vector<FourierField> forcing(u.size(), FourierField(grid, grid.dim()));
    parallel_for(u.size(), [&](std::size_t i) {
        FourierField t = paraproduct_outer(Paraproduct::Pi1, u.field(i), f.field(i), fam);
        t += paraproduct_outer(Paraproduct::Pi2, u.field(i), f.field(i), fam);
        forcing[i] = projected_divergence(t);
    });
    return duhamel_integrate(TimeTrace(grid, u.times(), std::move(forcing)), quad);
}

}  // namespace besov_ns
