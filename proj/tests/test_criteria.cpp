#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "besov_ns/criteria.hpp"
#include "test_support.hpp"

using namespace besov_ns;

namespace {

TimeTrace constant_trace(const FourierField& f, const std::vector<double>& times) {
    TimeTrace u(f.grid());
    for (double t : times) u.push_back(t, f);
    return u;
}

std::vector<double> geometric_then_uniform(double tmin, double dt, double T) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.geometric_decades = std::log2(dt / tmin);
    return cfg.time_grid();
}

FourierField cos_mode(const TorusGrid& g, std::array<int, 3> k) {
    FourierField f(g, 2);
    f(1, g.flat_of_wavevector(k)) = 0.5;
    f(1, g.flat_of_wavevector({-k[0], -k[1], -k[2]})) = 0.5;
    return f;
}

}  // namespace

TEST(Report, VerdictMustReferenceExistingEntries) {
    ExperimentReport rep("x");
    rep.add_scalar("a", 1.0);
    EXPECT_THROW(rep.add_verdict("v", true, {"b"}), std::invalid_argument);
    rep.add_verdict("v", true, {"a"});
    EXPECT_TRUE(rep.passed());
    EXPECT_THROW(rep.add_series("s", {0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST(Report, JsonRoundTripAndProvenanceStripping) {
    ExperimentReport rep("demo");
    rep.add_series("s", {0.0, 0.5}, {1.0, 0.1 + 0.2});
    rep.add_scalar("k", 1.0 / 3.0);
    rep.add_verdict("ok", false, {"s", "k"});
    rep.config()["seed"] = 4;
    rep.provenance()["timestamp"] = "now";
    const auto j = to_json(rep);
    const auto back = report_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_FALSE(back.passed());
    EXPECT_FALSE(to_json(rep, false).contains("provenance"));
    EXPECT_EQ(back.series("s").value[1], 0.1 + 0.2);
}

TEST(Report, PlotDataFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "besov_ns_plot_test";
    std::filesystem::remove_all(dir);
    ExperimentReport rep("p");
    rep.add_series("empty", {}, {});
    rep.add_series("line", {0.0, 1.0}, {2.0, 3.5});
    const auto files = emit_plot_data(rep, dir);
    ASSERT_EQ(files.size(), 2u);
    std::ifstream e(dir / "empty.csv");
    std::stringstream es;
    es << e.rdbuf();
    EXPECT_EQ(es.str(), "t,value\n");
    std::ifstream l(dir / "line.csv");
    std::stringstream ls;
    ls << l.rdbuf();
    EXPECT_EQ(ls.str(), "t,value\n0,2\n1,3.5\n");
    std::filesystem::remove_all(dir);
}

TEST(CriterionParams, Validation) {
    CriterionParams p;
    EXPECT_NO_THROW(p.validate());
    p.r = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = CriterionParams{};
    p.sigma = 0.4;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = CriterionParams{};
    p.sigma = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ThetaWindow, ConstantTraceClosedForm) {
    const TorusGrid g(2, 32);
    const DyadicFamily fam(g);
    const auto f = besov_ns::testing::rough_field(g, 2, 3);
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.025 * i);
    const auto u = constant_trace(f, times);
    for (double r : {0.3, 0.5, 0.9}) {
        const double b = besov_norm(f, BesovIndex(-r, kInf), fam);
        for (double d : {0.1, 0.05, 0.0375}) {
            EXPECT_NEAR(theta_window(u, r, d, fam), std::pow(d, 0.5 * (1.0 - r)) * b, 1e-12 * b) << r << " " << d;
        }
    }
    EXPECT_THROW(theta_window(u, 0.5, 0.6, fam), std::invalid_argument);
}

TEST(ThetaWindow, MonotoneInDeltaAndVanishing) {
    std::vector<double> t, b;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.1, 2.0);
    for (int i = 0; i <= 200; ++i) {
        t.push_back(std::pow(i / 200.0, 2.0));
        b.push_back(uni(rng));
    }
    double prev = kInf;
    for (double d : {0.5, 0.25, 0.1, 0.05, 0.01, 0.001}) {
        const double th = theta_window(t, b, 0.5, d);
        EXPECT_LE(th, prev);
        prev = th;
    }
    EXPECT_LE(prev, std::pow(0.001, 0.25) * 2.0);
}

TEST(ThetaWindow, InfiniteExponentAtREqualsOne) {
    const std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4, 1.0};
    const std::vector<double> b{1.0, 3.0, 2.0, 5.0, 0.5, 9.0};
    EXPECT_EQ(theta_window(t, b, 1.0, 0.1), 5.0);
}

TEST(HMetric, MinusRMatchesWeightedBesovSeries) {
    const TorusGrid g(2, 32);
    const DyadicFamily fam(g);
    const auto f = leray_project(besov_ns::testing::rough_field(g, 2, 8));
    const double r = 0.5;
    const auto u = detail::heat_trace(f, geometric_then_uniform(1e-4, 0.01, 0.2));
    double direct = 0.0;
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (u.time(i) > 0.1) break;
        direct = std::max(direct, std::pow(u.time(i), 0.5 * (1.0 - r)) * besov_norm(u.field(i), BesovIndex(-r, kInf), fam));
    }
    EXPECT_NEAR(h_metric(u, -r, 0.1, fam), direct, 1e-15 * direct);
    EXPECT_THROW(h_metric(u, -r, 0.5, fam), std::invalid_argument);
}

TEST(HMetric, MonotoneInDelta) {
    const TorusGrid g(2, 32);
    const DyadicFamily fam(g);
    const auto f = leray_project(besov_ns::testing::rough_field(g, 2, 9, 0.0));
    const auto u = detail::heat_trace(f, geometric_then_uniform(1e-5, 0.01, 0.2));
    for (double mu : {-0.5, 0.75}) {
        double prev = 0.0;
        for (double d : {0.001, 0.01, 0.05, 0.2}) {
            const double h = h_metric(u, mu, d, fam);
            EXPECT_GE(h, prev);
            prev = h;
        }
    }
}

TEST(RegularityMonitor, HeatFlowOfFiniteModeFieldDecays) {
    const TorusGrid g(2, 32);
    const auto f = leray_project(besov_ns::testing::rough_field(g, 2, 1, 0.5, 6.0));
    const auto u = detail::heat_trace(f, geometric_then_uniform(1e-6, 1e-3, 0.5));
    const auto rep = regularity_monitor(u);
    EXPECT_TRUE(rep.verdict("decays_toward_zero"));
    EXPECT_NEAR(rep.scalar("small_t_slope"), 0.5, 0.05);
    EXPECT_EQ(rep.scalar("decades_used"), 3.0);
}

TEST(RegularityMonitor, InverseSqrtProfileIsRejected) {
    const TorusGrid g(2, 16);
    const auto base = cos_mode(g, {1, 0, 0});
    const auto times = geometric_then_uniform(1e-6, 1e-3, 0.5);
    TimeTrace u(g);
    for (double t : times) u.push_back(t, (t > 0.0 ? 1.0 / std::sqrt(t) : 0.0) * base);
    const auto rep = regularity_monitor(u);
    EXPECT_FALSE(rep.verdict("decays_toward_zero"));
    EXPECT_NEAR(rep.scalar("small_t_slope"), 0.0, 1e-10);
}

TEST(RegularityMonitor, InsufficientResolutionThrows) {
    const std::vector<double> t{0.0, 0.1, 0.2, 0.5};
    const std::vector<double> v{1.0, 1.0, 1.0, 1.0};
    EXPECT_THROW(regularity_monitor(t, v), std::invalid_argument);
}

TEST(BlowupTracker, SyntheticProfileRecoversLiminf) {
    const double t_star = 1.0, A = 2.5;
    for (double r : {0.3, 0.6, 0.9}) {
        std::vector<double> t, b;
        for (int i = 0; i < 60; ++i) {
            const double gap = 0.5 * std::pow(10.0, -6.0 * i / 59.0);
            t.push_back(t_star - gap);
            b.push_back(A * std::pow(gap, -0.5 * (1.0 - r)));
        }
        const auto rep = blowup_tracker(t, b, t_star, r, 1.0);
        EXPECT_NEAR(rep.scalar("liminf_last_decade"), A, 0.01 * A);
        EXPECT_FALSE(rep.verdict("series_tends_to_zero"));
        EXPECT_FALSE(rep.verdict("no_blowup_flag"));
        const auto quiet = blowup_tracker(t, b, t_star, r, 10.0 * A);
        EXPECT_TRUE(quiet.verdict("no_blowup_flag"));
    }
}

TEST(BlowupTracker, TailIntegralGrowsLogarithmically) {
    const double t_star = 1.0, A = 1.0, r = 0.5;
    double prev = 0.0;
    for (int digits : {2, 4, 6, 8}) {
        std::vector<double> t, b;
        for (int i = 0; i < 400; ++i) {
            const double gap = 0.5 * std::pow(10.0, -digits * i / 399.0);
            t.push_back(t_star - gap);
            b.push_back(A * std::pow(gap, -0.5 * (1.0 - r)));
        }
        const double got = blowup_tracker(t, b, t_star, r, 1.0).scalar("tail_integral");
        // ∫ (T*-t)^{-1} dt from gap 0.5 down to 0.5·10^{-digits}
        const double exact = std::log(std::pow(10.0, digits));
        EXPECT_NEAR(got, exact, 0.01 * exact);
        EXPECT_GT(got, prev);
        prev = got;
    }
}

TEST(BlowupTracker, BoundedSeriesIsNotFlagged) {
    std::vector<double> t, b;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.02 * i);
        b.push_back(1.0 + 0.1 * std::sin(7.0 * i));
    }
    const auto rep = blowup_tracker(t, b, 1.0, 0.5, 1e-3);
    EXPECT_TRUE(rep.verdict("series_tends_to_zero"));
    EXPECT_TRUE(rep.verdict("no_blowup_flag"));
    EXPECT_THROW(blowup_tracker(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0), 1.0, 0.5, 1.0),
                 std::invalid_argument);
}

TEST(BlowupTracker, SmoothSolverRunIsNotFlagged) {
    SolverConfig cfg;
    cfg.grid = TorusGrid(2, 32);
    cfg.T = 0.3;
    cfg.dt = 0.01;
    cfg.n_picard = 6;
    const auto u = picard_solve(random_besov_field(cfg.grid, -0.5, 11, 0.5), cfg).solution;
    const auto rep = blowup_tracker(u, 0.5, 1e-3, DyadicFamily(cfg.grid));
    EXPECT_TRUE(rep.verdict("no_blowup_flag"));
    EXPECT_TRUE(rep.verdict("series_tends_to_zero"));
}

TEST(Bootstrap, ConstantSeries) {
    const auto res = bootstrap_check(std::vector<double>(20, 0.3), 0.3, 0.5);
    EXPECT_TRUE(res.hypotheses_met);
    ASSERT_TRUE(res.verdict.has_value());
    EXPECT_TRUE(*res.verdict);
}

TEST(Bootstrap, QuadraticRootFamily) {
    for (double A : {0.1, 0.5, 1.0}) {
        for (double frac : {0.1, 0.5, 0.99}) {
            const double B = frac / (4.0 * A);
            const double root = (1.0 - std::sqrt(1.0 - 4.0 * A * B)) / (2.0 * B);
            std::vector<double> f;
            for (int i = 0; i <= 100; ++i) f.push_back(root * i / 100.0);
            const auto res = bootstrap_check(f, A, B);
            ASSERT_TRUE(res.hypotheses_met) << res.reason;
            EXPECT_TRUE(*res.verdict);
            EXPECT_LE(root, 2.0 * A);
            EXPECT_NEAR(res.lower_root, root, 1e-12 * root);
        }
    }
}

TEST(Bootstrap, GateRejections) {
    const double A = 0.5, B = 0.4;
    std::vector<double> jump(10, A);
    jump[5] = 3.0 * A;  // A + B(3A)² = 1.4 < 1.5: inside the forbidden gap
    auto res = bootstrap_check(jump, A, B);
    EXPECT_FALSE(res.hypotheses_met);
    EXPECT_FALSE(res.verdict.has_value());
    std::vector<double> over(10, A);
    over[5] = 10.0;  // above the gap but reached by a jump
    res = bootstrap_check(over, A, B);
    EXPECT_FALSE(res.hypotheses_met);
    EXPECT_NE(res.reason.find("gap"), std::string::npos);
    res = bootstrap_check(std::vector<double>(5, 0.1), 1.0, 0.25);
    EXPECT_FALSE(res.hypotheses_met);
    EXPECT_EQ(res.reason, "4AB >= 1");
    res = bootstrap_check({3.0, 0.1}, 1.0, 0.1);
    EXPECT_EQ(res.reason, "f(0) > 2A");
}

TEST(Persistence, HeatFlowKeepsTheDataNorm) {
    SolverConfig cfg;
    cfg.grid = TorusGrid(2, 32);
    cfg.T = 0.2;
    cfg.dt = 0.01;
    cfg.nonlinear = false;
    const auto rep = persistence_check(random_besov_field(cfg.grid, -0.5, 4), cfg, 0.5, 1.2);
    EXPECT_NEAR(rep.scalar("ratio"), 1.0, 1e-12);
    EXPECT_TRUE(rep.verdict("bounded_by_data"));
}

TEST(Persistence, TaylorGreenSeriesDecaysExactly) {
    SolverConfig cfg;
    cfg.grid = TorusGrid(2, 32);
    cfg.T = 0.2;
    cfg.dt = 0.01;
    cfg.n_picard = 2;
    const auto rep = persistence_check(taylor_green(cfg.grid), cfg, 0.5, 1.2);
    const auto& s = rep.series("besov_minus_r_norm");
    for (std::size_t i = 0; i < s.t.size(); ++i) EXPECT_NEAR(s.value[i], std::exp(-2.0 * s.t[i]) * s.value[0], 1e-10);
}

TEST(Persistence, ZeroDataGivesZeroSeries) {
    SolverConfig cfg;
    cfg.grid = TorusGrid(2, 16);
    cfg.T = 0.1;
    cfg.dt = 0.02;
    const auto rep = persistence_check(FourierField(cfg.grid, 2), cfg, 0.5, 1.2);
    for (double v : rep.series("besov_minus_r_norm").value) EXPECT_EQ(v, 0.0);
}

TEST(ZDelta, ConstantTraceClosedForm) {
    const TorusGrid g(2, 32);
    const DyadicFamily fam(g);
    const auto f = besov_ns::testing::rough_field(g, 2, 12);
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(0.01 * i);
    const auto u = constant_trace(f, times);
    const double r = 0.5, d = 0.05;
    const double a = std::pow(d, 0.5 * (1.0 + r)) * besov_norm(f, BesovIndex(1.0 + r, 4.0), fam);
    const double b = std::pow(d, 0.5 * (1.0 - r)) * besov_norm(f, BesovIndex(-r, kInf), fam);
    EXPECT_NEAR(z_delta_norm(u, r, 4.0, d, fam), std::max(a, b), 1e-12 * std::max(a, b));
}

TEST(Uniqueness, IdenticalVariantsGiveZeroDifference) {
    UniquenessConfig uc;
    uc.base.grid = TorusGrid(2, 16);
    uc.base.T = 0.2;
    uc.base.dt = 0.02;
    uc.base.n_picard = 2;
    uc.picard_factor_b = 1;
    const auto rep = uniqueness_experiment(random_besov_field(uc.base.grid, -0.5, 1, 0.3), uc, CriterionParams{});
    EXPECT_EQ(rep.scalar("max_difference"), 0.0);
    EXPECT_TRUE(rep.verdict("difference_shrinks"));
    EXPECT_EQ(rep.scalar("contraction_from_linearization"), 1.0);
}

TEST(Uniqueness, TaylorGreenDifferenceIsTiny) {
    UniquenessConfig uc;
    uc.base.grid = TorusGrid(2, 16);
    uc.base.T = 0.2;
    uc.base.dt = 0.01;
    uc.base.n_picard = 3;
    const auto rep = uniqueness_experiment(taylor_green(uc.base.grid), uc, CriterionParams{});
    EXPECT_LE(rep.scalar("max_difference"), 1e-8);
    EXPECT_TRUE(rep.verdict("difference_shrinks"));
    EXPECT_TRUE(rep.verdict("contraction_below_one"));
}

TEST(Uniqueness, SmallRandomDataRefinement) {
    UniquenessConfig uc;
    uc.base.grid = TorusGrid(2, 16);
    uc.base.T = 0.2;
    uc.base.dt = 0.01;
    uc.base.n_picard = 3;
    const auto rep = uniqueness_experiment(random_besov_field(uc.base.grid, -0.5, 2, 0.3), uc, CriterionParams{});
    EXPECT_GE(rep.scalar("min_reduction_per_level"), 10.0);
    EXPECT_TRUE(rep.verdict("difference_shrinks"));
    EXPECT_LT(rep.scalar("contraction_factor"), 1.0);
    EXPECT_EQ(rep.scalar("contraction_from_linearization"), 0.0);
}

TEST(Chain, VerdictsAreConditionalOnSmallness) {
    const TorusGrid g(2, 16);
    const DyadicFamily fam(g);
    const auto f = leray_project(besov_ns::testing::rough_field(g, 2, 3));
    const auto u = detail::heat_trace(f, geometric_then_uniform(1e-5, 0.01, 0.3));
    CriterionParams p;
    // threshold 1/(2C1) far below Θ(δ0): the bounds are not in force
    const auto big = chain_check(u, p, 1e6, 1e-6, fam);
    EXPECT_FALSE(big.verdict("theta_small"));
    EXPECT_TRUE(big.verdict("h_sigma_bound"));
    EXPECT_TRUE(big.verdict("h_minus_r_bound"));
    const double th = big.scalar("theta_delta0");
    const auto tight = chain_check(u, p, 0.25 / th, 1e6, fam);
    EXPECT_TRUE(tight.verdict("theta_small"));
    EXPECT_TRUE(tight.verdict("h_minus_r_bound"));
}
