#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "besov_ns/littlewood_paley.hpp"
#include "test_support.hpp"

using namespace besov_ns;

TEST(Profile, HalfwayValuesAndSupport) {
    // χ(1.5) = h(0.5)/(h(0.5)+h(0.5)) = 1/2
    EXPECT_DOUBLE_EQ(profile::phi(1.5), 0.5);
    EXPECT_DOUBLE_EQ(profile::psi(3.0), 0.5);
    EXPECT_DOUBLE_EQ(profile::psi(1.5), 0.5);
    EXPECT_EQ(profile::phi(0.0), 1.0);
    EXPECT_EQ(profile::phi(1.0), 1.0);
    EXPECT_EQ(profile::phi(2.0), 0.0);
    EXPECT_EQ(profile::psi(1.0), 0.0);
    EXPECT_EQ(profile::psi(4.0), 0.0);
    EXPECT_EQ(profile::psi(2.0), 1.0);
}

TEST(Profile, PhiIsMonotoneNonincreasing) {
    double prev = 1.0;
    for (int i = 0; i <= 400; ++i) {
        const double v = profile::phi(0.5 + i * 0.005);
        EXPECT_LE(v, prev + 1e-16);
        EXPECT_GE(v, 0.0);
        prev = v;
    }
}

namespace {

/// Largest j whose band ψ(·/2^j) is nonzero at some lattice mode, by exhaustive scan.
int scanned_jmax(const TorusGrid& g) {
    int best = -1;
    for (int j = 0; j < 30; ++j) {
        for (std::size_t flat = 0; flat < g.size(); ++flat) {
            if (profile::psi(std::sqrt(g.k_squared(flat)) / std::ldexp(1.0, j)) > 0.0) {
                best = j;
                break;
            }
        }
    }
    return best;
}

}  // namespace

TEST(DyadicFamily, JmaxMatchesLatticeScan) {
    for (auto [d, n] : {std::pair{2, 8}, {2, 32}, {2, 64}, {2, 128}, {3, 8}, {3, 16}, {3, 32}}) {
        const TorusGrid g(d, n);
        EXPECT_EQ(DyadicFamily(g).jmax(), scanned_jmax(g)) << "d=" << d << " N=" << n;
    }
    EXPECT_EQ(DyadicFamily(TorusGrid(2, 64)).jmax(), 5);
}

TEST(DyadicFamily, PartitionOfUnityOnEveryMode) {
    for (auto [d, n] : {std::pair{2, 64}, {3, 16}}) {
        const DyadicFamily fam{TorusGrid(d, n)};
        for (std::size_t flat = 0; flat < fam.grid().size(); ++flat) {
            double s = 0.0;
            for (int j = -1; j <= fam.jmax(); ++j) s += fam.block_profile(j)[flat];
            EXPECT_NEAR(s, 1.0, 1e-15);
        }
    }
}

TEST(DyadicFamily, BlocksLiveInDyadicAnnuli) {
    const DyadicFamily fam{TorusGrid(2, 64)};
    const auto r = fam.radii();
    for (int j = 0; j < fam.jmax(); ++j) {
        const auto b = fam.block_profile(j);
        for (std::size_t flat = 0; flat < r.size(); ++flat) {
            if (b[flat] != 0.0) {
                EXPECT_GT(r[flat], std::ldexp(1.0, j));
                EXPECT_LT(r[flat], std::ldexp(4.0, j));
            }
        }
    }
    const auto low = fam.block_profile(-1);
    for (std::size_t flat = 0; flat < r.size(); ++flat) {
        if (low[flat] != 0.0) {
            EXPECT_LT(r[flat], 2.0);
        }
    }
}

TEST(DyadicFamily, LowPassTelescopes) {
    const DyadicFamily fam{TorusGrid(2, 32)};
    for (int j = 0; j <= fam.jmax() + 3; ++j) {
        const auto lp = fam.low_pass_profile(j);
        for (std::size_t flat = 0; flat < fam.grid().size(); ++flat) {
            double s = 0.0;
            for (int i = -1; i < std::min(j, fam.jmax() + 1); ++i) s += fam.block_profile(i)[flat];
            EXPECT_NEAR(lp[flat], s, 1e-15);
        }
    }
    const auto id = fam.low_pass_profile(fam.jmax() + 1);
    for (double v : id) EXPECT_EQ(v, 1.0);
}

TEST(DyadicFamily, IndexErrors) {
    const DyadicFamily fam{TorusGrid(2, 32)};
    EXPECT_THROW(fam.block_profile(-2), std::out_of_range);
    EXPECT_THROW(fam.block_profile(fam.jmax() + 1), std::out_of_range);
    EXPECT_THROW(fam.low_pass_profile(-1), std::out_of_range);
    FourierField f(TorusGrid(2, 64), 1);
    EXPECT_THROW(block(f, 0, fam), std::invalid_argument);
}

TEST(DyadicFamily, ReconstructionOfRandomFields) {
    const TorusGrid g(2, 64);
    const DyadicFamily fam(g);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = besov_ns::testing::rough_field(g, 2, seed, 0.0);
        FourierField sum(g, 2);
        for (int j = -1; j <= fam.jmax(); ++j) sum += block(f, j, fam);
        EXPECT_LT(max_coefficient_difference(sum, f), 1e-13);
    }
}

TEST(DyadicFamily, SingleModeSeesExpectedBlocks) {
    const TorusGrid g(2, 64);
    const DyadicFamily fam(g);
    const auto f = besov_ns::testing::sample(g, 1, [](int, double x, double, double) { return std::cos(8.0 * x); });
    for (int j = -1; j <= fam.jmax(); ++j) {
        const double weight = j == 2 ? 1.0 : 0.0;  // ψ(8/4) = 1, other bands vanish at |k| = 8
        EXPECT_NEAR(max_coefficient_abs(block(f, j, fam)), 0.5 * weight, 1e-15) << "j=" << j;
    }
}

TEST(DyadicFamily, CsvHasHeaderAndOneRowPerMode) {
    const DyadicFamily fam{TorusGrid(2, 8)};
    std::ostringstream os;
    fam.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line.rfind("k0,k1,radius,block_-1", 0), 0u);
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, fam.grid().size());
}
