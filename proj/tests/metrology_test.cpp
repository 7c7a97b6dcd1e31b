#include "noon/metrology.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace noon;

namespace {

const mzi::MziConfig kLosslessBalanced{0.5, 0.5, 1.0, 1.0, 0.0};
const mzi::MziConfig kPaperDevice{0.5, 0.5, 0.61, 1.0, 0.0};

double central_difference(const mzi::MziConfig& config, double phi, double h) {
    return (mzi::coincidence_probability(config, phi + h) -
            mzi::coincidence_probability(config, phi - h)) /
           (2.0 * h);
}

}  // namespace

TEST(OutcomeVariance, KnownValues) {
    EXPECT_DOUBLE_EQ(metrology::outcome_variance(0.0), 0.0);
    EXPECT_DOUBLE_EQ(metrology::outcome_variance(0.5), 0.25);
    EXPECT_DOUBLE_EQ(metrology::outcome_variance(0.25), 0.1875);
    EXPECT_THROW(metrology::outcome_variance(-0.1), std::invalid_argument);
    EXPECT_THROW(metrology::outcome_variance(1.1), std::invalid_argument);
}

TEST(PhaseVariance, HeisenbergPointOfLosslessDevice) {
    // P = cos^2(phi): at phi = pi/4, P = 1/2, variance 1/4, slope -1, so
    // delta(phi) = 1/2, the two-photon Heisenberg limit.
    const auto var = metrology::phase_variance(kLosslessBalanced, std::numbers::pi / 4.0);
    ASSERT_TRUE(var.has_value());
    EXPECT_NEAR(*var, 0.25, 1e-12);
}

TEST(PhaseVariance, UninformativeAtStationaryPhase) {
    EXPECT_FALSE(metrology::phase_variance(kLosslessBalanced, 0.0).has_value());
}

TEST(PhaseVariance, LossDegradesTheOptimum) {
    // The best delta(phi) of the lossy device stays above the lossless 0.5.
    const double s = metrology::sensitivity(kPaperDevice);
    EXPECT_GT(1.0 / s, 0.5);
}

TEST(Sensitivity, HeisenbergLimitAtLosslessBalanced) {
    EXPECT_NEAR(metrology::sensitivity(kLosslessBalanced), 2.0, 1e-6);
}

TEST(Sensitivity, NoSplittingMeansNoInformation) {
    EXPECT_DOUBLE_EQ(metrology::sensitivity({0.0, 0.5, 1.0, 1.0, 0.0}), 0.0);
}

TEST(Sensitivity, DerivativeMatchesFiniteDifferences) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> phase(-6.3, 6.3);
    for (int rep = 0; rep < 200; ++rep) {
        const auto config = test::random_config(gen);
        const double phi = phase(gen);
        const double analytic = mzi::coincidence_probability_derivative(config, phi);
        const double fd = central_difference(config, phi, 1e-6);
        EXPECT_LE(std::abs(analytic - fd), 1e-6 * std::max(std::abs(analytic), 1e-3));
    }
}

TEST(Sensitivity, HeisenbergBoundHoldsEverywhere) {
    std::mt19937_64 gen(22);
    for (int rep = 0; rep < 150; ++rep) {
        const auto config = test::random_config(gen);
        const double s = metrology::sensitivity(config);
        EXPECT_LE(s, 2.0 + 1e-9);
        if (std::min(config.tau1, config.tau2) <= 0.99) {
            EXPECT_LT(s, 2.0 - 1e-6);
        }
    }
}

TEST(Sensitivity, MonotoneDegradationWithLoss) {
    double previous = metrology::sensitivity({0.5, 0.5, 1.0, 1.0, 0.0});
    for (int i = 9; i >= 1; --i) {
        const double tau1 = 0.1 * i;
        const double s = metrology::sensitivity({0.5, 0.5, tau1, 1.0, 0.0});
        EXPECT_LE(s, previous + 1e-9);
        previous = s;
    }
}

TEST(SensitivityMap, LosslessOptimumAtBalancedCouplers) {
    const auto map = metrology::sensitivity_map(1.0, 1.0, 51);
    EXPECT_DOUBLE_EQ(map.r1_at(map.argmax_row), 0.5);
    EXPECT_DOUBLE_EQ(map.r2_at(map.argmax_col), 0.5);
    EXPECT_NEAR(map.values(map.argmax_row, map.argmax_col), 2.0, 1e-6);
}

TEST(SensitivityMap, SymmetricUnderCouplerSwap) {
    const auto map = metrology::sensitivity_map(1.0, 1.0, 21);
    double asym = 0.0;
    for (int i = 0; i < 21; ++i) {
        for (int j = 0; j < 21; ++j) {
            asym = std::max(asym, std::abs(map.values(i, j) - map.values(j, i)));
        }
    }
    EXPECT_LE(asym, 1e-9);
}

TEST(SensitivityMap, SymmetricAlsoWithBalancedLoss) {
    const auto map = metrology::sensitivity_map(0.7, 0.7, 15);
    double asym = 0.0;
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            asym = std::max(asym, std::abs(map.values(i, j) - map.values(j, i)));
        }
    }
    EXPECT_LE(asym, 1e-9);
}

TEST(SensitivityMap, BoundariesNeverBeatInterior) {
    const auto map = metrology::sensitivity_map(1.0, 1.0, 21);
    const double interior_max = map.values(map.argmax_row, map.argmax_col);
    const int n = map.grid_n();
    for (int k = 0; k < n; ++k) {
        EXPECT_LE(map.values(0, k), interior_max);
        EXPECT_LE(map.values(n - 1, k), interior_max);
        EXPECT_LE(map.values(k, 0), interior_max);
        EXPECT_LE(map.values(k, n - 1), interior_max);
    }
}

TEST(SensitivityMap, RejectsTinyGrids) {
    EXPECT_THROW(metrology::sensitivity_map(1.0, 1.0, 2), std::invalid_argument);
}

TEST(Limits, KnownValues) {
    const auto two = metrology::limits(2);
    EXPECT_NEAR(two.sql, 0.7071, 5e-5);
    EXPECT_DOUBLE_EQ(two.heisenberg, 0.5);
    const auto one = metrology::limits(1);
    EXPECT_DOUBLE_EQ(one.sql, 1.0);
    EXPECT_DOUBLE_EQ(one.heisenberg, 1.0);
    const auto hundred = metrology::limits(100);
    EXPECT_DOUBLE_EQ(hundred.sql, 0.1);
    EXPECT_DOUBLE_EQ(hundred.heisenberg, 0.01);
    EXPECT_THROW(metrology::limits(0), std::invalid_argument);
}

TEST(Limits, RatioIsSqrtN) {
    for (int n : {1, 2, 3, 4, 9, 16, 100}) {
        const auto lim = metrology::limits(n);
        EXPECT_DOUBLE_EQ(lim.sql / lim.heisenberg, std::sqrt(static_cast<double>(n)));
    }
}

TEST(Supersensitivity, ThresholdValueAndFlags) {
    EXPECT_NEAR(metrology::supersensitivity_threshold(), 0.70711, 1e-5);
    EXPECT_TRUE(metrology::exceeds_supersensitivity(0.82));
    EXPECT_FALSE(metrology::exceeds_supersensitivity(0.70));
    EXPECT_FALSE(metrology::exceeds_supersensitivity(0.5));
}
