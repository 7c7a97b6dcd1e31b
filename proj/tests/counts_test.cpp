#include "noon/counts.hpp"

#include "noon/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace noon;
using counts::CountRecord;
using counts::EfficiencyModel;

namespace {

CountRecord poisson_sample(const CountRecord& means, std::mt19937_64& gen) {
    CountRecord rec;
    rec.exposure = means.exposure;
    rec.a1 = static_cast<double>(rng::sample_poisson(means.a1, gen));
    rec.a2 = static_cast<double>(rng::sample_poisson(means.a2, gen));
    rec.b1 = static_cast<double>(rng::sample_poisson(means.b1, gen));
    rec.b2 = static_cast<double>(rng::sample_poisson(means.b2, gen));
    rec.ab = static_cast<double>(rng::sample_poisson(means.ab, gen));
    rec.cd = static_cast<double>(rng::sample_poisson(means.cd, gen));
    rec.ac = static_cast<double>(rng::sample_poisson(means.ac, gen));
    rec.bd = static_cast<double>(rng::sample_poisson(means.bd, gen));
    return rec;
}

}  // namespace

TEST(NormalizeSingles, AllWeightOnOneState) {
    CountRecord rec;
    rec.a2 = 100.0;
    rec.b1 = 100.0;
    const auto est = counts::normalize_singles(rec);
    ASSERT_TRUE(est.has_value());
    EXPECT_DOUBLE_EQ(est->value, 1.0);
}

TEST(NormalizeSingles, SymmetricCountsGiveHalf) {
    for (double k : {1.0, 17.0, 1e6}) {
        CountRecord rec;
        rec.a1 = rec.a2 = rec.b1 = rec.b2 = k;
        const auto est = counts::normalize_singles(rec);
        ASSERT_TRUE(est.has_value());
        EXPECT_DOUBLE_EQ(est->value, 0.5);
    }
}

TEST(NormalizeSingles, CancelsEfficienciesExactly) {
    // Counts generated exactly from the forward model recover the input
    // probability bit-for-bit up to rounding.
    EfficiencyModel eff;
    eff.eta_a = 0.6;
    eff.eta_b = 0.2;
    eff.n1 = 1e5;
    eff.n2 = 3e4;
    const mzi::OutcomeDistribution dist{0.0, 0.0, 0.0, 1.0};
    const auto rec = counts::forward_model(eff, dist, 0.7, 0.3, 1.0);
    const auto est = counts::normalize_singles(rec);
    ASSERT_TRUE(est.has_value());
    EXPECT_NEAR(est->value, 0.3, 1e-12);
}

TEST(NormalizeSingles, AllZeroSignalsNoData) {
    EXPECT_FALSE(counts::normalize_singles(CountRecord{}).has_value());
}

TEST(NormalizeCoincidences, AllWeightOnCoincidence) {
    CountRecord rec;
    rec.ab = 50.0;
    rec.cd = 50.0;
    const auto est = counts::normalize_coincidences(rec);
    ASSERT_TRUE(est.has_value());
    EXPECT_DOUBLE_EQ(est->value, 1.0);
}

TEST(NormalizeCoincidences, PairPathFactorCancels) {
    // With N11 = N20 + N02 the estimator must return exactly 1/2: the
    // factor 2 on AC/BD makes sqrt(AC * BD) = 2 N20 sqrt(etas), matching
    // the N20 + N02 share of the denominator.
    EfficiencyModel eff;
    eff.eta_a = 0.31;
    eff.eta_b = 0.77;
    eff.eta_c = 0.12;
    eff.eta_d = 0.55;
    eff.n_pairs = 1234.0;
    const mzi::OutcomeDistribution dist{0.5, 0.25, 0.25, 0.0};
    const auto rec = counts::forward_model(eff, dist, 0.5, 0.5, 2.0);
    const auto est = counts::normalize_coincidences(rec);
    ASSERT_TRUE(est.has_value());
    EXPECT_NEAR(est->value, 0.5, 1e-12);
}

TEST(NormalizeCoincidences, PoissonSamplingStaysNearTruth) {
    // p11 = 0.8 with ~1e4 expected coincidences: the estimate lands within
    // 3 delta-method sigmas (about 0.012 here).
    EfficiencyModel eff;
    eff.n_pairs = 6250.0;
    const mzi::OutcomeDistribution dist{0.8, 0.1, 0.1, 0.0};
    const auto means = counts::forward_model(eff, dist, 0.5, 0.5, 1.0);
    std::mt19937_64 gen = rng::make_stream(2024, 0);
    const auto rec = poisson_sample(means, gen);
    const auto est = counts::normalize_coincidences(rec);
    ASSERT_TRUE(est.has_value());
    EXPECT_NEAR(est->value, 0.8, 0.02);
}

TEST(NormalizeCoincidences, AllZeroSignalsNoData) {
    EXPECT_FALSE(counts::normalize_coincidences(CountRecord{}).has_value());
}

TEST(ForwardModel, UnitCase) {
    EfficiencyModel eff;
    const mzi::OutcomeDistribution dist{1.0, 0.0, 0.0, 0.0};
    const auto rec = counts::forward_model(eff, dist, 0.5, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(rec.ab, 1.0);
    EXPECT_DOUBLE_EQ(rec.cd, 1.0);
    EXPECT_DOUBLE_EQ(rec.ac, 0.0);
    EXPECT_DOUBLE_EQ(rec.bd, 0.0);
}

TEST(ForwardModel, LinearInDetectorEfficiency) {
    EfficiencyModel eff;
    eff.eta_a = 0.3;
    eff.eta_b = 0.4;
    eff.eta_c = 0.5;
    eff.eta_d = 0.6;
    eff.n1 = 100.0;
    eff.n2 = 200.0;
    eff.n_pairs = 300.0;
    const mzi::OutcomeDistribution dist{0.4, 0.3, 0.2, 0.1};
    const auto base = counts::forward_model(eff, dist, 0.6, 0.4, 1.5);
    EfficiencyModel doubled = eff;
    doubled.eta_a = 0.6;
    const auto bumped = counts::forward_model(doubled, dist, 0.6, 0.4, 1.5);
    EXPECT_DOUBLE_EQ(bumped.a1, 2.0 * base.a1);
    EXPECT_DOUBLE_EQ(bumped.a2, 2.0 * base.a2);
    EXPECT_DOUBLE_EQ(bumped.ab, 2.0 * base.ab);
    EXPECT_DOUBLE_EQ(bumped.ac, 2.0 * base.ac);
    EXPECT_DOUBLE_EQ(bumped.b1, base.b1);
    EXPECT_DOUBLE_EQ(bumped.b2, base.b2);
    EXPECT_DOUBLE_EQ(bumped.cd, base.cd);
    EXPECT_DOUBLE_EQ(bumped.bd, base.bd);
}

TEST(ForwardModel, PairPathFactorOnBunchedCounts) {
    EfficiencyModel eff;
    eff.n_pairs = 100.0;
    const mzi::OutcomeDistribution dist{0.0, 0.5, 0.5, 0.0};
    const auto rec = counts::forward_model(eff, dist, 0.5, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(rec.ac, 100.0);
    EXPECT_DOUBLE_EQ(rec.bd, 100.0);
    EXPECT_DOUBLE_EQ(rec.ab, 0.0);
}

TEST(Invariance, EstimatorsIgnoreEfficiencyRescaling) {
    // The central claim: rescaling every efficiency and rate leaves both
    // normalized estimators unchanged to machine precision.
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_real_distribution<double> rate(10.0, 1e6);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.05, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        EfficiencyModel eff;
        eff.eta_a = unit(gen);
        eff.eta_b = unit(gen);
        eff.eta_c = unit(gen);
        eff.eta_d = unit(gen);
        eff.n1 = rate(gen);
        eff.n2 = rate(gen);
        eff.n_pairs = rate(gen);
        const double p11 = prob(gen);
        const double rest = 1.0 - p11;
        const double split = prob(gen);
        const mzi::OutcomeDistribution dist{p11, rest * split, rest * (1.0 - split), 0.0};
        const double p10 = prob(gen);

        EfficiencyModel rescaled = eff;
        rescaled.eta_a *= scale(gen);
        rescaled.eta_b *= scale(gen);
        rescaled.eta_c *= scale(gen);
        rescaled.eta_d *= scale(gen);
        rescaled.n1 *= 1.0 + 9.0 * prob(gen);
        rescaled.n2 *= 1.0 + 9.0 * prob(gen);
        rescaled.n_pairs *= 1.0 + 9.0 * prob(gen);

        const auto a = counts::forward_model(eff, dist, p10, 1.0 - p10, 1.0);
        const auto b = counts::forward_model(rescaled, dist, p10, 1.0 - p10, 1.0);
        const auto sa = counts::normalize_singles(a);
        const auto sb = counts::normalize_singles(b);
        ASSERT_TRUE(sa && sb);
        EXPECT_NEAR(sa->value, sb->value, 1e-12);
        const auto ca = counts::normalize_coincidences(a);
        const auto cb = counts::normalize_coincidences(b);
        ASSERT_TRUE(ca && cb);
        EXPECT_NEAR(ca->value, cb->value, 1e-12);
    }
}

TEST(Invariance, EstimatesAlwaysInUnitInterval) {
    std::mt19937_64 gen(72);
    std::uniform_real_distribution<double> count(0.0, 1e5);
    for (int rep = 0; rep < 500; ++rep) {
        CountRecord rec;
        rec.a1 = std::floor(count(gen));
        rec.a2 = std::floor(count(gen));
        rec.b1 = std::floor(count(gen));
        rec.b2 = std::floor(count(gen));
        rec.ab = std::floor(count(gen));
        rec.cd = std::floor(count(gen));
        rec.ac = std::floor(count(gen));
        rec.bd = std::floor(count(gen));
        if (const auto s = counts::normalize_singles(rec)) {
            EXPECT_GE(s->value, 0.0);
            EXPECT_LE(s->value, 1.0);
        }
        if (const auto c = counts::normalize_coincidences(rec)) {
            EXPECT_GE(c->value, 0.0);
            EXPECT_LE(c->value, 1.0);
        }
    }
}

TEST(Invariance, BiasShrinksWithExposure) {
    // Poisson sampling: estimator bias fades as statistics grow 100x.
    EfficiencyModel eff;
    eff.eta_a = 0.4;
    eff.eta_b = 0.6;
    eff.eta_c = 0.5;
    eff.eta_d = 0.7;
    eff.n_pairs = 60.0;
    const mzi::OutcomeDistribution dist{0.65, 0.175, 0.175, 0.0};
    const double truth = 0.65;
    double bias_small = 0.0, bias_large = 0.0;
    const int reps = 800;
    std::mt19937_64 gen = rng::make_stream(5150, 0);
    for (int rep = 0; rep < reps; ++rep) {
        for (double exposure : {1.0, 100.0}) {
            const auto means = counts::forward_model(eff, dist, 0.5, 0.5, exposure);
            const auto rec = poisson_sample(means, gen);
            const auto est = counts::normalize_coincidences(rec);
            if (!est) continue;
            (exposure == 1.0 ? bias_small : bias_large) += est->value - truth;
        }
    }
    bias_small /= reps;
    bias_large /= reps;
    EXPECT_LT(std::abs(bias_large), std::abs(bias_small));
    EXPECT_LT(std::abs(bias_large), 2e-3);
}

TEST(Sigma, DeltaMethodTracksMonteCarloSpread) {
    EfficiencyModel eff;
    eff.n_pairs = 500.0;
    const mzi::OutcomeDistribution dist{0.6, 0.2, 0.2, 0.0};
    const auto means = counts::forward_model(eff, dist, 0.5, 0.5, 1.0);
    const auto predicted = counts::normalize_coincidences(means);
    ASSERT_TRUE(predicted.has_value());

    std::mt19937_64 gen = rng::make_stream(99, 3);
    const int reps = 4000;
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto est = counts::normalize_coincidences(poisson_sample(means, gen));
        ASSERT_TRUE(est.has_value());
        sum += est->value;
        sum_sq += est->value * est->value;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum_sq / reps - mean * mean);
    EXPECT_NEAR(sd, predicted->sigma, 0.15 * predicted->sigma);
}

TEST(Serialization, CsvRoundTrip) {
    CountRecord rec{2.0, 10, 20, 30, 40, 5, 6, 7, 8};
    const auto row = counts::to_csv_row(rec);
    const auto back = counts::count_record_from_csv_row(row);
    EXPECT_DOUBLE_EQ(back.exposure, rec.exposure);
    EXPECT_DOUBLE_EQ(back.a1, rec.a1);
    EXPECT_DOUBLE_EQ(back.bd, rec.bd);
}

TEST(Serialization, CsvRejectsMalformedRows) {
    EXPECT_THROW(counts::count_record_from_csv_row("1,2,3"), std::invalid_argument);
    EXPECT_THROW(counts::count_record_from_csv_row("1,2,3,4,5,6,7,8,abc"),
                 std::invalid_argument);
}

TEST(Serialization, JsonRoundTrip) {
    CountRecord rec{1.5, 1, 2, 3, 4, 5, 6, 7, 8};
    const auto back = counts::count_record_from_json(counts::count_record_to_json(rec));
    EXPECT_DOUBLE_EQ(back.exposure, rec.exposure);
    EXPECT_DOUBLE_EQ(back.ac, rec.ac);
    EXPECT_THROW(counts::count_record_from_json("{\"exposure\": 1.0}"), std::invalid_argument);
}
