#include "noon/experiment.hpp"

#include "noon/manifest.hpp"
#include "noon/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace noon;

namespace {

const mzi::MziConfig kPaperDevice{0.5, 0.5, 0.61, 1.0, 0.0};
const sim::SampleModel kPaperSample{0.785, 55.0, 1.79e-3, 0.0};

sim::RunPlan paper_plan(std::uint64_t seed) {
    sim::RunPlan plan;
    for (int k = 0; k < 15; ++k) plan.concentrations.push_back(0.5 * k);
    plan.exposure_s = 1.0;
    plan.pair_rate_hz = 1.5e4;
    plan.seed = seed;
    return plan;
}

std::string sweep_to_string(const std::vector<sim::SweepPoint>& sweep) {
    std::ostringstream out;
    sim::write_sweep_csv(out, sweep);
    return out.str();
}

}  // namespace

TEST(PhaseMap, OffsetAtZeroConcentration) {
    sim::SampleModel sample = kPaperSample;
    sample.phi_offset = 0.42;
    EXPECT_DOUBLE_EQ(sim::concentration_to_phase(sample, 0.0), 0.42);
}

TEST(PhaseMap, PaperScaleFactor) {
    // 2 pi * 55 / 0.785 * 1.79e-3 per percent.
    EXPECT_NEAR(sim::concentration_to_phase(kPaperSample, 1.0), 0.7879994821552, 1e-9);
    EXPECT_NEAR(sim::concentration_to_phase(kPaperSample, 7.0), 5.5159963750864, 1e-9);
}

TEST(PhaseMap, RejectsBadSample) {
    EXPECT_THROW(sim::concentration_to_phase({0.0, 55.0, 1.79e-3, 0.0}, 1.0),
                 std::invalid_argument);
}

TEST(Sweep, ZeroPairRateGivesAllZeroRecords) {
    sim::RunPlan plan = paper_plan(1);
    plan.pair_rate_hz = 0.0;
    const auto sweep = sim::simulate_sweep(plan, kPaperDevice, kPaperSample);
    ASSERT_EQ(sweep.size(), 15u);
    for (const auto& point : sweep) {
        EXPECT_EQ(point.record.a1, 0.0);
        EXPECT_EQ(point.record.b2, 0.0);
        EXPECT_EQ(point.record.ab, 0.0);
        EXPECT_EQ(point.record.bd, 0.0);
    }
}

TEST(Sweep, DeterministicGivenSeed) {
    const auto a = sim::simulate_sweep(paper_plan(77), kPaperDevice, kPaperSample);
    const auto b = sim::simulate_sweep(paper_plan(77), kPaperDevice, kPaperSample);
    EXPECT_EQ(sweep_to_string(a), sweep_to_string(b));
    const auto c = sim::simulate_sweep(paper_plan(78), kPaperDevice, kPaperSample);
    EXPECT_NE(sweep_to_string(a), sweep_to_string(c));
}

TEST(Sweep, SampleMeansMatchForwardModel) {
    sim::RunPlan plan = paper_plan(303);
    plan.concentrations = {2.5};
    plan.pair_rate_hz = 1.0e3;
    const auto expected = sim::expected_sweep(plan, kPaperDevice, kPaperSample);
    ASSERT_EQ(expected.size(), 1u);
    const auto& m = expected[0].record;

    const int reps = 10000;
    double sums[8] = {0};
    for (int rep = 0; rep < reps; ++rep) {
        plan.seed = 90000 + static_cast<std::uint64_t>(rep);
        const auto sweep = sim::simulate_sweep(plan, kPaperDevice, kPaperSample);
        const auto& r = sweep[0].record;
        const double vals[8] = {r.a1, r.a2, r.b1, r.b2, r.ab, r.cd, r.ac, r.bd};
        for (int i = 0; i < 8; ++i) sums[i] += vals[i];
    }
    const double means[8] = {m.a1, m.a2, m.b1, m.b2, m.ab, m.cd, m.ac, m.bd};
    for (int i = 0; i < 8; ++i) {
        const double got = sums[i] / reps;
        const double tol = 5.0 * std::sqrt(means[i]) / std::sqrt(static_cast<double>(reps));
        EXPECT_NEAR(got, means[i], tol) << "count index " << i;
    }
}

TEST(HomScan, FarDelaySitsAtDistinguishableBaseline) {
    sim::RunPlan plan = paper_plan(5);
    plan.pair_rate_hz = 1.0e4;
    const std::vector<double> delays = {-1e4, 0.0, 1e4};
    const auto scan = sim::expected_hom_scan(delays, 50.0, kPaperDevice, plan);
    const double baseline = mzi::distinguishable_coincidence_probability(
                                kPaperDevice, std::numbers::pi / 2.0) *
                            plan.pair_rate_hz;
    EXPECT_NEAR(scan.front().coincidences, baseline, 1e-6 * baseline);
    EXPECT_NEAR(scan.back().coincidences, baseline, 1e-6 * baseline);
}

TEST(HomScan, LosslessSymmetricDipsToZero) {
    sim::RunPlan plan = paper_plan(5);
    plan.pair_rate_hz = 1.0e4;
    const mzi::MziConfig lossless{0.5, 0.5, 1.0, 1.0, 0.0};
    const auto scan = sim::expected_hom_scan({0.0}, 50.0, lossless, plan);
    EXPECT_NEAR(scan[0].coincidences, 0.0, 1e-9);
}

TEST(HomScan, NoiselessDipVisibilityHitsLossBound) {
    sim::RunPlan plan = paper_plan(5);
    plan.pair_rate_hz = 1.0e4;
    // Wings at 10 coherence scales so the baseline is fully distinguishable.
    std::vector<double> delays;
    for (int k = -30; k <= 30; ++k) delays.push_back(20.0 * k);
    const auto scan = sim::expected_hom_scan(delays, 60.0, kPaperDevice, plan);
    double base = scan.front().coincidences, dip = base;
    for (const auto& pt : scan) dip = std::min(dip, pt.coincidences);
    EXPECT_NEAR(1.0 - dip / base, 0.8826434165, 1e-9);
}

TEST(HomScan, Deterministic) {
    sim::RunPlan plan = paper_plan(123);
    plan.pair_rate_hz = 2.0e3;
    std::vector<double> delays;
    for (int k = -10; k <= 10; ++k) delays.push_back(25.0 * k);
    const auto a = sim::simulate_hom_scan(delays, 60.0, kPaperDevice, plan);
    const auto b = sim::simulate_hom_scan(delays, 60.0, kPaperDevice, plan);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].coincidences, b[i].coincidences);
    }
}

TEST(Drift, UnitFactorsChangeNothing) {
    const auto base = sim::expected_sweep(paper_plan(9), kPaperDevice, kPaperSample);
    const std::vector<sim::EfficiencyScale> walk(base.size());
    const auto scaled = sim::inject_drift(base, walk);
    for (std::size_t k = 0; k < base.size(); ++k) {
        EXPECT_DOUBLE_EQ(scaled[k].record.ab, base[k].record.ab);
        EXPECT_DOUBLE_EQ(scaled[k].record.a1, base[k].record.a1);
    }
}

TEST(Drift, ZeroFactorIsRejected) {
    sim::EfficiencyScale bad;
    bad.eta_a = 0.0;
    EXPECT_THROW(sim::apply_scale(counts::CountRecord{}, bad), std::invalid_argument);
}

TEST(Drift, ScalePropagatesThroughEtaStructure) {
    counts::CountRecord rec{1.0, 10, 10, 10, 10, 100, 100, 100, 100};
    sim::EfficiencyScale s;
    s.eta_a = 2.0;
    const auto out = sim::apply_scale(rec, s);
    EXPECT_DOUBLE_EQ(out.a1, 20.0);
    EXPECT_DOUBLE_EQ(out.a2, 20.0);
    EXPECT_DOUBLE_EQ(out.ab, 200.0);
    EXPECT_DOUBLE_EQ(out.ac, 200.0);
    EXPECT_DOUBLE_EQ(out.b1, 10.0);
    EXPECT_DOUBLE_EQ(out.cd, 100.0);
    EXPECT_DOUBLE_EQ(out.bd, 100.0);
}

TEST(Drift, WalkOnOneDetectorLeavesEstimatorUnbiased) {
    // +-20% multiplicative walk on eta_A: the normalized coincidence
    // estimate must not shift beyond its own statistical error.
    sim::RunPlan plan = paper_plan(31);
    plan.pair_rate_hz = 4.0e3;

    std::mt19937_64 walk_gen(555);
    std::uniform_real_distribution<double> step(0.8, 1.2);
    const int reps = 100;
    double sum_plain = 0.0, sum_drift = 0.0, sum_sq_plain = 0.0, sum_sq_drift = 0.0;
    int n = 0;
    for (int rep = 0; rep < reps; ++rep) {
        plan.seed = 7000 + static_cast<std::uint64_t>(rep);
        auto means = sim::expected_sweep(plan, kPaperDevice, kPaperSample);

        std::vector<sim::EfficiencyScale> walk(means.size());
        double factor = 1.0;
        for (auto& w : walk) {
            factor *= step(walk_gen);
            w.eta_a = factor;
        }
        auto drifted = sim::inject_drift(means, walk);

        // Sample both streams with the same per-step RNG derivation.
        for (std::size_t k = 0; k < means.size(); ++k) {
            std::mt19937_64 g1 = rng::make_stream(plan.seed, k);
            std::mt19937_64 g2 = rng::make_stream(plan.seed ^ 0xABCD, k);
            counts::CountRecord r1, r2;
            r1.ab = static_cast<double>(rng::sample_poisson(means[k].record.ab, g1));
            r1.cd = static_cast<double>(rng::sample_poisson(means[k].record.cd, g1));
            r1.ac = static_cast<double>(rng::sample_poisson(means[k].record.ac, g1));
            r1.bd = static_cast<double>(rng::sample_poisson(means[k].record.bd, g1));
            r2.ab = static_cast<double>(rng::sample_poisson(drifted[k].record.ab, g2));
            r2.cd = static_cast<double>(rng::sample_poisson(drifted[k].record.cd, g2));
            r2.ac = static_cast<double>(rng::sample_poisson(drifted[k].record.ac, g2));
            r2.bd = static_cast<double>(rng::sample_poisson(drifted[k].record.bd, g2));
            const auto e1 = counts::normalize_coincidences(r1);
            const auto e2 = counts::normalize_coincidences(r2);
            if (!e1 || !e2) continue;
            sum_plain += e1->value;
            sum_drift += e2->value;
            sum_sq_plain += e1->value * e1->value;
            sum_sq_drift += e2->value * e2->value;
            ++n;
        }
    }
    const double mean_plain = sum_plain / n;
    const double mean_drift = sum_drift / n;
    const double var_plain = sum_sq_plain / n - mean_plain * mean_plain;
    const double var_drift = sum_sq_drift / n - mean_drift * mean_drift;
    const double sigma_diff = std::sqrt((var_plain + var_drift) / n);
    EXPECT_LT(std::abs(mean_drift - mean_plain), sigma_diff);
}

TEST(Drift, PlanLevelDriftIsDeterministic) {
    sim::RunPlan plan = paper_plan(99);
    plan.drift = sim::DriftParams{0.2};
    const auto a = sim::simulate_sweep(plan, kPaperDevice, kPaperSample);
    const auto b = sim::simulate_sweep(plan, kPaperDevice, kPaperSample);
    EXPECT_EQ(sweep_to_string(a), sweep_to_string(b));
}

TEST(SweepCsv, RoundTrip) {
    const auto sweep = sim::simulate_sweep(paper_plan(17), kPaperDevice, kPaperSample);
    std::ostringstream out;
    sim::write_sweep_csv(out, sweep);
    std::istringstream in(out.str());
    const auto back = sim::read_sweep_csv(in);
    ASSERT_EQ(back.size(), sweep.size());
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        EXPECT_DOUBLE_EQ(back[k].concentration_pct, sweep[k].concentration_pct);
        EXPECT_DOUBLE_EQ(back[k].record.ab, sweep[k].record.ab);
        EXPECT_DOUBLE_EQ(back[k].record.b2, sweep[k].record.b2);
    }
}

TEST(SweepCsv, NamesOffendingLine) {
    std::istringstream in(std::string(sim::kSweepCsvHeader) +
                          "\n0,1,1,2,3,4,5,6,7,8\n0.5,oops,1,2,3,4,5,6,7,8\n");
    try {
        sim::read_sweep_csv(in);
        FAIL() << "expected parse failure";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(HomCsv, RoundTripAndErrors) {
    std::ostringstream out;
    sim::write_hom_csv(out, {{-10.0, 5.0}, {0.0, 1.0}});
    std::istringstream in(out.str());
    const auto back = sim::read_hom_csv(in);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_DOUBLE_EQ(back[1].delay, 0.0);
    std::istringstream bad("nope\n");
    EXPECT_THROW(sim::read_hom_csv(bad), std::invalid_argument);
}

TEST(Manifest, RoundTripThroughJson) {
    sim::RunManifest manifest;
    manifest.mzi = kPaperDevice;
    manifest.sample = kPaperSample;
    manifest.plan = paper_plan(4242);
    manifest.plan.drift = sim::DriftParams{0.05};
    manifest.hom = sim::HomSpec{-300.0, 300.0, 61, 80.0};
    const auto text = sim::run_manifest_to_json(manifest);
    const auto back = sim::parse_run_manifest(text);
    EXPECT_DOUBLE_EQ(back.mzi.tau1, 0.61);
    EXPECT_EQ(back.plan.seed, 4242u);
    EXPECT_EQ(back.plan.concentrations.size(), 15u);
    ASSERT_TRUE(back.plan.drift.has_value());
    EXPECT_DOUBLE_EQ(back.plan.drift->amplitude, 0.05);
    ASSERT_TRUE(back.hom.has_value());
    EXPECT_EQ(back.hom->points, 61);
    EXPECT_EQ(back.hom->delays().size(), 61u);
}

TEST(Manifest, FieldLevelErrors) {
    try {
        sim::parse_run_manifest(R"({"mzi": {"r1_sq": 0.5, "r2_sq": 0.5, "tau1": 0.0,
            "tau2": 1.0}, "sample": {"wavelength_um": 0.785, "channel_length_um": 55,
            "dn_dc": 1.79e-3}, "plan": {"concentrations": [0], "exposure_s": 1,
            "pair_rate_hz": 100}})");
        FAIL() << "expected manifest rejection";
    } catch (const sim::ManifestError& e) {
        EXPECT_NE(std::string(e.what()).find("tau1"), std::string::npos);
    }
    EXPECT_THROW(sim::parse_run_manifest("{"), sim::ManifestError);
    EXPECT_THROW(sim::parse_run_manifest("{}"), sim::ManifestError);
}
