#pragma once

#include "noon/counts.hpp"
#include "noon/mzi.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

// Monte Carlo generator of synthetic counting experiments: Poissonian count
// records for concentration sweeps, Hong-Ou-Mandel delay scans, and
// multiplicative efficiency drift. Every sampled count is drawn from an
// independent Poisson law whose mean comes from the counts::forward_model;
// a fixed seed reproduces a run exactly.
namespace noon::sim {

/// Optical and fluidic parameters mapping concentration to phase.
struct SampleModel {
    double wavelength_um;     ///< probe wavelength, micrometers
    double channel_length_um; ///< microchannel length along the waveguide
    double dn_dc;             ///< refractive-index units per % concentration
    double phi_offset = 0.0;  ///< phase at zero concentration, radians

    void validate() const;
};

/// Per-step multiplicative random walk applied to detection efficiencies
/// and injection rates; each step multiplies the previous factor by a
/// uniform draw from [1 - amplitude, 1 + amplitude].
struct DriftParams {
    double amplitude = 0.0;

    void validate() const;  // amplitude in [0, 1)
};

/// One sweep: which concentrations to probe and with what statistics.
/// pair_rate is the source brightness; the sweep injects pairs at this rate
/// and, for the singles fringe, single photons into each input at the same
/// rate (the efficiency model's n1/n2/n_pairs fields only matter when
/// calling counts::forward_model directly).
struct RunPlan {
    std::vector<double> concentrations;  ///< percent values, >= 0
    double exposure_s = 1.0;
    double pair_rate_hz = 0.0;
    counts::EfficiencyModel efficiency;
    std::uint64_t seed = 0;
    std::optional<DriftParams> drift;

    void validate() const;
};

/// Multiplicative scaling of the efficiency model fields, the unit of
/// drift injection. All factors must be > 0.
struct EfficiencyScale {
    double eta_a = 1.0, eta_b = 1.0, eta_c = 1.0, eta_d = 1.0;
    double n1 = 1.0, n2 = 1.0, n_pairs = 1.0;

    void validate() const;
};

struct SweepPoint {
    double concentration_pct;
    counts::CountRecord record;
};

struct HomPoint {
    double delay;
    double coincidences;
};

/// phi = (2 pi L / lambda) * (dn/dC) * C + phi_offset.
double concentration_to_phase(const SampleModel& sample, double concentration_pct);

/// Scales the eta/N-dependent expected means of a record: singles scale
/// with one efficiency and one rate factor, coincidences with two
/// efficiency factors and the pair-rate factor.
counts::CountRecord apply_scale(const counts::CountRecord& means, const EfficiencyScale& s);

/// Applies one scale per step to a stream of expected-mean records.
/// walk.size() must be >= stream.size().
std::vector<SweepPoint> inject_drift(const std::vector<SweepPoint>& stream,
                                     const std::vector<EfficiencyScale>& walk);

/// Seeded multiplicative random walk over `steps` steps (independent walks
/// per efficiency and rate field).
std::vector<EfficiencyScale> drift_walk(std::size_t steps, double amplitude,
                                        std::uint64_t seed);

/// Expected (noise-free) count records for the sweep, drift applied when
/// the plan configures it.
std::vector<SweepPoint> expected_sweep(const RunPlan& plan, const mzi::MziConfig& config,
                                       const SampleModel& sample);

/// Poisson-sampled synthetic sweep. Output order follows
/// plan.concentrations; per-step RNG streams are derived from the seed and
/// the step index, so results do not depend on evaluation order.
std::vector<SweepPoint> simulate_sweep(const RunPlan& plan, const mzi::MziConfig& config,
                                       const SampleModel& sample);

/// Pair overlap as a function of relative delay: exp(-d^2 / (2 scale^2)).
double delay_overlap(double delay, double coherence_scale);

/// Expected AB-coincidence counts of a HOM delay scan at probe phase phi
/// (default pi/2): gamma(delay)-interpolated between the indistinguishable
/// and distinguishable coincidence probabilities.
std::vector<HomPoint> expected_hom_scan(const std::vector<double>& delays,
                                        double coherence_scale, const mzi::MziConfig& config,
                                        const RunPlan& plan,
                                        double phi = 1.5707963267948966);

/// Poisson-sampled HOM delay scan.
std::vector<HomPoint> simulate_hom_scan(const std::vector<double>& delays,
                                        double coherence_scale, const mzi::MziConfig& config,
                                        const RunPlan& plan,
                                        double phi = 1.5707963267948966);

/// CSV header of a sweep dataset.
inline constexpr const char* kSweepCsvHeader =
    "concentration_pct,exposure,A1,A2,B1,B2,AB,CD,AC,BD";

/// CSV header of a HOM scan dataset.
inline constexpr const char* kHomCsvHeader = "delay,coincidences";

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

/// Parses a sweep dataset; throws std::invalid_argument with "line N" on
/// malformed input (line 1 is the header).
std::vector<SweepPoint> read_sweep_csv(std::istream& in);

void write_hom_csv(std::ostream& out, const std::vector<HomPoint>& points);
std::vector<HomPoint> read_hom_csv(std::istream& in);

}  // namespace noon::sim
