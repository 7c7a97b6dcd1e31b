#include "noon/experiment.hpp"

#include "noon/random.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace noon::sim {

namespace {

double parse_number(const std::string& token, std::size_t line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line) + ": not a number: '" +
                                    token + "'");
    }
    if (pos != token.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": trailing garbage: '" +
                                    token + "'");
    }
    return v;
}

std::vector<double> split_numbers(const std::string& row, std::size_t line,
                                  std::size_t expected) {
    std::istringstream in(row);
    std::string token;
    std::vector<double> out;
    while (std::getline(in, token, ',')) out.push_back(parse_number(token, line));
    if (out.size() != expected) {
        throw std::invalid_argument("line " + std::to_string(line) + ": expected " +
                                    std::to_string(expected) + " fields, got " +
                                    std::to_string(out.size()));
    }
    return out;
}

counts::CountRecord sample_record(const counts::CountRecord& means, std::mt19937_64& gen) {
    counts::CountRecord rec;
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

// Expected means for one concentration step, before drift.
counts::CountRecord step_means(const RunPlan& plan, const mzi::MziConfig& config,
                               const SampleModel& sample, double concentration) {
    const double phi = concentration_to_phase(sample, concentration);
    const auto dist = mzi::two_photon_distribution(config, phi);
    const auto singles = mzi::single_photon_distribution(config, phi, 0);

    counts::EfficiencyModel eff = plan.efficiency;
    const double rate = plan.pair_rate_hz;
    counts::CountRecord rec;
    rec.exposure = plan.exposure_s;
    if (rate > 0.0) {
        eff.n1 = rate;
        eff.n2 = rate;
        eff.n_pairs = rate;
        rec = counts::forward_model(eff, dist, singles.p_out0, singles.p_out1,
                                    plan.exposure_s);
    }
    return rec;
}

}  // namespace

void SampleModel::validate() const {
    if (!(wavelength_um > 0.0)) {
        throw std::invalid_argument("SampleModel: wavelength must be > 0");
    }
    if (!(channel_length_um > 0.0)) {
        throw std::invalid_argument("SampleModel: channel length must be > 0");
    }
    if (!std::isfinite(dn_dc) || !std::isfinite(phi_offset)) {
        throw std::invalid_argument("SampleModel: dn_dc and phi_offset must be finite");
    }
}

void DriftParams::validate() const {
    if (!(amplitude >= 0.0 && amplitude < 1.0)) {
        throw std::invalid_argument("DriftParams: amplitude must lie in [0, 1)");
    }
}

void RunPlan::validate() const {
    for (double c : concentrations) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw std::invalid_argument("RunPlan: concentrations must be finite and >= 0");
        }
    }
    if (!(exposure_s > 0.0)) throw std::invalid_argument("RunPlan: exposure must be > 0");
    if (!(pair_rate_hz >= 0.0) || !std::isfinite(pair_rate_hz)) {
        throw std::invalid_argument("RunPlan: pair_rate must be finite and >= 0");
    }
    efficiency.validate();
    if (drift) drift->validate();
}

void EfficiencyScale::validate() const {
    const double fields[] = {eta_a, eta_b, eta_c, eta_d, n1, n2, n_pairs};
    for (double f : fields) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw std::invalid_argument("EfficiencyScale: factors must be > 0");
        }
    }
}

double concentration_to_phase(const SampleModel& sample, double concentration_pct) {
    sample.validate();
    const double alpha =
        2.0 * std::numbers::pi * sample.channel_length_um / sample.wavelength_um * sample.dn_dc;
    return alpha * concentration_pct + sample.phi_offset;
}

counts::CountRecord apply_scale(const counts::CountRecord& means, const EfficiencyScale& s) {
    s.validate();
    counts::CountRecord rec = means;
    rec.a1 *= s.eta_a * s.n1;
    rec.a2 *= s.eta_a * s.n2;
    rec.b1 *= s.eta_b * s.n1;
    rec.b2 *= s.eta_b * s.n2;
    rec.ab *= s.eta_a * s.eta_b * s.n_pairs;
    rec.cd *= s.eta_c * s.eta_d * s.n_pairs;
    rec.ac *= s.eta_a * s.eta_c * s.n_pairs;
    rec.bd *= s.eta_b * s.eta_d * s.n_pairs;
    return rec;
}

std::vector<SweepPoint> inject_drift(const std::vector<SweepPoint>& stream,
                                     const std::vector<EfficiencyScale>& walk) {
    if (walk.size() < stream.size()) {
        throw std::invalid_argument("inject_drift: walk shorter than stream");
    }
    std::vector<SweepPoint> out;
    out.reserve(stream.size());
    for (std::size_t k = 0; k < stream.size(); ++k) {
        out.push_back({stream[k].concentration_pct, apply_scale(stream[k].record, walk[k])});
    }
    return out;
}

std::vector<EfficiencyScale> drift_walk(std::size_t steps, double amplitude,
                                        std::uint64_t seed) {
    DriftParams{amplitude}.validate();
    std::mt19937_64 gen = rng::make_stream(seed, 0x0D21F7);
    std::uniform_real_distribution<double> u(1.0 - amplitude, 1.0 + amplitude);
    std::vector<EfficiencyScale> walk(steps);
    EfficiencyScale state;
    for (std::size_t k = 0; k < steps; ++k) {
        state.eta_a *= u(gen);
        state.eta_b *= u(gen);
        state.eta_c *= u(gen);
        state.eta_d *= u(gen);
        state.n1 *= u(gen);
        state.n2 *= u(gen);
        state.n_pairs *= u(gen);
        walk[k] = state;
    }
    return walk;
}

std::vector<SweepPoint> expected_sweep(const RunPlan& plan, const mzi::MziConfig& config,
                                       const SampleModel& sample) {
    plan.validate();
    config.validate();
    sample.validate();
    std::vector<SweepPoint> out;
    out.reserve(plan.concentrations.size());
    for (double c : plan.concentrations) {
        out.push_back({c, step_means(plan, config, sample, c)});
    }
    if (plan.drift && plan.drift->amplitude > 0.0) {
        out = inject_drift(out, drift_walk(out.size(), plan.drift->amplitude, plan.seed));
    }
    return out;
}

std::vector<SweepPoint> simulate_sweep(const RunPlan& plan, const mzi::MziConfig& config,
                                       const SampleModel& sample) {
    std::vector<SweepPoint> means = expected_sweep(plan, config, sample);
    for (std::size_t k = 0; k < means.size(); ++k) {
        std::mt19937_64 gen = rng::make_stream(plan.seed, k);
        means[k].record = sample_record(means[k].record, gen);
    }
    return means;
}

double delay_overlap(double delay, double coherence_scale) {
    if (!(coherence_scale > 0.0)) {
        throw std::invalid_argument("delay_overlap: coherence scale must be > 0");
    }
    const double z = delay / coherence_scale;
    return std::exp(-0.5 * z * z);
}

std::vector<HomPoint> expected_hom_scan(const std::vector<double>& delays,
                                        double coherence_scale, const mzi::MziConfig& config,
                                        const RunPlan& plan, double phi) {
    plan.validate();
    config.validate();
    const double p_indist = mzi::coincidence_probability(config, phi);
    const double p_dist = mzi::distinguishable_coincidence_probability(config, phi);
    const double scale =
        plan.pair_rate_hz * plan.exposure_s * plan.efficiency.eta_a * plan.efficiency.eta_b;
    std::vector<HomPoint> out;
    out.reserve(delays.size());
    for (double d : delays) {
        const fock::OverlapParameter gamma(delay_overlap(d, coherence_scale));
        out.push_back({d, fock::mixed_coincidence(p_indist, p_dist, gamma) * scale});
    }
    return out;
}

std::vector<HomPoint> simulate_hom_scan(const std::vector<double>& delays,
                                        double coherence_scale, const mzi::MziConfig& config,
                                        const RunPlan& plan, double phi) {
    std::vector<HomPoint> points = expected_hom_scan(delays, coherence_scale, config, plan, phi);
    for (std::size_t k = 0; k < points.size(); ++k) {
        std::mt19937_64 gen = rng::make_stream(plan.seed, 0x40A000 + k);
        points[k].coincidences =
            static_cast<double>(rng::sample_poisson(points[k].coincidences, gen));
    }
    return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
    out << kSweepCsvHeader << '\n';
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.10g", p.concentration_pct);
        out << buf << ',' << counts::to_csv_row(p.record) << '\n';
    }
}

std::vector<SweepPoint> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("line 1: empty input");
    if (line != kSweepCsvHeader) {
        throw std::invalid_argument(std::string("line 1: expected header '") + kSweepCsvHeader +
                                    "'");
    }
    std::vector<SweepPoint> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto v = split_numbers(line, line_no, 10);
        counts::CountRecord rec{v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
        try {
            rec.validate();
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back({v[0], rec});
    }
    return out;
}

void write_hom_csv(std::ostream& out, const std::vector<HomPoint>& points) {
    out << kHomCsvHeader << '\n';
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf), "%.10g", p.delay);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.10g", p.coincidences);
        out << buf << '\n';
    }
}

std::vector<HomPoint> read_hom_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("line 1: empty input");
    if (line != kHomCsvHeader) {
        throw std::invalid_argument(std::string("line 1: expected header '") + kHomCsvHeader +
                                    "'");
    }
    std::vector<HomPoint> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto v = split_numbers(line, line_no, 2);
        if (v[1] < 0.0) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": negative coincidence count");
        }
        out.push_back({v[0], v[1]});
    }
    return out;
}

}  // namespace noon::sim
