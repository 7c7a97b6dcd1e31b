// noonlab: command-line front end for the NOON-state interferometry toolkit.
//
// Exit codes: 0 success, 2 invalid input (flags, manifests, datasets),
// 3 I/O failure.

#include "noon/analysis.hpp"
#include "noon/counts.hpp"
#include "noon/experiment.hpp"
#include "noon/manifest.hpp"
#include "noon/metrology.hpp"
#include "noon/mzi.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::optional<std::uint64_t> seed_override_from_env() {
    const char* env = std::getenv("NOON_SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw InputError("NOON_SEED must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string manifest_path;
    std::string out_path;
    std::string hom_out_path;
    std::string manifest_out_path;
};

int cmd_simulate(const SimulateArgs& args) {
    noon::sim::RunManifest manifest;
    try {
        manifest = noon::sim::parse_run_manifest(read_file(args.manifest_path));
    } catch (const noon::sim::ManifestError& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
    if (const auto seed = seed_override_from_env()) manifest.plan.seed = *seed;

    const auto sweep = noon::sim::simulate_sweep(manifest.plan, manifest.mzi, manifest.sample);
    std::ostringstream csv;
    noon::sim::write_sweep_csv(csv, sweep);
    write_file(args.out_path, csv.str());

    if (!args.hom_out_path.empty()) {
        if (!manifest.hom) {
            throw InputError("manifest: --hom-out given but manifest has no 'hom' section");
        }
        const auto scan = noon::sim::simulate_hom_scan(
            manifest.hom->delays(), manifest.hom->coherence_scale, manifest.mzi, manifest.plan);
        std::ostringstream hom_csv;
        noon::sim::write_hom_csv(hom_csv, scan);
        write_file(args.hom_out_path, hom_csv.str());
    }

    const std::string manifest_out =
        args.manifest_out_path.empty() ? args.out_path + ".manifest.json"
                                       : args.manifest_out_path;
    write_file(manifest_out, noon::sim::run_manifest_to_json(manifest) + "\n");
    std::cout << "wrote " << args.out_path << " (" << sweep.size() << " steps)\n";
    return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::string input_path;
    int harmonic = 2;
    std::string out_path;
};

int cmd_fit(const FitArgs& args) {
    const std::string raw = read_file(args.input_path);
    std::istringstream in(raw);
    std::vector<noon::sim::SweepPoint> sweep;
    try {
        sweep = noon::sim::read_sweep_csv(in);
    } catch (const std::exception& e) {
        throw InputError(args.input_path + ": " + e.what());
    }
    const auto points = noon::analysis::fringe_points_from_sweep(sweep, args.harmonic);
    noon::analysis::FringeFit fit;
    try {
        fit = noon::analysis::fit_fringe(points, args.harmonic);
    } catch (const std::exception& e) {
        throw InputError(args.input_path + ": " + e.what());
    }
    const std::string json =
        noon::analysis::fringe_fit_to_json(fit, noon::analysis::hex_digest(raw));
    if (args.out_path.empty()) {
        std::cout << json << '\n';
    } else {
        write_file(args.out_path, json + "\n");
    }
    return kExitOk;
}

// --------------------------------------------------------------- sense-map

struct SenseMapArgs {
    double tau1 = 1.0;
    double tau2 = 1.0;
    int grid = 51;
    std::string out_path;
};

int cmd_sense_map(const SenseMapArgs& args) {
    if (args.grid < 3) throw InputError("--grid must be >= 3");
    if (!(args.tau1 > 0.0 && args.tau1 <= 1.0 && args.tau2 > 0.0 && args.tau2 <= 1.0)) {
        throw InputError("--tau1/--tau2 must lie in (0, 1]");
    }
    const auto map = noon::metrology::sensitivity_map(args.tau1, args.tau2, args.grid);

    std::ostringstream csv;
    char buf[64];
    csv << "r1";
    for (int j = 0; j < map.grid_n(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.6g", map.r2_at(j));
        csv << buf;
    }
    csv << '\n';
    for (int i = 0; i < map.grid_n(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", map.r1_at(i));
        csv << buf;
        for (int j = 0; j < map.grid_n(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.12g", map.values(i, j));
            csv << buf;
        }
        csv << '\n';
    }
    if (args.out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_file(args.out_path, csv.str());
    }
    std::snprintf(buf, sizeof(buf), "argmax R1=%.2f R2=%.2f S=%.6f",
                  map.r1_at(map.argmax_row), map.r2_at(map.argmax_col),
                  map.values(map.argmax_row, map.argmax_col));
    std::cout << buf << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------ limits

struct LimitsArgs {
    int n = 2;
    std::optional<double> visibility;
};

int cmd_limits(const LimitsArgs& args) {
    if (args.n < 1) throw InputError("--n must be >= 1");
    const auto lim = noon::metrology::limits(args.n);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "N=%d  SQL delta-phi=%.4f  Heisenberg delta-phi=%.4f",
                  args.n, lim.sql, lim.heisenberg);
    std::cout << buf << '\n';
    std::snprintf(buf, sizeof(buf), "supersensitivity threshold V=%.5f",
                  noon::metrology::supersensitivity_threshold());
    std::cout << buf << '\n';
    if (args.visibility) {
        if (!(*args.visibility >= 0.0 && *args.visibility <= 1.0)) {
            throw InputError("--v must lie in [0, 1]");
        }
        const bool above = noon::metrology::exceeds_supersensitivity(*args.visibility);
        std::snprintf(buf, sizeof(buf), "V=%.4f exceeds supersensitivity threshold: %s",
                      *args.visibility, above ? "true" : "false");
        std::cout << buf << '\n';
    }
    return kExitOk;
}

// ----------------------------------------------------------- paper-numbers

struct PaperNumbersArgs {
    std::string out_dir = "paper_numbers";
    std::uint64_t seed = 20120608;
    int mc_runs = 40;
};

// Regenerates every headline figure of merit of the device model in one
// pass: analytic bounds, sensitivity optimum, a seeded synthetic sweep with
// its fits, and the HOM scan. Artifacts land in out_dir.
int cmd_paper_numbers(const PaperNumbersArgs& args) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + args.out_dir + "'");

    const double t_ratio = 0.61;
    const noon::mzi::MziConfig device{0.5, 0.5, t_ratio, 1.0, 0.0};
    const noon::mzi::MziConfig lossless{0.5, 0.5, 1.0, 1.0, 0.0};
    const noon::sim::SampleModel sample{0.785, 55.0, 1.79e-3, 0.3};

    std::printf("== analytic bounds ==\n");
    std::printf("HOM visibility bound, T=0.61:      %.4f\n",
                noon::mzi::hom_visibility_bound(t_ratio));
    std::printf("HOM visibility bound, T=1:         %.4f\n", noon::mzi::hom_visibility_bound(1.0));
    std::printf("single-photon visibility, T=0.61:  %.4f\n",
                noon::mzi::single_photon_visibility(device));
    std::printf("two-photon dip visibility, T=0.61: %.4f\n",
                noon::mzi::hom_dip_visibility(device));
    std::printf("two-photon fringe visibility:      %.4f\n",
                noon::mzi::two_photon_fringe_params(device).visibility);
    const auto lim = noon::metrology::limits(2);
    std::printf("N=2 SQL / Heisenberg delta-phi:    %.4f / %.4f\n", lim.sql, lim.heisenberg);
    std::printf("supersensitivity threshold:        %.5f\n",
                noon::metrology::supersensitivity_threshold());
    std::printf("V=0.82 supersensitive:             %s\n",
                noon::metrology::exceeds_supersensitivity(0.82) ? "true" : "false");
    std::printf("lossless balanced sensitivity S:   %.6f\n",
                noon::metrology::sensitivity(lossless));

    std::printf("\n== sensitivity map (lossless, 51x51) ==\n");
    const auto map = noon::metrology::sensitivity_map(1.0, 1.0, 51);
    std::printf("argmax at R1=%.2f R2=%.2f\n", map.r1_at(map.argmax_row),
                map.r2_at(map.argmax_col));

    std::printf("\n== seeded synthetic sweep ==\n");
    noon::sim::RunPlan plan;
    for (int k = 0; k < 15; ++k) plan.concentrations.push_back(0.5 * k);
    plan.exposure_s = 1.0;
    plan.pair_rate_hz = 1.0e4;
    plan.efficiency.eta_a = plan.efficiency.eta_b = 0.1;
    plan.efficiency.eta_c = plan.efficiency.eta_d = 0.1;
    plan.seed = args.seed;

    const auto sweep = noon::sim::simulate_sweep(plan, device, sample);
    {
        std::ostringstream csv;
        noon::sim::write_sweep_csv(csv, sweep);
        write_file(args.out_dir + "/sweep.csv", csv.str());
    }
    const auto pts2 = noon::analysis::fringe_points_from_sweep(sweep, 2);
    const auto pts1 = noon::analysis::fringe_points_from_sweep(sweep, 1);
    const auto fit2 = noon::analysis::fit_fringe(pts2, 2);
    const auto fit1 = noon::analysis::fit_fringe(pts1, 1);
    std::printf("fitted V_2ph:  %.4f +- %.4f\n", fit2.visibility, fit2.visibility_sigma());
    std::printf("fitted V_1ph:  %.4f +- %.4f\n", fit1.visibility, fit1.visibility_sigma());
    std::printf("period ratio (2ph/1ph): %.4f\n", fit2.period() / fit1.period());

    const auto phases = noon::analysis::extract_phases(fit2, pts2);
    std::vector<std::pair<double, double>> dn;
    dn.reserve(phases.size());
    for (const auto& ph : phases) {
        dn.emplace_back(ph.x, noon::analysis::phase_to_index(ph.phi, sample.wavelength_um,
                                                             sample.channel_length_um));
    }
    const auto reg = noon::analysis::fit_index_slope(dn);
    std::printf("dn/dC slope:   %.4e +- %.2e  (literature %.2e)\n", reg.slope, reg.slope_err,
                noon::analysis::kBsaRefractiveIncrementLiterature);
    {
        std::ostringstream csv;
        noon::sim::write_sweep_csv(csv, sweep);
        write_file(args.out_dir + "/fit2.json",
                   noon::analysis::fringe_fit_to_json(
                       fit2, noon::analysis::hex_digest(csv.str())) + "\n");
        write_file(args.out_dir + "/slope.json",
                   noon::analysis::index_regression_to_json(
                       reg, noon::analysis::hex_digest(csv.str())) + "\n");
    }

    double slope_sq = 0.0, slope_mean = 0.0;
    for (int run = 0; run < args.mc_runs; ++run) {
        noon::sim::RunPlan p = plan;
        p.seed = args.seed + 1 + static_cast<std::uint64_t>(run);
        const auto sw = noon::sim::simulate_sweep(p, device, sample);
        const auto pts = noon::analysis::fringe_points_from_sweep(sw, 2);
        const auto fit = noon::analysis::fit_fringe(pts, 2);
        const auto phs = noon::analysis::extract_phases(fit, pts);
        std::vector<std::pair<double, double>> d;
        for (const auto& ph : phs) {
            d.emplace_back(ph.x, noon::analysis::phase_to_index(ph.phi, sample.wavelength_um,
                                                                sample.channel_length_um));
        }
        const double s = noon::analysis::fit_index_slope(d).slope;
        slope_mean += s;
        slope_sq += s * s;
    }
    slope_mean /= args.mc_runs;
    const double slope_std =
        std::sqrt(std::max(slope_sq / args.mc_runs - slope_mean * slope_mean, 0.0));
    std::printf("MC slope (%d runs): %.4e +- %.2e\n", args.mc_runs, slope_mean, slope_std);

    std::printf("\n== HOM delay scan ==\n");
    noon::sim::HomSpec hom{-300.0, 300.0, 61, 80.0};
    noon::sim::RunPlan hom_plan = plan;
    hom_plan.pair_rate_hz = 2.5e3;
    hom_plan.efficiency = noon::counts::EfficiencyModel{};
    const auto expected =
        noon::sim::expected_hom_scan(hom.delays(), hom.coherence_scale, device, hom_plan);
    double base = expected.front().coincidences, dip = base;
    for (const auto& pt : expected) dip = std::min(dip, pt.coincidences);
    std::printf("noiseless dip visibility: %.4f\n", 1.0 - dip / base);
    const auto scan =
        noon::sim::simulate_hom_scan(hom.delays(), hom.coherence_scale, device, hom_plan);
    {
        std::ostringstream csv;
        noon::sim::write_hom_csv(csv, scan);
        write_file(args.out_dir + "/hom.csv", csv.str());
    }
    const auto dip_fit = noon::analysis::fit_hom_dip(scan);
    std::printf("fitted dip visibility:    %.4f\n", dip_fit.visibility);

    std::printf("\nartifacts in %s/\n", args.out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon NOON-state Mach-Zehnder interferometry toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Generate synthetic sweep/HOM datasets");
    sim->add_option("--manifest", sim_args.manifest_path, "JSON run manifest")->required();
    sim->add_option("--out", sim_args.out_path, "Output sweep CSV path")->required();
    sim->add_option("--hom-out", sim_args.hom_out_path, "Output HOM scan CSV path");
    sim->add_option("--manifest-out", sim_args.manifest_out_path,
                    "Where to write the manifest copy (default <out>.manifest.json)");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a fringe to a sweep dataset");
    fit->add_option("--input", fit_args.input_path, "Sweep CSV")->required();
    fit->add_option("--harmonic", fit_args.harmonic, "1 = singles fringe, 2 = coincidences")
        ->check(CLI::IsMember({1, 2}));
    fit->add_option("--out", fit_args.out_path, "Write fit JSON here instead of stdout");

    SenseMapArgs map_args;
    auto* map = app.add_subcommand("sense-map", "Sensitivity over coupler reflectivities");
    map->add_option("--tau1", map_args.tau1, "Sensing-arm transmission");
    map->add_option("--tau2", map_args.tau2, "Reference-arm transmission");
    map->add_option("--grid", map_args.grid, "Grid points per axis");
    map->add_option("--out", map_args.out_path, "Write CSV matrix here instead of stdout");

    LimitsArgs lim_args;
    auto* lim = app.add_subcommand("limits", "Quantum limits and supersensitivity check");
    lim->add_option("--n", lim_args.n, "Photon number");
    double vis = -1.0;
    auto* vopt = lim->add_option("--v", vis, "Measured two-photon visibility");

    PaperNumbersArgs paper_args;
    auto* paper = app.add_subcommand("paper-numbers",
                                     "Regenerate every headline number in one run");
    paper->add_option("--out", paper_args.out_dir, "Artifact directory");
    paper->add_option("--seed", paper_args.seed, "Base seed");
    paper->add_option("--mc-runs", paper_args.mc_runs, "Monte Carlo repetitions")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return kExitInput;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (fit->parsed()) return cmd_fit(fit_args);
        if (map->parsed()) return cmd_sense_map(map_args);
        if (lim->parsed()) {
            if (*vopt) lim_args.visibility = vis;
            return cmd_limits(lim_args);
        }
        if (paper->parsed()) return cmd_paper_numbers(paper_args);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
