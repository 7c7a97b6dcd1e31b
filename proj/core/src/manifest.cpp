#include "noon/manifest.hpp"

#include <json.hpp>

#include <cmath>

namespace noon::sim {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ManifestError(path + key + ": missing field");
    if (!j[key].is_number()) throw ManifestError(path + key + ": expected a number");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ManifestError(path + key + ": expected a number");
    return j[key].get<double>();
}

std::uint64_t get_seed(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) return 0;
    if (!j[key].is_number_unsigned() && !j[key].is_number_integer()) {
        throw ManifestError(path + key + ": expected a non-negative integer");
    }
    if (j[key].is_number_integer() && j[key].get<std::int64_t>() < 0) {
        throw ManifestError(path + key + ": expected a non-negative integer");
    }
    return j[key].get<std::uint64_t>();
}

const json& get_object(const json& j, const char* key) {
    if (!j.contains(key)) throw ManifestError(std::string(key) + ": missing section");
    if (!j[key].is_object()) throw ManifestError(std::string(key) + ": expected an object");
    return j[key];
}

template <typename F>
void validate_as(const std::string& path, F&& validate) {
    try {
        validate();
    } catch (const std::exception& e) {
        throw ManifestError(path + ": " + e.what());
    }
}

}  // namespace

void HomSpec::validate() const {
    if (!(points >= 2)) throw std::invalid_argument("hom.points must be >= 2");
    if (!(delay_max > delay_min)) {
        throw std::invalid_argument("hom.delay_max must exceed hom.delay_min");
    }
    if (!(coherence_scale > 0.0)) {
        throw std::invalid_argument("hom.coherence_scale must be > 0");
    }
}

std::vector<double> HomSpec::delays() const {
    validate();
    std::vector<double> d(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        d[static_cast<std::size_t>(k)] =
            delay_min + (delay_max - delay_min) * k / (points - 1);
    }
    return d;
}

void RunManifest::validate() const {
    mzi.validate();
    sample.validate();
    plan.validate();
    if (hom) hom->validate();
}

RunManifest parse_run_manifest(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ManifestError("manifest root must be an object");

    RunManifest m;

    const json& jm = get_object(root, "mzi");
    m.mzi.r1_sq = get_number(jm, "mzi.", "r1_sq");
    m.mzi.r2_sq = get_number(jm, "mzi.", "r2_sq");
    m.mzi.tau1 = get_number(jm, "mzi.", "tau1");
    m.mzi.tau2 = get_number(jm, "mzi.", "tau2");
    m.mzi.phi0 = get_number_or(jm, "mzi.", "phi0", 0.0);
    validate_as("mzi", [&] { m.mzi.validate(); });

    const json& js = get_object(root, "sample");
    m.sample.wavelength_um = get_number(js, "sample.", "wavelength_um");
    m.sample.channel_length_um = get_number(js, "sample.", "channel_length_um");
    m.sample.dn_dc = get_number(js, "sample.", "dn_dc");
    m.sample.phi_offset = get_number_or(js, "sample.", "phi_offset", 0.0);
    validate_as("sample", [&] { m.sample.validate(); });

    const json& jp = get_object(root, "plan");
    if (!jp.contains("concentrations") || !jp["concentrations"].is_array()) {
        throw ManifestError("plan.concentrations: expected an array of numbers");
    }
    for (const auto& c : jp["concentrations"]) {
        if (!c.is_number()) {
            throw ManifestError("plan.concentrations: expected an array of numbers");
        }
        m.plan.concentrations.push_back(c.get<double>());
    }
    m.plan.exposure_s = get_number(jp, "plan.", "exposure_s");
    m.plan.pair_rate_hz = get_number(jp, "plan.", "pair_rate_hz");
    m.plan.seed = get_seed(jp, "plan.", "seed");
    if (jp.contains("efficiency")) {
        const json& je = get_object(jp, "efficiency");
        m.plan.efficiency.eta_a = get_number_or(je, "plan.efficiency.", "eta_a", 1.0);
        m.plan.efficiency.eta_b = get_number_or(je, "plan.efficiency.", "eta_b", 1.0);
        m.plan.efficiency.eta_c = get_number_or(je, "plan.efficiency.", "eta_c", 1.0);
        m.plan.efficiency.eta_d = get_number_or(je, "plan.efficiency.", "eta_d", 1.0);
        m.plan.efficiency.n1 = get_number_or(je, "plan.efficiency.", "n1", 1.0);
        m.plan.efficiency.n2 = get_number_or(je, "plan.efficiency.", "n2", 1.0);
        m.plan.efficiency.n_pairs = get_number_or(je, "plan.efficiency.", "n_pairs", 1.0);
    }
    if (jp.contains("drift")) {
        const json& jd = get_object(jp, "drift");
        m.plan.drift = DriftParams{get_number(jd, "plan.drift.", "amplitude")};
    }
    validate_as("plan", [&] { m.plan.validate(); });

    if (root.contains("hom")) {
        const json& jh = get_object(root, "hom");
        HomSpec hom;
        hom.delay_min = get_number(jh, "hom.", "delay_min");
        hom.delay_max = get_number(jh, "hom.", "delay_max");
        const double pts = get_number(jh, "hom.", "points");
        hom.points = static_cast<int>(pts);
        if (static_cast<double>(hom.points) != pts) {
            throw ManifestError("hom.points: expected an integer");
        }
        hom.coherence_scale = get_number(jh, "hom.", "coherence_scale");
        validate_as("hom", [&] { hom.validate(); });
        m.hom = hom;
    }
    return m;
}

std::string run_manifest_to_json(const RunManifest& manifest) {
    manifest.validate();
    json root;
    root["mzi"] = {
        {"r1_sq", manifest.mzi.r1_sq}, {"r2_sq", manifest.mzi.r2_sq},
        {"tau1", manifest.mzi.tau1},   {"tau2", manifest.mzi.tau2},
        {"phi0", manifest.mzi.phi0},
    };
    root["sample"] = {
        {"wavelength_um", manifest.sample.wavelength_um},
        {"channel_length_um", manifest.sample.channel_length_um},
        {"dn_dc", manifest.sample.dn_dc},
        {"phi_offset", manifest.sample.phi_offset},
    };
    root["plan"] = {
        {"concentrations", manifest.plan.concentrations},
        {"exposure_s", manifest.plan.exposure_s},
        {"pair_rate_hz", manifest.plan.pair_rate_hz},
        {"seed", manifest.plan.seed},
        {"efficiency",
         {{"eta_a", manifest.plan.efficiency.eta_a},
          {"eta_b", manifest.plan.efficiency.eta_b},
          {"eta_c", manifest.plan.efficiency.eta_c},
          {"eta_d", manifest.plan.efficiency.eta_d},
          {"n1", manifest.plan.efficiency.n1},
          {"n2", manifest.plan.efficiency.n2},
          {"n_pairs", manifest.plan.efficiency.n_pairs}}},
    };
    if (manifest.plan.drift) {
        root["plan"]["drift"] = {{"amplitude", manifest.plan.drift->amplitude}};
    }
    if (manifest.hom) {
        root["hom"] = {
            {"delay_min", manifest.hom->delay_min},
            {"delay_max", manifest.hom->delay_max},
            {"points", manifest.hom->points},
            {"coherence_scale", manifest.hom->coherence_scale},
        };
    }
    return root.dump(2);
}

}  // namespace noon::sim
