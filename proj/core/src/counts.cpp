#include "noon/counts.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace noon::counts {

namespace {

// Shared core of the two estimators: p = g1 / (g1 + g2) with
// g1 = sqrt(x y), g2 = sqrt(u v), plus the delta-method sigma
// p(1-p)/2 * sqrt(1/x + 1/y + 1/u + 1/v) for independent Poisson counts.
std::optional<NormalizedEstimate> geometric_ratio(double x, double y, double u, double v) {
    const double g1 = std::sqrt(x * y);
    const double g2 = std::sqrt(u * v);
    if (g1 + g2 <= 0.0) return std::nullopt;
    const double p = g1 / (g1 + g2);
    double sigma = 0.0;
    if (g1 > 0.0 && g2 > 0.0) {
        sigma = p * (1.0 - p) / 2.0 * std::sqrt(1.0 / x + 1.0 / y + 1.0 / u + 1.0 / v);
    }
    return NormalizedEstimate{p, sigma};
}

double parse_field(const std::string& token, const char* name) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("count record: field '") + name +
                                    "' is not a number: '" + token + "'");
    }
    if (pos != token.size()) {
        throw std::invalid_argument(std::string("count record: trailing garbage in field '") +
                                    name + "': '" + token + "'");
    }
    return value;
}

}  // namespace

void CountRecord::validate() const {
    const double fields[] = {a1, a2, b1, b2, ab, cd, ac, bd};
    for (double f : fields) {
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw std::invalid_argument("CountRecord: counts must be finite and >= 0");
        }
    }
    if (!(exposure > 0.0) || !std::isfinite(exposure)) {
        throw std::invalid_argument("CountRecord: exposure must be > 0");
    }
}

void EfficiencyModel::validate() const {
    const double etas[] = {eta_a, eta_b, eta_c, eta_d};
    for (double e : etas) {
        if (!(e > 0.0 && e <= 1.0)) {
            throw std::invalid_argument("EfficiencyModel: efficiencies must lie in (0, 1]");
        }
    }
    const double rates[] = {n1, n2, n_pairs};
    for (double r : rates) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("EfficiencyModel: rates must be > 0");
        }
    }
}

std::optional<NormalizedEstimate> normalize_singles(const CountRecord& rec) {
    rec.validate();
    return geometric_ratio(rec.a2, rec.b1, rec.a1, rec.b2);
}

std::optional<NormalizedEstimate> normalize_coincidences(const CountRecord& rec) {
    rec.validate();
    return geometric_ratio(rec.ab, rec.cd, rec.ac, rec.bd);
}

CountRecord forward_model(const EfficiencyModel& eff, const mzi::OutcomeDistribution& dist,
                          double p10, double p01, double exposure) {
    eff.validate();
    if (!(exposure > 0.0)) throw std::invalid_argument("forward_model: exposure must be > 0");
    if (!(p10 >= 0.0 && p01 >= 0.0)) {
        throw std::invalid_argument("forward_model: probabilities must be >= 0");
    }
    const double n11 = dist.p11 * eff.n_pairs * exposure;
    const double n20 = dist.p20 * eff.n_pairs * exposure;
    const double n02 = dist.p02 * eff.n_pairs * exposure;
    CountRecord rec;
    rec.exposure = exposure;
    rec.a1 = p10 * eff.eta_a * eff.n1 * exposure;
    rec.a2 = p01 * eff.eta_a * eff.n2 * exposure;
    rec.b1 = p01 * eff.eta_b * eff.n1 * exposure;
    rec.b2 = p10 * eff.eta_b * eff.n2 * exposure;
    rec.ab = n11 * eff.eta_a * eff.eta_b;
    rec.cd = n11 * eff.eta_c * eff.eta_d;
    rec.ac = 2.0 * n20 * eff.eta_a * eff.eta_c;
    rec.bd = 2.0 * n02 * eff.eta_b * eff.eta_d;
    return rec;
}

std::string to_csv_row(const CountRecord& rec) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                  rec.exposure, rec.a1, rec.a2, rec.b1, rec.b2, rec.ab, rec.cd, rec.ac, rec.bd);
    return buf;
}

CountRecord count_record_from_csv_row(const std::string& row) {
    static const char* names[] = {"exposure", "A1", "A2", "B1", "B2", "AB", "CD", "AC", "BD"};
    std::istringstream in(row);
    std::string token;
    double values[9];
    for (int i = 0; i < 9; ++i) {
        if (!std::getline(in, token, ',')) {
            throw std::invalid_argument("count record: expected 9 fields, got " +
                                        std::to_string(i));
        }
        values[i] = parse_field(token, names[i]);
    }
    if (std::getline(in, token, ',')) {
        throw std::invalid_argument("count record: expected 9 fields, got more");
    }
    CountRecord rec{values[0], values[1], values[2], values[3], values[4],
                    values[5], values[6], values[7], values[8]};
    rec.validate();
    return rec;
}

std::string count_record_to_json(const CountRecord& rec) {
    nlohmann::json j{
        {"exposure", rec.exposure},
        {"A1", rec.a1}, {"A2", rec.a2}, {"B1", rec.b1}, {"B2", rec.b2},
        {"AB", rec.ab}, {"CD", rec.cd}, {"AC", rec.ac}, {"BD", rec.bd},
    };
    return j.dump();
}

CountRecord count_record_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("count record JSON: ") + e.what());
    }
    auto get = [&](const char* key) -> double {
        if (!j.contains(key) || !j[key].is_number()) {
            throw std::invalid_argument(std::string("count record JSON: missing numeric field '") +
                                        key + "'");
        }
        return j[key].get<double>();
    };
    CountRecord rec{get("exposure"), get("A1"), get("A2"), get("B1"), get("B2"),
                    get("AB"),       get("CD"), get("AC"), get("BD")};
    rec.validate();
    return rec;
}

}  // namespace noon::counts
