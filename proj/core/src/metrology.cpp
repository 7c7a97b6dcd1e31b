#include "noon/metrology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace noon::metrology {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStationaryTol = 1e-12;
constexpr double kVarianceFloor = 1e-6;
constexpr int kPhaseGridPoints = 720;

// (dP/dphi)^2 / (P (1 - P)), or 0 at excluded points. Points with a
// vanishing derivative are 0/0 artifacts of the fringe extrema. Points with
// P(1-P) below the floor are excluded as well: there the computed 1 - P (or
// P) keeps at most ~1e-10 relative accuracy while the ratio approaches its
// finite limit smoothly from the feasible side, so the exclusion changes
// the maximum by under 1e-5 relative and removes pure rounding noise.
double information_ratio(const mzi::MziConfig& config, double phi) {
    const double dp = mzi::coincidence_probability_derivative(config, phi);
    if (std::abs(dp) < kStationaryTol) return 0.0;
    const double p = mzi::coincidence_probability(config, phi);
    const double var = p * (1.0 - p);
    if (var < kVarianceFloor) return 0.0;
    return dp * dp / var;
}

// Golden-section maximization on [lo, hi] to the given x tolerance; returns
// the largest value seen at any probe (robust when the exclusion window of
// information_ratio clips the peak).
template <typename F>
double golden_section_max(F f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best = std::max(f1, f2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

}  // namespace

double outcome_variance(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("outcome_variance: p must lie in [0, 1]");
    }
    return p * (1.0 - p);
}

std::optional<double> phase_variance(const mzi::MziConfig& config, double phi) {
    const double dp = mzi::coincidence_probability_derivative(config, phi);
    if (std::abs(dp) < kStationaryTol) return std::nullopt;
    const double p = mzi::coincidence_probability(config, phi);
    return outcome_variance(p) / (dp * dp);
}

double sensitivity(const mzi::MziConfig& config) {
    config.validate();
    double best = 0.0;
    double best_phi = 0.0;
    for (int k = 0; k < kPhaseGridPoints; ++k) {
        const double phi = kTwoPi * k / kPhaseGridPoints;
        const double g = information_ratio(config, phi);
        if (g > best) {
            best = g;
            best_phi = phi;
        }
    }
    if (best == 0.0) return 0.0;
    const double step = kTwoPi / kPhaseGridPoints;
    const double refined = golden_section_max(
        [&](double phi) { return information_ratio(config, phi); },
        best_phi - step, best_phi + step, 1e-10);
    return std::sqrt(std::max(best, refined));
}

SensitivityMap sensitivity_map(double tau1, double tau2, int grid_n) {
    if (grid_n < 3) throw std::invalid_argument("sensitivity_map: grid_n must be >= 3");
    SensitivityMap map;
    map.values.resize(grid_n, grid_n);
    map.argmax_row = 0;
    map.argmax_col = 0;
    double best = -1.0;
    for (int i = 0; i < grid_n; ++i) {
        const double r1 = static_cast<double>(i) / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            const double r2 = static_cast<double>(j) / (grid_n - 1);
            const double s = sensitivity(mzi::MziConfig{r1, r2, tau1, tau2, 0.0});
            map.values(i, j) = s;
            if (s > best) {
                best = s;
                map.argmax_row = i;
                map.argmax_col = j;
            }
        }
    }
    return map;
}

PhaseLimits limits(int n) {
    if (n < 1) throw std::invalid_argument("limits: photon number must be >= 1");
    return PhaseLimits{1.0 / std::sqrt(static_cast<double>(n)), 1.0 / n};
}

double supersensitivity_threshold() {
    return 1.0 / std::numbers::sqrt2;
}

bool exceeds_supersensitivity(double visibility) {
    return visibility > supersensitivity_threshold();
}

}  // namespace noon::metrology
