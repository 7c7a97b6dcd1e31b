#include "noon/analysis.hpp"

#include "noon/random.hpp"

#include <json.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace noon::analysis {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Successive parabolic interpolation toward the minimum of f inside a
// bracket (x1 < x2 < x3, f(x2) lowest); bisection steps guard degenerate
// parabolas.
template <typename F>
double parabolic_refine(F f, double x1, double x2, double x3, double xtol, int max_iter = 100) {
    double f1 = f(x1), f2 = f(x2), f3 = f(x3);
    for (int it = 0; it < max_iter && (x3 - x1) > xtol; ++it) {
        const double d21 = x2 - x1, d23 = x2 - x3;
        const double num = d21 * d21 * (f2 - f3) - d23 * d23 * (f2 - f1);
        const double den = d21 * (f2 - f3) - d23 * (f2 - f1);
        double xn;
        if (std::abs(den) < 1e-300) {
            xn = (x3 - x2 > x2 - x1) ? (x2 + x3) / 2.0 : (x1 + x2) / 2.0;
        } else {
            xn = x2 - 0.5 * num / den;
            const double lo = x1 + 0.1 * (x2 - x1), hi = x3 - 0.1 * (x3 - x2);
            if (!(xn > x1 && xn < x3) || std::abs(xn - x2) < 1e-14 * std::max(1.0, std::abs(x2))) {
                xn = (x3 - x2 > x2 - x1) ? (x2 + x3) / 2.0 : (x1 + x2) / 2.0;
            } else {
                xn = std::clamp(xn, lo, hi);
            }
        }
        const double fn = f(xn);
        if (xn < x2) {
            if (fn < f2) {
                x3 = x2; f3 = f2; x2 = xn; f2 = fn;
            } else {
                x1 = xn; f1 = fn;
            }
        } else {
            if (fn < f2) {
                x1 = x2; f1 = f2; x2 = xn; f2 = fn;
            } else {
                x3 = xn; f3 = fn;
            }
        }
    }
    return x2;
}

struct LinearFringeSolution {
    double a = 0.0;  // coefficient of cos(h alpha x)
    double b = 0.0;  // coefficient of sin(h alpha x)
    double ssr = std::numeric_limits<double>::infinity();
};

// Weighted linear solve of p - 1/2 = a cos(w x) + b sin(w x).
LinearFringeSolution solve_linear(std::span<const FringePoint> pts,
                                  std::span<const double> weights, double omega) {
    double s_cc = 0.0, s_cs = 0.0, s_ss = 0.0, s_cy = 0.0, s_sy = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double c = std::cos(omega * pts[i].x);
        const double s = std::sin(omega * pts[i].x);
        const double y = pts[i].p - 0.5;
        const double w = weights[i];
        s_cc += w * c * c;
        s_cs += w * c * s;
        s_ss += w * s * s;
        s_cy += w * c * y;
        s_sy += w * s * y;
    }
    LinearFringeSolution sol;
    const double det = s_cc * s_ss - s_cs * s_cs;
    if (std::abs(det) < 1e-14 * std::max(1.0, s_cc * s_ss)) {
        // Nearly collinear basis (e.g. omega ~ 0): fit the cosine term only.
        if (s_cc <= 0.0) return sol;
        sol.a = s_cy / s_cc;
        sol.b = 0.0;
    } else {
        sol.a = (s_ss * s_cy - s_cs * s_sy) / det;
        sol.b = (s_cc * s_sy - s_cs * s_cy) / det;
    }
    sol.ssr = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double c = std::cos(omega * pts[i].x);
        const double s = std::sin(omega * pts[i].x);
        const double r = pts[i].p - 0.5 - sol.a * c - sol.b * s;
        sol.ssr += weights[i] * r * r;
    }
    return sol;
}

int euclid_mod2(int b) { return ((b % 2) + 2) % 2; }

}  // namespace

double FringeFit::period() const {
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return kTwoPi / (harmonic * alpha);
}

namespace {

struct FitSetup {
    std::vector<double> weights;
    bool have_sigmas;
    double range;
    double min_gap;
};

FitSetup prepare_fit(std::span<const FringePoint> points, int harmonic) {
    if (harmonic != 1 && harmonic != 2) {
        throw std::invalid_argument("fit_fringe: harmonic must be 1 or 2");
    }
    if (points.size() < 5) {
        throw std::invalid_argument("fit_fringe: need at least 5 points");
    }
    std::vector<double> xs;
    xs.reserve(points.size());
    for (const auto& pt : points) {
        if (!std::isfinite(pt.x) || !std::isfinite(pt.p)) {
            throw std::invalid_argument("fit_fringe: non-finite point");
        }
        if (pt.sigma < 0.0) throw std::invalid_argument("fit_fringe: negative sigma");
        xs.push_back(pt.x);
    }
    std::sort(xs.begin(), xs.end());
    FitSetup setup;
    setup.range = xs.back() - xs.front();
    if (!(setup.range > 0.0)) {
        throw std::invalid_argument("fit_fringe: degenerate x range");
    }
    setup.min_gap = setup.range;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double gap = xs[i] - xs[i - 1];
        if (gap > 0.0) setup.min_gap = std::min(setup.min_gap, gap);
    }

    // Weights: inverse variance, flooring zero sigmas at the smallest
    // nonzero sigma; all-zero sigmas mean noiseless data, use unit weights.
    double sigma_floor = std::numeric_limits<double>::infinity();
    for (const auto& pt : points) {
        if (pt.sigma > 0.0) sigma_floor = std::min(sigma_floor, pt.sigma);
    }
    setup.weights.assign(points.size(), 1.0);
    setup.have_sigmas = std::isfinite(sigma_floor);
    if (setup.have_sigmas) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double s = std::max(points[i].sigma, sigma_floor);
            setup.weights[i] = 1.0 / (s * s);
        }
    }
    return setup;
}

FringeFit finalize_fit(std::span<const FringePoint> points, const FitSetup& setup, int harmonic,
                       double alpha, bool alpha_fixed) {
    const double h = static_cast<double>(harmonic);
    const LinearFringeSolution sol = solve_linear(points, setup.weights, h * alpha);
    FringeFit fit;
    fit.harmonic = harmonic;
    fit.alpha = alpha;
    fit.visibility = 2.0 * std::hypot(sol.a, sol.b);
    fit.phase_offset = (fit.visibility > 0.0) ? std::atan2(-sol.b, sol.a) : 0.0;

    double ssr_plain = 0.0;
    for (const auto& pt : points) {
        const double m =
            0.5 + 0.5 * fit.visibility * std::cos(h * alpha * pt.x + fit.phase_offset);
        ssr_plain += (pt.p - m) * (pt.p - m);
    }
    fit.residual_rms = std::sqrt(ssr_plain / static_cast<double>(points.size()));

    if (fit.visibility < 1e-10) {
        fit.alpha_unidentified = !alpha_fixed;
        if (!alpha_fixed) fit.alpha = 0.0;
        fit.phase_offset = 0.0;
        return fit;
    }

    // Covariance of (V, alpha, theta) from the linearized Jacobian; with a
    // pinned alpha only the (V, theta) block is estimated.
    const int n_params = alpha_fixed ? 2 : 3;
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n_params, n_params);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double arg = h * alpha * points[i].x + fit.phase_offset;
        Eigen::VectorXd j(n_params);
        if (alpha_fixed) {
            j << 0.5 * std::cos(arg), -0.5 * fit.visibility * std::sin(arg);
        } else {
            j << 0.5 * std::cos(arg), -0.5 * fit.visibility * h * points[i].x * std::sin(arg),
                -0.5 * fit.visibility * std::sin(arg);
        }
        normal += setup.weights[i] * j * j.transpose();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (lu.isInvertible()) {
        Eigen::MatrixXd cov = lu.inverse();
        if (!setup.have_sigmas) {
            // Unit weights carry no scale; scale by the residual variance.
            const std::size_t dof =
                points.size() > static_cast<std::size_t>(n_params)
                    ? points.size() - static_cast<std::size_t>(n_params)
                    : 1;
            cov *= ssr_plain / static_cast<double>(dof);
        }
        cov = (cov + cov.transpose()) / 2.0;
        if (alpha_fixed) {
            fit.covariance.setZero();
            fit.covariance(0, 0) = cov(0, 0);
            fit.covariance(0, 2) = fit.covariance(2, 0) = cov(0, 1);
            fit.covariance(2, 2) = cov(1, 1);
        } else {
            fit.covariance = cov;
        }
    } else {
        fit.alpha_unidentified = true;
    }

    if (fit.visibility > 1.0 + 3.0 * fit.visibility_sigma()) {
        fit.unphysical_visibility = true;
    }
    return fit;
}

}  // namespace

FringeFit fit_fringe(std::span<const FringePoint> points, int harmonic) {
    const FitSetup setup = prepare_fit(points, harmonic);
    const double h = static_cast<double>(harmonic);
    const double alpha_max = std::numbers::pi / (h * setup.min_gap);
    const double alpha_min = 1e-3 * std::numbers::pi / (h * setup.range);
    const auto ssr_at = [&](double alpha) {
        return solve_linear(points, setup.weights, h * alpha).ssr;
    };

    // Grid fine enough that adjacent trials shift the total phase across
    // the x range by at most pi/8, so the global basin cannot be skipped.
    int n_grid = static_cast<int>(std::ceil((alpha_max - alpha_min) * h * setup.range * 8.0 /
                                            std::numbers::pi)) + 1;
    n_grid = std::clamp(n_grid, 64, 20000);
    double best_alpha = alpha_min;
    double best_ssr = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k < n_grid; ++k) {
        const double alpha = alpha_min + (alpha_max - alpha_min) * k / (n_grid - 1);
        const double ssr = ssr_at(alpha);
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_alpha = alpha;
            best_k = k;
        }
    }
    const double step = (alpha_max - alpha_min) / (n_grid - 1);
    const double lo = (best_k == 0) ? best_alpha : best_alpha - step;
    const double hi = (best_k == n_grid - 1) ? best_alpha : best_alpha + step;
    const double alpha = parabolic_refine(ssr_at, lo, std::clamp(best_alpha, lo, hi), hi,
                                          1e-13 * std::max(1.0, alpha_max));
    return finalize_fit(points, setup, harmonic, alpha, /*alpha_fixed=*/false);
}

FringeFit fit_fringe_at(std::span<const FringePoint> points, int harmonic, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("fit_fringe_at: alpha must be finite and > 0");
    }
    const FitSetup setup = prepare_fit(points, harmonic);
    return finalize_fit(points, setup, harmonic, alpha, /*alpha_fixed=*/true);
}

double phase_to_index(double phi, double wavelength_um, double channel_length_um) {
    if (!(wavelength_um > 0.0 && channel_length_um > 0.0)) {
        throw std::invalid_argument("phase_to_index: wavelength and length must be > 0");
    }
    return wavelength_um * phi / (kTwoPi * channel_length_um);
}

std::vector<PhaseSample> extract_phases(const FringeFit& fit,
                                        std::span<const FringePoint> points) {
    if (!(fit.visibility > 0.0)) {
        throw std::invalid_argument("extract_phases: fit visibility must be > 0");
    }
    const double h = static_cast<double>(fit.harmonic);
    std::vector<PhaseSample> out;
    out.reserve(points.size());
    for (const auto& pt : points) {
        const double y = std::clamp((2.0 * pt.p - 1.0) / fit.visibility, -1.0, 1.0);
        const double psi = std::acos(y);
        // Candidate fringe arguments +-psi + 2 pi k; take the one nearest
        // the fit's own prediction h alpha x + theta.
        const double target = h * fit.alpha * pt.x + fit.phase_offset;
        double best_arg = psi;
        double best_dist = std::numeric_limits<double>::infinity();
        for (double s : {1.0, -1.0}) {
            const double k = std::round((target - s * psi) / kTwoPi);
            const double arg = s * psi + kTwoPi * k;
            const double dist = std::abs(arg - target);
            if (dist < best_dist) {
                best_dist = dist;
                best_arg = arg;
            }
        }
        const double denom = std::sqrt(std::max(1.0 - y * y, 1e-12));
        out.push_back({pt.x, (best_arg - fit.phase_offset) / h,
                       2.0 * pt.sigma / (fit.visibility * h * denom)});
    }
    return out;
}

IndexRegression fit_index_slope(std::span<const std::pair<double, double>> data) {
    const std::size_t n = data.size();
    if (n < 3) throw std::invalid_argument("fit_index_slope: need at least 3 points");
    double cx = 0.0, cy = 0.0;
    for (const auto& [c, dn] : data) {
        cx += c;
        cy += dn;
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [c, dn] : data) {
        sxx += (c - cx) * (c - cx);
        sxy += (c - cx) * (dn - cy);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_index_slope: zero concentration spread");
    IndexRegression reg;
    reg.slope = sxy / sxx;
    reg.intercept = cy - reg.slope * cx;
    double ssr = 0.0;
    for (const auto& [c, dn] : data) {
        const double r = dn - (reg.slope * c + reg.intercept);
        ssr += r * r;
    }
    reg.slope_err = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    return reg;
}

ConcentrationEstimate estimate_concentration(const FringeFit& fit, const Observation& obs,
                                             std::optional<int> branch_hint) {
    if (!(fit.visibility > 0.0)) {
        throw std::invalid_argument("estimate_concentration: fit visibility must be > 0");
    }
    if (fit.alpha_unidentified || fit.alpha == 0.0) {
        throw std::invalid_argument("estimate_concentration: fit has no phase scale");
    }
    if (!(obs.p11 >= 0.0 && obs.p11 <= 1.0)) {
        throw std::invalid_argument("estimate_concentration: p11 must lie in [0, 1]");
    }
    const double v = fit.visibility;
    const double raw_y = (2.0 * obs.p11 - 1.0) / v;
    if (std::abs(2.0 * obs.p11 - 1.0) > v * (1.0 + 1e-12)) {
        throw std::domain_error(
            "estimate_concentration: observation outside the fringe range [(1-V)/2, (1+V)/2]");
    }
    const double y = std::clamp(raw_y, -1.0, 1.0);
    const double psi = std::acos(y);

    // At a fringe extremum the two mirror solutions coincide and no hint is
    // needed; anywhere else the caller must disambiguate.
    const bool at_extremum = psi < 1e-9 || std::numbers::pi - psi < 1e-9;
    if (!branch_hint && !at_extremum) {
        throw std::invalid_argument(
            "estimate_concentration: inversion is ambiguous, provide a branch hint");
    }
    const int b = branch_hint.value_or(0);
    const double sign = (euclid_mod2(b) == 0) ? 1.0 : -1.0;
    const int m = (b - euclid_mod2(b)) / 2;
    const double h = static_cast<double>(fit.harmonic);
    const double ha = h * fit.alpha;
    const double c = (sign * psi - fit.phase_offset + kTwoPi * m) / ha;

    // Delta-method error: observation plus fit-parameter covariance.
    const double root = std::sqrt(std::max(1.0 - y * y, 1e-12));
    const double dc_dp = -sign * 2.0 / (v * root) / ha;
    Eigen::Vector3d g;
    g << sign * y / (ha * v * root),  // d/dV
         -c / fit.alpha,              // d/dalpha
         -1.0 / ha;                   // d/dtheta
    const double var_fit = g.dot(fit.covariance * g);
    const double var = dc_dp * dc_dp * obs.sigma * obs.sigma + std::max(var_fit, 0.0);
    const double sigma = std::sqrt(var);
    return ConcentrationEstimate{c, sigma, c - 1.96 * sigma, c + 1.96 * sigma};
}

HomDipFit fit_hom_dip(std::span<const sim::HomPoint> points) {
    if (points.size() < 5) throw std::invalid_argument("fit_hom_dip: need at least 5 points");
    double dmin = points[0].delay, dmax = points[0].delay;
    for (const auto& pt : points) {
        dmin = std::min(dmin, pt.delay);
        dmax = std::max(dmax, pt.delay);
    }
    const double span = dmax - dmin;
    if (!(span > 0.0)) throw std::invalid_argument("fit_hom_dip: degenerate delay range");

    struct Linear {
        double baseline, depth, ssr;
    };
    const auto solve_at = [&](double width) -> Linear {
        double s_11 = 0.0, s_1g = 0.0, s_gg = 0.0, s_1y = 0.0, s_gy = 0.0;
        for (const auto& pt : points) {
            const double z = pt.delay / width;
            const double g = std::exp(-0.5 * z * z);
            s_11 += 1.0;
            s_1g += g;
            s_gg += g * g;
            s_1y += pt.coincidences;
            s_gy += g * pt.coincidences;
        }
        const double det = s_11 * s_gg - s_1g * s_1g;
        Linear lin{0.0, 0.0, std::numeric_limits<double>::infinity()};
        if (std::abs(det) < 1e-12 * std::max(1.0, s_11 * s_gg)) return lin;
        lin.baseline = (s_gg * s_1y - s_1g * s_gy) / det;
        lin.depth = -(s_11 * s_gy - s_1g * s_1y) / det;
        lin.ssr = 0.0;
        for (const auto& pt : points) {
            const double z = pt.delay / width;
            const double m = lin.baseline - lin.depth * std::exp(-0.5 * z * z);
            lin.ssr += (pt.coincidences - m) * (pt.coincidences - m);
        }
        return lin;
    };
    const auto ssr_at = [&](double width) { return solve_at(width).ssr; };

    const double w_lo = span / 100.0, w_hi = span;
    const int n_grid = 80;
    double best_w = w_lo, best_ssr = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k < n_grid; ++k) {
        const double w = w_lo * std::pow(w_hi / w_lo, static_cast<double>(k) / (n_grid - 1));
        const double ssr = ssr_at(w);
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_w = w;
            best_k = k;
        }
    }
    const double ratio = std::pow(w_hi / w_lo, 1.0 / (n_grid - 1));
    const double lo = (best_k == 0) ? best_w : best_w / ratio;
    const double hi = (best_k == n_grid - 1) ? best_w : best_w * ratio;
    const double width = parabolic_refine(ssr_at, lo, std::clamp(best_w, lo, hi), hi,
                                          1e-10 * w_hi);
    const Linear lin = solve_at(width);
    HomDipFit fit;
    fit.baseline = lin.baseline;
    fit.width = width;
    fit.visibility = (lin.baseline > 0.0) ? lin.depth / lin.baseline : 0.0;
    fit.residual_rms = std::sqrt(lin.ssr / static_cast<double>(points.size()));
    return fit;
}

std::vector<FringePoint> fringe_points_from_sweep(const std::vector<sim::SweepPoint>& sweep,
                                                  int harmonic) {
    if (harmonic != 1 && harmonic != 2) {
        throw std::invalid_argument("fringe_points_from_sweep: harmonic must be 1 or 2");
    }
    std::vector<FringePoint> out;
    out.reserve(sweep.size());
    for (const auto& point : sweep) {
        const auto est = (harmonic == 2) ? counts::normalize_coincidences(point.record)
                                         : counts::normalize_singles(point.record);
        if (!est) continue;
        out.push_back({point.concentration_pct, est->value, est->sigma});
    }
    return out;
}

std::string fringe_fit_to_json(const FringeFit& fit, const std::string& input_digest) {
    nlohmann::json j;
    j["visibility"] = fit.visibility;
    j["visibility_err"] = fit.visibility_sigma();
    j["alpha"] = fit.alpha;
    j["alpha_err"] = fit.alpha_sigma();
    j["phase_offset"] = fit.phase_offset;
    j["phase_offset_err"] = fit.phase_offset_sigma();
    j["harmonic"] = fit.harmonic;
    j["period"] = fit.period();
    j["residual_rms"] = fit.residual_rms;
    j["unphysical_visibility"] = fit.unphysical_visibility;
    j["alpha_unidentified"] = fit.alpha_unidentified;
    auto cov = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < 3; ++c) row.push_back(fit.covariance(r, c));
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["input_digest"] = input_digest;
    return j.dump(2);
}

std::string index_regression_to_json(const IndexRegression& reg,
                                     const std::string& input_digest) {
    nlohmann::json j;
    j["slope"] = reg.slope;
    j["slope_err"] = reg.slope_err;
    j["intercept"] = reg.intercept;
    j["input_digest"] = input_digest;
    return j.dump(2);
}

std::string hex_digest(const std::string& bytes) {
    const std::uint64_t h = rng::fnv1a64(bytes.data(), bytes.size());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace noon::analysis
