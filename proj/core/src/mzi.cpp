#include "noon/mzi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noon::mzi {

namespace {

// Amplitude factors shared by the closed forms. r/t are coupler amplitude
// coefficients, rl = sqrt(tau) the arm transmission amplitudes.
struct Amps {
    double r1, t1, r2, t2, rl1, rl2;
};

Amps amps(const MziConfig& c) {
    return Amps{std::sqrt(c.r1_sq),       std::sqrt(1.0 - c.r1_sq),
                std::sqrt(c.r2_sq),       std::sqrt(1.0 - c.r2_sq),
                std::sqrt(c.tau1),        std::sqrt(c.tau2)};
}

// |A e^{i phi} - B|^2 and |A e^{i phi} + B|^2 for real A, B.
double mag2_minus(double a, double b, double cos_phi) {
    return a * a + b * b - 2.0 * a * b * cos_phi;
}
double mag2_plus(double a, double b, double cos_phi) {
    return a * a + b * b + 2.0 * a * b * cos_phi;
}

// Squared moduli of the real-port block of the network:
//   u00 = rl1 r1 r2 e^{i phi} - rl2 t1 t2
//   u01 = i (rl1 t1 r2 e^{i phi} + rl2 r1 t2)
//   u10 = i (rl1 r1 t2 e^{i phi} + rl2 t1 r2)
//   u11 = -(rl1 t1 t2 e^{i phi} - rl2 r1 r2)
struct PortProbs {
    double u00, u01, u10, u11;
};

PortProbs port_probs(const MziConfig& c, double phi) {
    const Amps a = amps(c);
    const double x = std::cos(phi + c.phi0);
    return PortProbs{
        mag2_minus(a.rl1 * a.r1 * a.r2, a.rl2 * a.t1 * a.t2, x),
        mag2_plus(a.rl1 * a.t1 * a.r2, a.rl2 * a.r1 * a.t2, x),
        mag2_plus(a.rl1 * a.r1 * a.t2, a.rl2 * a.t1 * a.r2, x),
        mag2_minus(a.rl1 * a.t1 * a.t2, a.rl2 * a.r1 * a.r2, x),
    };
}

struct FringeCoeffs {
    // P11(phi) = a0 + b1 cos(phi) + b2 cos(2 phi), phi measured after the
    // static offset.
    double a0, b1, b2;
};

FringeCoeffs fringe_coeffs(const MziConfig& c) {
    const Amps m = amps(c);
    const double a = 2.0 * m.r1 * m.t1 * m.r2 * m.t2;
    const double k = 2.0 * (c.r1_sq + c.r2_sq) - 4.0 * c.r1_sq * c.r2_sq - 1.0;
    const double cc = m.rl1 * m.rl2 * k;
    return FringeCoeffs{
        a * a * (c.tau1 * c.tau1 + c.tau2 * c.tau2) + cc * cc,
        2.0 * a * cc * (c.tau1 + c.tau2),
        2.0 * a * a * c.tau1 * c.tau2,
    };
}

}  // namespace

void MziConfig::validate() const {
    if (!(r1_sq >= 0.0 && r1_sq <= 1.0)) {
        throw std::invalid_argument("MziConfig: r1_sq must lie in [0, 1]");
    }
    if (!(r2_sq >= 0.0 && r2_sq <= 1.0)) {
        throw std::invalid_argument("MziConfig: r2_sq must lie in [0, 1]");
    }
    if (!(tau1 > 0.0 && tau1 <= 1.0)) {
        throw std::invalid_argument("MziConfig: tau1 must lie in (0, 1]");
    }
    if (!(tau2 > 0.0 && tau2 <= 1.0)) {
        throw std::invalid_argument("MziConfig: tau2 must lie in (0, 1]");
    }
    if (!std::isfinite(phi0)) {
        throw std::invalid_argument("MziConfig: phi0 must be finite");
    }
}

fock::ModeTransform build_network(const MziConfig& config, double phi) {
    config.validate();
    const int modes[][2] = {{0, 1}, {0, 2}, {1, 3}};
    const int phase_mode[] = {0};
    const auto c1 = fock::embed(fock::build_coupler(config.r1_sq), modes[0], 4);
    const auto l1 = fock::embed(fock::build_coupler(config.tau1), modes[1], 4);
    const auto l2 = fock::embed(fock::build_coupler(config.tau2), modes[2], 4);
    const auto ph = fock::embed(fock::build_phase(phi + config.phi0), phase_mode, 4);
    const auto c2 = fock::embed(fock::build_coupler(config.r2_sq), modes[0], 4);
    return c2 * ph * l1 * l2 * c1;
}

double coincidence_probability(const MziConfig& config, double phi) {
    config.validate();
    const FringeCoeffs f = fringe_coeffs(config);
    const double p = phi + config.phi0;
    return f.a0 + f.b1 * std::cos(p) + f.b2 * std::cos(2.0 * p);
}

double coincidence_probability_derivative(const MziConfig& config, double phi) {
    config.validate();
    const FringeCoeffs f = fringe_coeffs(config);
    const double p = phi + config.phi0;
    return -f.b1 * std::sin(p) - 2.0 * f.b2 * std::sin(2.0 * p);
}

double distinguishable_coincidence_probability(const MziConfig& config, double phi) {
    config.validate();
    const PortProbs u = port_probs(config, phi);
    return u.u00 * u.u11 + u.u01 * u.u10;
}

OutcomeDistribution two_photon_distribution(const MziConfig& config, double phi) {
    config.validate();
    const PortProbs u = port_probs(config, phi);
    const double p11 = coincidence_probability(config, phi);
    const double p20 = 2.0 * u.u00 * u.u01;
    const double p02 = 2.0 * u.u10 * u.u11;
    return OutcomeDistribution{p11, p20, p02, 1.0 - p11 - p20 - p02};
}

SinglePhotonDistribution single_photon_distribution(const MziConfig& config, double phi,
                                                    int input_port) {
    config.validate();
    if (input_port != 0 && input_port != 1) {
        throw std::invalid_argument("single_photon_distribution: input_port must be 0 or 1");
    }
    const PortProbs u = port_probs(config, phi);
    const double p0 = (input_port == 0) ? u.u00 : u.u01;
    const double p1 = (input_port == 0) ? u.u10 : u.u11;
    return SinglePhotonDistribution{p0, p1, 1.0 - p0 - p1};
}

double single_photon_visibility(const MziConfig& config) {
    config.validate();
    const Amps m = amps(config);
    // p_out0(phi) = A^2 + B^2 - 2AB cos(phi) with A, B below; the fringe
    // visibility is 2AB / (A^2 + B^2).
    const double a = m.rl1 * m.r1 * m.r2;
    const double b = m.rl2 * m.t1 * m.t2;
    const double denom = a * a + b * b;
    if (denom <= 0.0) return 0.0;
    return 2.0 * a * b / denom;
}

TwoPhotonFringeParams two_photon_fringe_params(const MziConfig& config) {
    config.validate();
    const FringeCoeffs f = fringe_coeffs(config);
    // Extrema of a0 + b1 cos(phi) + b2 cos(2 phi): phi in {0, pi} plus the
    // interior stationary point cos(phi) = -b1 / (4 b2) when it exists.
    auto value_at = [&](double cos_phi) {
        return f.a0 + f.b1 * cos_phi + f.b2 * (2.0 * cos_phi * cos_phi - 1.0);
    };
    double pmax = std::max(value_at(1.0), value_at(-1.0));
    double pmin = std::min(value_at(1.0), value_at(-1.0));
    if (f.b2 != 0.0) {
        const double xs = -f.b1 / (4.0 * f.b2);
        if (xs > -1.0 && xs < 1.0) {
            const double v = value_at(xs);
            pmax = std::max(pmax, v);
            pmin = std::min(pmin, v);
        }
    }
    const double eta = pmax + pmin;
    const double vis = (eta > 0.0) ? (pmax - pmin) / eta : 0.0;
    return TwoPhotonFringeParams{eta, vis};
}

double hom_dip_visibility(const MziConfig& config, double phi) {
    config.validate();
    const double p_dist = distinguishable_coincidence_probability(config, phi);
    if (p_dist <= 0.0) return 0.0;
    return 1.0 - coincidence_probability(config, phi) / p_dist;
}

double hom_visibility_bound(double transmissivity_ratio) {
    if (!(transmissivity_ratio > 0.0)) {
        throw std::domain_error("hom_visibility_bound: ratio must be > 0");
    }
    const double t = transmissivity_ratio;
    return (4.0 * t - (t - 1.0) * (t - 1.0)) / ((t + 1.0) * (t + 1.0));
}

double two_photon_fringe(double v2, double phi_tilde0, double phi) {
    if (!(v2 >= 0.0 && v2 <= 1.0)) {
        throw std::invalid_argument("two_photon_fringe: visibility must lie in [0, 1]");
    }
    return (1.0 + v2 * std::cos(2.0 * phi + phi_tilde0)) / 2.0;
}

}  // namespace noon::mzi
