#pragma once

#include "noon/fock.hpp"

// Closed-form model of a two-coupler Mach-Zehnder interferometer with
// independent linear loss in each arm, for one- and two-photon inputs.
//
// Layout (4 modes): coupler 1 on modes (0, 1), loss couplers (0, 2) and
// (1, 3) feeding vacuum ancillas, phase e^{i phi} on the sensing mode 0,
// coupler 2 on modes (0, 1). All closed forms below are derived from that
// network and are certified against the noon::fock permanent evaluation;
// the two routes share no code.
namespace noon::mzi {

/// Physical parameters of the lossy interferometer.
struct MziConfig {
    double r1_sq;   ///< coupler-1 power reflectivity R1 in [0, 1]
    double r2_sq;   ///< coupler-2 power reflectivity R2 in [0, 1]
    double tau1;    ///< sensing-arm power transmission, (0, 1]
    double tau2;    ///< reference-arm power transmission, (0, 1]
    double phi0 = 0.0;  ///< static phase offset added to every probe phase

    /// Arm transmissivity ratio tau1 / tau2 (sensing over reference).
    double transmissivity_ratio() const { return tau1 / tau2; }

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// Post-selected two-photon outcome probabilities. p_lost covers every
/// pattern with at least one photon in an ancilla mode; the four fields sum
/// to 1 by construction.
struct OutcomeDistribution {
    double p11;
    double p20;
    double p02;
    double p_lost;
};

/// Level and contrast of the two-photon coincidence fringe
/// P11(phi) = eta * (1 + V cos(2 phi + const)) / 2. eta is recovered as
/// max + min of the exact P11 over one period (no closed form is assumed).
struct TwoPhotonFringeParams {
    double eta;
    double visibility;
};

/// Probabilities for a single photon sent into one real input port.
struct SinglePhotonDistribution {
    double p_out0;
    double p_out1;
    double p_lost;
};

/// The full 4-mode network (2 real modes + 2 loss ancillas) at probe phase
/// phi; the static offset config.phi0 is added to phi.
fock::ModeTransform build_network(const MziConfig& config, double phi);

/// Probability that one photon exits each real port given input |11>.
/// Closed form: with a = 2 r1 t1 r2 t2, K = 2(R1 + R2) - 4 R1 R2 - 1 and
/// c = sqrt(tau1 tau2) K, the coincidence amplitude is
/// -(a (tau1 e^{2 i phi} + tau2) + c e^{i phi}) and
/// P11 = a^2(tau1^2 + tau2^2) + c^2 + 2 a c (tau1 + tau2) cos(phi)
///       + 2 a^2 tau1 tau2 cos(2 phi).
double coincidence_probability(const MziConfig& config, double phi);

/// Analytic d P11 / d phi of the closed form above.
double coincidence_probability_derivative(const MziConfig& config, double phi);

/// Coincidence probability for two fully distinguishable photons (no
/// two-photon interference): |u00 u11|^2 + |u01 u10|^2.
double distinguishable_coincidence_probability(const MziConfig& config, double phi);

/// Probabilities of |11>, |20>, |02> on the real ports plus the loss bucket.
OutcomeDistribution two_photon_distribution(const MziConfig& config, double phi);

/// Single-photon output probabilities for input_port 0 or 1.
SinglePhotonDistribution single_photon_distribution(const MziConfig& config, double phi,
                                                    int input_port);

/// Fringe visibility (max-min)/(max+min) of the single-photon output, in
/// closed form. Equals 2 sqrt(T) / (1 + T) for 50:50 couplers, T = tau1/tau2.
double single_photon_visibility(const MziConfig& config);

/// Level and visibility of the exact two-photon coincidence fringe.
/// For 50:50 couplers this visibility is 2T / (1 + T^2).
TwoPhotonFringeParams two_photon_fringe_params(const MziConfig& config);

/// Dip visibility of a Hong-Ou-Mandel delay scan performed at probe phase
/// phi (default pi/2, the balanced operating point): one minus the ratio of
/// the indistinguishable to the distinguishable coincidence probability.
/// For 50:50 couplers this equals hom_visibility_bound(tau1/tau2) exactly,
/// and it is the loss-limited two-photon visibility figure quoted by
/// two-photon experiments.
double hom_dip_visibility(const MziConfig& config, double phi = 1.5707963267948966);

/// Upper bound on HOM visibility for arm transmissivity ratio T:
/// (4T - (T-1)^2) / (T+1)^2. Symmetric under T -> 1/T; throws for T <= 0.
double hom_visibility_bound(double transmissivity_ratio);

/// Normalized super-resolved fringe (1 + v2 cos(2 phi + phi_tilde0)) / 2.
double two_photon_fringe(double v2, double phi_tilde0, double phi);

}  // namespace noon::mzi
