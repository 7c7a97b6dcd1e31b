#pragma once

#include "noon/mzi.hpp"

#include <Eigen/Core>

#include <optional>

// Phase-estimation figures of merit for the two-photon coincidence
// measurement: per-trial binomial variance, phase variance, and the
// sensitivity S = max_phi |dP/dphi| / sqrt(P (1 - P)).
namespace noon::metrology {

/// Binomial variance p (1 - p) of a post-selected outcome.
double outcome_variance(double p);

/// Phase variance delta(phi)^2 = P(1-P) / (dP/dphi)^2 at a working point.
/// Returns nullopt at stationary points (|dP/dphi| < 1e-12), where the
/// phase carries no first-order information.
std::optional<double> phase_variance(const mzi::MziConfig& config, double phi);

/// Sensitivity S = sqrt(max_phi (dP/dphi)^2 / (P(1-P))), maximized over a
/// 720-point grid on [0, 2 pi) followed by golden-section refinement to
/// 1e-10 in phi. Returns 0 for a flat coincidence fringe.
double sensitivity(const mzi::MziConfig& config);

/// Sensitivity over a uniform grid of coupler reflectivities (R1, R2) in
/// [0, 1]^2 at fixed arm transmissions.
struct SensitivityMap {
    Eigen::MatrixXd values;  ///< values(i, j) = S at R1 = i/(n-1), R2 = j/(n-1)
    int argmax_row;
    int argmax_col;

    int grid_n() const { return static_cast<int>(values.rows()); }
    double r1_at(int i) const { return static_cast<double>(i) / (grid_n() - 1); }
    double r2_at(int j) const { return static_cast<double>(j) / (grid_n() - 1); }
};

SensitivityMap sensitivity_map(double tau1, double tau2, int grid_n);

/// Standard quantum limit and Heisenberg limit on delta(phi) for n photons.
struct PhaseLimits {
    double sql;        ///< 1 / sqrt(n)
    double heisenberg; ///< 1 / n
};

PhaseLimits limits(int n);

/// Two-photon fringe visibility above which the phase uncertainty can beat
/// the standard quantum limit: 1 / sqrt(2).
double supersensitivity_threshold();

/// True when the given visibility exceeds the supersensitivity threshold.
bool exceeds_supersensitivity(double visibility);

}  // namespace noon::metrology
