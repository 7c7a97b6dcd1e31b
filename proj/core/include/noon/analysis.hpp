#pragma once

#include "noon/counts.hpp"
#include "noon/experiment.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Estimation pipeline: fringe fitting on normalized data, phase to
// refractive-index conversion, index-versus-concentration regression, and
// inverse concentration estimation.
namespace noon::analysis {

/// One normalized data point: abscissa x (concentration), probability p,
/// and its standard error sigma.
struct FringePoint {
    double x;
    double p;
    double sigma;
};

/// Result of a sinusoidal fringe fit p(x) = (1 + V cos(h a x + theta)) / 2.
///
/// covariance orders the parameters (V, alpha, theta). The flags mark fits
/// whose visibility exceeds 1 beyond 3 sigma, and flat data on which the
/// phase scale cannot be identified.
struct FringeFit {
    double visibility = 0.0;
    double alpha = 0.0;         ///< radians per x-unit
    double phase_offset = 0.0;  ///< theta, radians
    int harmonic = 1;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    double residual_rms = 0.0;
    bool unphysical_visibility = false;
    bool alpha_unidentified = false;

    double visibility_sigma() const { return std::sqrt(covariance(0, 0)); }
    double alpha_sigma() const { return std::sqrt(covariance(1, 1)); }
    double phase_offset_sigma() const { return std::sqrt(covariance(2, 2)); }

    /// Period of the fitted fringe in x units: 2 pi / (h alpha).
    double period() const;
};

/// Weighted least-squares fit of (1 + V cos(h alpha x + theta)) / 2.
///
/// For a trial alpha the model is linear in (V cos theta, V sin theta); the
/// outer 1-D search scans alpha over a bounded grid and refines the best
/// cell by successive parabolic interpolation. Requires >= 5 points and a
/// non-degenerate x range; zero sigmas are floored at the smallest nonzero
/// sigma (all-zero sigmas fall back to unit weights).
FringeFit fit_fringe(std::span<const FringePoint> points, int harmonic);

/// Same fit with the phase scale alpha pinned (no outer search): only V and
/// theta are estimated. This is the fit that makes harmonics comparable --
/// a free alpha lets the harmonic-1 model absorb a doubled frequency, while
/// at a shared alpha super-resolved data leaves a harmonic-1 fit with large
/// residuals.
FringeFit fit_fringe_at(std::span<const FringePoint> points, int harmonic, double alpha);

/// Refractive index change from phase: lambda phi / (2 pi L).
double phase_to_index(double phi, double wavelength_um, double channel_length_um);

/// Per-point phase extracted by inverting the fitted fringe.
struct PhaseSample {
    double x;
    double phi;        ///< radians, offset-free (theta removed, divided by h)
    double sigma_phi;  ///< delta-method error from the point's sigma
};

/// Inverts each point on the fitted fringe, choosing the branch closest to
/// the fit's own prediction alpha * x. Values outside the fringe range are
/// clamped to the nearest extremum before inversion.
std::vector<PhaseSample> extract_phases(const FringeFit& fit,
                                        std::span<const FringePoint> points);

/// Ordinary least-squares line of index change versus concentration.
struct IndexRegression {
    double slope;      ///< index units per % concentration
    double slope_err;  ///< standard error from residual variance
    double intercept;
};

/// Fits dn = slope * C + intercept; needs >= 3 points with spread in C.
IndexRegression fit_index_slope(std::span<const std::pair<double, double>> data);

/// A single normalized observation with its standard error.
struct Observation {
    double p11;
    double sigma = 0.0;
};

struct ConcentrationEstimate {
    double concentration;
    double sigma;
    double ci_low;   ///< 95% interval bounds
    double ci_high;
};

/// Inverts p = (1 + V cos(h alpha C + theta)) / 2 for C.
///
/// The inversion is multivalued: within each 2 pi / (h alpha) period there
/// are two mirror solutions. branch 2m selects +acos on period m, branch
/// 2m + 1 the -acos solution. A missing branch is accepted only when the
/// observation pins a fringe extremum (both solutions coincide); otherwise
/// an error demands disambiguation. Observations outside
/// [(1 - V)/2, (1 + V)/2] are rejected.
ConcentrationEstimate estimate_concentration(const FringeFit& fit, const Observation& obs,
                                             std::optional<int> branch_hint);

/// Gaussian dip fit for HOM delay scans:
/// c(d) = B (1 - V exp(-d^2 / (2 w^2))).
struct HomDipFit {
    double baseline;
    double visibility;
    double width;
    double residual_rms;
};

/// Fits the Gaussian dip by scanning the width over a grid (linear solve in
/// baseline and dip depth at each trial width) and refining the best cell.
HomDipFit fit_hom_dip(std::span<const sim::HomPoint> points);

/// Normalized fringe points from a sweep dataset: harmonic 1 takes the
/// singles estimator, harmonic 2 the coincidence estimator. Rows that carry
/// no data for the chosen estimator are skipped.
std::vector<FringePoint> fringe_points_from_sweep(const std::vector<sim::SweepPoint>& sweep,
                                                  int harmonic);

/// Fit report as JSON, including an input-file digest for provenance.
std::string fringe_fit_to_json(const FringeFit& fit, const std::string& input_digest);

/// Regression report as JSON, same provenance convention.
std::string index_regression_to_json(const IndexRegression& reg,
                                     const std::string& input_digest);

/// FNV-1a digest of a byte buffer, rendered as 16 hex digits.
std::string hex_digest(const std::string& bytes);

/// Published refractive-index increment of aqueous BSA (Barer & Joseph
/// 1954, at 578 nm), kept as a comparison constant for slope fits.
inline constexpr double kBsaRefractiveIncrementLiterature = 1.82e-3;

}  // namespace noon::analysis
