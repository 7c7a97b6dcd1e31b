#pragma once

#include <Eigen/Core>

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <vector>

// Minimal multimode bosonic Fock simulator for up to two photons.
//
// Mode convention used throughout the project: a ModeTransform U maps a
// single photon entering mode j to the output superposition given by column
// j of U, i.e. U(k, j) is the amplitude for the j -> k transition. Couplers
// carry the symmetric phase convention with the imaginary unit on the cross
// term, [[r, i t], [i t, r]]; every loss channel is represented by coupling
// to an extra vacuum ancilla mode, never by a sub-unitary matrix.
namespace noon::fock {

using Complex = std::complex<double>;

/// Tolerance on max|U†U - I| accepted when constructing a ModeTransform.
inline constexpr double kUnitarityTolerance = 1e-12;

/// An m x m unitary acting on bosonic mode creation operators.
class ModeTransform {
public:
    /// Validates squareness and unitarity (throws std::invalid_argument).
    explicit ModeTransform(Eigen::MatrixXcd entries);

    static ModeTransform identity(int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return entries_; }

    /// max|U†U - I| of the stored matrix.
    double unitarity_residual() const;

private:
    Eigen::MatrixXcd entries_;
};

/// Composition: (a * b) applies b first, then a.
ModeTransform operator*(const ModeTransform& a, const ModeTransform& b);

/// Photon occupation numbers per mode.
struct OccupationPattern {
    std::vector<int> counts;

    int dim() const { return static_cast<int>(counts.size()); }
    int total() const;

    /// Pattern with single photons in modes i and j (i == j gives a doubly
    /// occupied mode).
    static OccupationPattern pair(int dim, int mode_i, int mode_j);
    static OccupationPattern single(int dim, int mode);

    auto operator<=>(const OccupationPattern&) const = default;
};

/// Pairwise indistinguishability of two photons; 1 = identical wavepackets.
struct OverlapParameter {
    double gamma = 1.0;

    explicit OverlapParameter(double g);
};

/// Two-mode coupler of power reflectivity R: [[r, i t], [i t, r]] with
/// r = sqrt(R), t = sqrt(1 - R).
ModeTransform build_coupler(double reflectivity);

/// Single-mode phase shifter [[e^{i phi}]].
ModeTransform build_phase(double phi);

/// Places `transform` on the listed modes of a larger identity network.
/// target_modes must be distinct, in range, and match transform.dim().
ModeTransform embed(const ModeTransform& transform, std::span<const int> target_modes,
                    int total_dim);

/// Permanent of a small complex matrix (n <= 3; two photons only ever need
/// n = 2, the 3 x 3 case is kept for cross-checks).
Complex permanent(const Eigen::MatrixXcd& m);

/// Output amplitudes for a two-photon input state.
///
/// For an input pattern T and output pattern S the amplitude is
/// per(U_{S,T}) / sqrt(prod_i S_i! prod_j T_j!), with U_{S,T} built by
/// repeating rows (columns) of U according to S (T). The returned map covers
/// every two-photon output pattern; probabilities sum to 1.
std::map<OccupationPattern, Complex> two_photon_amplitudes(const ModeTransform& u,
                                                           const OccupationPattern& input);

/// Column `input_mode` of U: the single-photon output amplitudes.
Eigen::VectorXcd single_photon_amplitudes(const ModeTransform& u, int input_mode);

/// Coincidence probability of a partially distinguishable photon pair:
/// gamma * p_indist + (1 - gamma) * p_dist.
double mixed_coincidence(double p_indist, double p_dist, const OverlapParameter& overlap);

}  // namespace noon::fock
