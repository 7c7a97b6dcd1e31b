#pragma once

#include "noon/mzi.hpp"

#include <iosfwd>
#include <optional>
#include <string>

// Drift-robust estimators turning raw singles/coincidence counts into
// normalized outcome probabilities. The geometric-mean ratios cancel every
// detector efficiency and injection rate exactly, so slow drifts in
// coupling or source brightness do not masquerade as phase shifts.
namespace noon::counts {

/// Raw counts for one exposure. Singles Xk are counts at detector X with
/// photons injected into input k; coincidences pair the four detectors
/// (A, C monitor output 0; B, D monitor output 1).
struct CountRecord {
    double exposure = 1.0;  ///< seconds
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;  ///< singles
    double ab = 0.0, cd = 0.0, ac = 0.0, bd = 0.0;  ///< coincidences

    void validate() const;  // non-negative counts, positive exposure
};

/// Detection efficiencies and injection rates of the forward model.
/// eta_X absorbs output coupling loss, fiber-splitter ratio and detector
/// efficiency for detector X; N1/N2 are single-photon injection rates and
/// n_pairs the photon-pair injection rate, all per second.
struct EfficiencyModel {
    double eta_a = 1.0, eta_b = 1.0, eta_c = 1.0, eta_d = 1.0;
    double n1 = 1.0, n2 = 1.0, n_pairs = 1.0;

    void validate() const;  // efficiencies in (0, 1], rates > 0
};

/// A normalized estimate with its delta-method standard error (Poisson
/// counting statistics propagated through the geometric-mean ratio).
struct NormalizedEstimate {
    double value;
    double sigma;
};

/// Estimated p(|01>) from the singles of a record:
/// sqrt(A2 B1) / (sqrt(A2 B1) + sqrt(A1 B2)).
/// Returns nullopt ("no data") when both geometric means vanish.
std::optional<NormalizedEstimate> normalize_singles(const CountRecord& rec);

/// Estimated p(|11>) from the coincidences of a record:
/// sqrt(AB CD) / (sqrt(AB CD) + sqrt(AC BD)). Equals
/// N11 / (N11 + N20 + N02) under the forward model with N20 = N02.
/// Returns nullopt ("no data") when both geometric means vanish.
std::optional<NormalizedEstimate> normalize_coincidences(const CountRecord& rec);

/// Expected (real-valued) counts for one exposure:
///   A1 = p10 eta_A N1 ... B2 = p10 eta_B N2,
///   AB = N11 eta_A eta_B, CD = N11 eta_C eta_D,
///   AC = 2 N20 eta_A eta_C, BD = 2 N02 eta_B eta_D,
/// with N_ij = dist.p_ij * n_pairs * exposure. The factor 2 counts the two
/// equivalent paths a bunched pair can take through a fiber splitter.
CountRecord forward_model(const EfficiencyModel& eff, const mzi::OutcomeDistribution& dist,
                          double p10, double p01, double exposure);

/// CSV column header for a serialized CountRecord.
inline constexpr const char* kCountCsvHeader = "exposure,A1,A2,B1,B2,AB,CD,AC,BD";

std::string to_csv_row(const CountRecord& rec);

/// Parses a CSV row in kCountCsvHeader order; throws std::invalid_argument
/// naming the offending field on malformed input.
CountRecord count_record_from_csv_row(const std::string& row);

std::string count_record_to_json(const CountRecord& rec);
CountRecord count_record_from_json(const std::string& text);

}  // namespace noon::counts
