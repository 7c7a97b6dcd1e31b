#pragma once

#include "noon/experiment.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// JSON run manifest: the single document that captures interferometer,
// sample and plan parameters (plus an optional HOM scan block) so that a
// simulated run can be reproduced bit-for-bit from the file alone.
namespace noon::sim {

/// Raised on malformed manifests; the message names the offending field.
class ManifestError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Delay-scan block of a manifest: a uniform grid of relative delays plus
/// the pair coherence scale (same units as the delays).
struct HomSpec {
    double delay_min;
    double delay_max;
    int points;
    double coherence_scale;

    void validate() const;
    std::vector<double> delays() const;
};

struct RunManifest {
    mzi::MziConfig mzi;
    SampleModel sample;
    RunPlan plan;
    std::optional<HomSpec> hom;

    void validate() const;
};

/// Parses and validates a manifest document; throws ManifestError with a
/// field-level message on malformed input.
RunManifest parse_run_manifest(const std::string& json_text);

/// Serializes a manifest (inverse of parse_run_manifest).
std::string run_manifest_to_json(const RunManifest& manifest);

}  // namespace noon::sim
