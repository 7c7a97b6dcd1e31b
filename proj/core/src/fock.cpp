#include "noon/fock.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noon::fock {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

}  // namespace

ModeTransform::ModeTransform(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("ModeTransform: matrix must be square and non-empty");
    }
    if (unitarity_residual() > kUnitarityTolerance) {
        throw std::invalid_argument("ModeTransform: matrix is not unitary to 1e-12");
    }
}

ModeTransform ModeTransform::identity(int dim) {
    if (dim <= 0) throw std::invalid_argument("ModeTransform::identity: dim must be positive");
    return ModeTransform(Eigen::MatrixXcd::Identity(dim, dim));
}

double ModeTransform::unitarity_residual() const {
    const Eigen::MatrixXcd gram = entries_.adjoint() * entries_;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(entries_.rows(), entries_.cols());
    return (gram - id).cwiseAbs().maxCoeff();
}

ModeTransform operator*(const ModeTransform& a, const ModeTransform& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("ModeTransform composition: dimension mismatch");
    }
    return ModeTransform(a.matrix() * b.matrix());
}

int OccupationPattern::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0);
}

OccupationPattern OccupationPattern::pair(int dim, int mode_i, int mode_j) {
    if (mode_i < 0 || mode_j < 0 || mode_i >= dim || mode_j >= dim) {
        throw std::invalid_argument("OccupationPattern::pair: mode index out of range");
    }
    OccupationPattern p{std::vector<int>(static_cast<std::size_t>(dim), 0)};
    p.counts[static_cast<std::size_t>(mode_i)] += 1;
    p.counts[static_cast<std::size_t>(mode_j)] += 1;
    return p;
}

OccupationPattern OccupationPattern::single(int dim, int mode) {
    if (mode < 0 || mode >= dim) {
        throw std::invalid_argument("OccupationPattern::single: mode index out of range");
    }
    OccupationPattern p{std::vector<int>(static_cast<std::size_t>(dim), 0)};
    p.counts[static_cast<std::size_t>(mode)] = 1;
    return p;
}

OverlapParameter::OverlapParameter(double g) : gamma(g) {
    if (!(g >= 0.0 && g <= 1.0)) {
        throw std::invalid_argument("OverlapParameter: gamma must lie in [0, 1]");
    }
}

ModeTransform build_coupler(double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw std::invalid_argument("build_coupler: reflectivity must lie in [0, 1]");
    }
    const double r = std::sqrt(reflectivity);
    const double t = std::sqrt(1.0 - reflectivity);
    Eigen::MatrixXcd m(2, 2);
    m << Complex(r, 0.0), Complex(0.0, t),
         Complex(0.0, t), Complex(r, 0.0);
    return ModeTransform(std::move(m));
}

ModeTransform build_phase(double phi) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::polar(1.0, phi);
    return ModeTransform(std::move(m));
}

ModeTransform embed(const ModeTransform& transform, std::span<const int> target_modes,
                    int total_dim) {
    if (total_dim <= 0) throw std::invalid_argument("embed: total_dim must be positive");
    if (static_cast<int>(target_modes.size()) != transform.dim()) {
        throw std::invalid_argument("embed: target_modes count must equal transform dim");
    }
    std::vector<bool> seen(static_cast<std::size_t>(total_dim), false);
    for (int m : target_modes) {
        if (m < 0 || m >= total_dim) throw std::invalid_argument("embed: mode index out of range");
        if (seen[static_cast<std::size_t>(m)]) {
            throw std::invalid_argument("embed: duplicate mode index");
        }
        seen[static_cast<std::size_t>(m)] = true;
    }
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(total_dim, total_dim);
    for (int a = 0; a < transform.dim(); ++a) {
        for (int b = 0; b < transform.dim(); ++b) {
            big(target_modes[static_cast<std::size_t>(a)],
                target_modes[static_cast<std::size_t>(b)]) = transform.matrix()(a, b);
        }
    }
    return ModeTransform(std::move(big));
}

Complex permanent(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("permanent: matrix must be square");
    switch (m.rows()) {
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) + m(0, 1) * m(1, 0);
        case 3:
            return m(0, 0) * (m(1, 1) * m(2, 2) + m(1, 2) * m(2, 1)) +
                   m(0, 1) * (m(1, 0) * m(2, 2) + m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) + m(1, 1) * m(2, 0));
        default:
            throw std::invalid_argument("permanent: only sizes 1-3 are supported");
    }
}

std::map<OccupationPattern, Complex> two_photon_amplitudes(const ModeTransform& u,
                                                           const OccupationPattern& input) {
    const int dim = u.dim();
    if (input.dim() != dim) {
        throw std::invalid_argument("two_photon_amplitudes: pattern/transform dim mismatch");
    }
    for (int c : input.counts) {
        if (c < 0) throw std::invalid_argument("two_photon_amplitudes: negative occupation");
    }
    if (input.total() != 2) {
        throw std::invalid_argument("two_photon_amplitudes: input must contain exactly 2 photons");
    }

    // Input column indices, repeated by occupation.
    int col0 = -1, col1 = -1;
    for (int j = 0; j < dim; ++j) {
        for (int c = 0; c < input.counts[static_cast<std::size_t>(j)]; ++c) {
            (col0 < 0 ? col0 : col1) = j;
        }
    }
    const double in_norm = (col0 == col1) ? 2.0 : 1.0;

    std::map<OccupationPattern, Complex> out;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            Eigen::MatrixXcd sub(2, 2);
            sub << u.matrix()(i, col0), u.matrix()(i, col1),
                   u.matrix()(j, col0), u.matrix()(j, col1);
            const double out_norm = (i == j) ? 2.0 : 1.0;
            out.emplace(OccupationPattern::pair(dim, i, j),
                        permanent(sub) / std::sqrt(out_norm * in_norm));
        }
    }
    return out;
}

Eigen::VectorXcd single_photon_amplitudes(const ModeTransform& u, int input_mode) {
    if (input_mode < 0 || input_mode >= u.dim()) {
        throw std::invalid_argument("single_photon_amplitudes: input mode out of range");
    }
    return u.matrix().col(input_mode);
}

double mixed_coincidence(double p_indist, double p_dist, const OverlapParameter& overlap) {
    check_probability(p_indist, "mixed_coincidence: p_indist");
    check_probability(p_dist, "mixed_coincidence: p_dist");
    return overlap.gamma * p_indist + (1.0 - overlap.gamma) * p_dist;
}

}  // namespace noon::fock
