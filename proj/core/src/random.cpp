#include "noon/random.hpp"

#include <cmath>
#include <stdexcept>

namespace noon::rng {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 1));
    return std::mt19937_64(s);
}

namespace {

double uniform01(std::mt19937_64& gen) {
    // 53-bit mantissa in (0,1); never returns exactly 0.
    return (static_cast<double>(gen() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

std::int64_t poisson_knuth(double mean, std::mt19937_64& gen) {
    const double limit = std::exp(-mean);
    double prod = uniform01(gen);
    std::int64_t k = 0;
    while (prod > limit) {
        prod *= uniform01(gen);
        ++k;
    }
    return k;
}

// Hormann (1993) PTRS: transformed rejection, valid for mean >= 10.
std::int64_t poisson_ptrs(double mean, std::mt19937_64& gen) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);

    for (;;) {
        double u = uniform01(gen) - 0.5;
        double v = uniform01(gen);
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = -mean + k * log_mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

}  // namespace

std::int64_t sample_poisson(double mean, std::mt19937_64& gen) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("sample_poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_knuth(mean, gen);
    return poisson_ptrs(mean, gen);
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace noon::rng
