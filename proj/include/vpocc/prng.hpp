#pragma once

#include <cstdint>

namespace vpocc {

/// splitmix64 stream. All seeded parameters in this library are drawn from
/// this generator so that results are reproducible across platforms and
/// standard-library implementations (std::uniform_real_distribution is not
/// portable). The draw order for each parameter block is documented in the
/// README.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-half_range, half_range).
    double uniform_symmetric(double half_range) {
        return (2.0 * uniform() - 1.0) * half_range;
    }

private:
    std::uint64_t state_;
};

/// Decorrelates a base seed with an element index (voxel id, test case id).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
}

} // namespace vpocc
