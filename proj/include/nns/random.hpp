#pragma once

#include <cstdint>
#include <random>

namespace nns {

/// Seedable generator with implementation-independent output.
///
/// Bits come from std::mt19937_64, whose sequence is fixed by the C++
/// standard. The distributions are implemented here rather than taken from
/// <random> (whose distribution algorithms are implementation-defined):
/// uniform doubles use the top 53 bits, normals use the Box-Muller transform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi] (inclusive).
    int uniform_int(int lo, int hi);
    double normal(double mean = 0.0, double sd = 1.0);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nns
