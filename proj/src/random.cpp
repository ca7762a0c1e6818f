#include "nns/random.hpp"

#include <cmath>
#include <numbers>

namespace nns {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

int Rng::uniform_int(int lo, int hi)
{
    if (hi <= lo) {
        return lo;
    }
    const auto span = static_cast<double>(hi - lo + 1);
    const int offset = static_cast<int>(std::floor(uniform() * span));
    return lo + (offset > hi - lo ? hi - lo : offset);
}

double Rng::normal(double mean, double sd)
{
    if (has_spare_) {
        has_spare_ = false;
        return mean + sd * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + sd * radius * std::cos(angle);
}

} // namespace nns
