#include "nns/annotation.hpp"

#include <cmath>
#include <numbers>

#include "nns/error.hpp"

namespace nns {

namespace {

std::array<SchematicPoint, kNumLandmarks> build_schematic()
{
    using std::numbers::pi;
    std::array<SchematicPoint, kNumLandmarks> p{};

    // Jaw contour, ear to ear through the chin (landmark 8).
    for (int i = 0; i <= 16; ++i) {
        const double phi = pi * (1.05 - 1.1 * i / 16.0);
        p[i] = {0.5 + 0.42 * std::cos(phi), 0.45 + 0.5 * std::sin(phi)};
    }
    // Brows, arched.
    for (int i = 0; i < 5; ++i) {
        const double u = i / 4.0;
        const double arch = 0.04 * std::sin(pi * u);
        p[17 + i] = {0.18 + 0.24 * u, 0.29 - arch};
        p[22 + i] = {0.58 + 0.24 * u, 0.29 - 0.04 * std::sin(pi * u)};
    }
    for (int i = 0; i < 4; ++i) {
        p[27 + i] = {0.5, 0.36 + 0.065 * i};
    }
    for (int i = 0; i < 5; ++i) {
        p[31 + i] = {0.42 + 0.04 * i, i == 2 ? 0.62 : 0.60};
    }
    const auto eye = [&](int first, double cx, bool mirrored) {
        // corner, two upper, corner, two lower
        constexpr double angles[6] = {pi, 2.0 * pi / 3.0, pi / 3.0, 0.0, -pi / 3.0, -2.0 * pi / 3.0};
        for (int i = 0; i < 6; ++i) {
            const double a = mirrored ? pi - angles[(i + 3) % 6] : angles[i];
            p[first + i] = {cx + 0.07 * std::cos(a), 0.38 - 0.03 * std::sin(a)};
        }
    };
    eye(36, 0.32, false);
    eye(42, 0.68, true);
    // Outer lip: 48 left corner, 49-53 upper, 54 right corner, 55-59 lower.
    for (int i = 0; i < 12; ++i) {
        const double a = pi - 2.0 * pi * i / 12.0;
        p[48 + i] = {0.5 + 0.15 * std::cos(a), 0.76 - 0.06 * std::sin(a)};
    }
    // Inner lip: 60 left corner, 61-63 upper, 64 right corner, 65-67 lower.
    for (int i = 0; i < 8; ++i) {
        const double a = pi - 2.0 * pi * i / 8.0;
        p[60 + i] = {0.5 + 0.10 * std::cos(a), 0.76 - 0.025 * std::sin(a)};
    }
    return p;
}

} // namespace

const std::array<SchematicPoint, kNumLandmarks>& schematic_landmarks()
{
    static const auto points = build_schematic();
    return points;
}

std::string_view landmark_region(int id)
{
    if (id < 0 || id >= kNumLandmarks) {
        throw Error(ErrorKind::range, "landmark id " + std::to_string(id) + " outside 0..67");
    }
    if (id <= 16) return "jaw";
    if (id <= 21) return "right_brow";
    if (id <= 26) return "left_brow";
    if (id <= 30) return "nose_bridge";
    if (id <= 35) return "nostrils";
    if (id <= 41) return "right_eye";
    if (id <= 47) return "left_eye";
    if (id <= 59) return "outer_lip";
    return "inner_lip";
}

} // namespace nns
