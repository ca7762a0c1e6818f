#pragma once

#include <array>
#include <string_view>

namespace nns {

inline constexpr int kNumLandmarks = 68;
/// Chin apex in the 68-point scheme; the default analysed landmark.
inline constexpr int kDefaultLandmark = 8;

struct SchematicPoint {
    double x; // [0, 1], left to right
    double y; // [0, 1], top to bottom
};

/// Face-schematic coordinates of the 68-point landmark scheme, used by the
/// landmark picker and as the layout of the fixture model's mean face.
const std::array<SchematicPoint, kNumLandmarks>& schematic_landmarks();

/// "jaw", "right_brow", "left_brow", "nose_bridge", "nostrils", "right_eye",
/// "left_eye", "outer_lip" or "inner_lip".
std::string_view landmark_region(int landmark_id);

} // namespace nns
