#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nns/camera_fit.hpp"
#include "nns/signal.hpp"

namespace nns {

/// Tracked 2D landmarks of one recording.
struct TrajectorySession {
    std::string source_id;
    std::optional<double> sample_rate_hint;
    std::vector<LandmarkFrame> frames; ///< sorted by frame_index, timestamps increasing
    std::map<std::string, std::string> metadata;
};

/// Comma-separated trajectory text:
///
///     # source_id: infant-03          (optional "# key: value" metadata)
///     # sample_rate_hint: 30
///     frame_index,timestamp_s,landmark_id,x_px,y_px[,confidence]
///     0,0,0,312.5,240.25
///
/// Rows may come in any order. Landmarks absent from a frame become invalid
/// slots. Errors carry the 1-based line number.
TrajectorySession parse_trajectory_text(const std::string& text);
TrajectorySession parse_trajectory(const std::filesystem::path& path);

std::string format_trajectory(const TrajectorySession& session);
void write_trajectory(const TrajectorySession& session, const std::filesystem::path& path);

/// Frontalized landmarks, one row per (fitted frame, landmark):
///
///     # units: model
///     frame_index,timestamp_s,landmark_id,x,y,z
///
/// Unfitted frames are omitted.
std::string format_landmarks3d(std::span<const FrontalizedFrame> frames,
                               const std::map<std::string, std::string>& metadata = {});
void write_landmarks3d(std::span<const FrontalizedFrame> frames, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& metadata = {});
/// `metadata`, when given, receives the "# key: value" header lines.
std::vector<FrontalizedFrame> parse_landmarks3d_text(const std::string& text,
                                                     std::map<std::string, std::string>* metadata = nullptr);
std::vector<FrontalizedFrame> parse_landmarks3d(const std::filesystem::path& path,
                                                std::map<std::string, std::string>* metadata = nullptr);

/// source_id and sample_rate_hint of a session, for the landmark file header.
std::map<std::string, std::string> landmark_metadata(const TrajectorySession& session);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace nns
