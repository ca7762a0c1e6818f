#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nns/quant.hpp"
#include "nns/shape_model.hpp"
#include "nns/signal.hpp"
#include "nns/trajectory_io.hpp"

namespace nns {

/// Synthetic NNS session description. Times in seconds, amplitudes in model units.
struct Scenario {
    int burst_count = 4;
    int min_cycles_per_burst = 6;
    int max_cycles_per_burst = 12;
    /// Cycle rate inside a burst (cycle spacing = 1 / intra_burst_hz).
    double intra_burst_hz = 2.0;
    double min_pause_s = 2.5;
    double max_pause_s = 5.0;
    double lead_in_s = 2.0;
    double tail_s = 2.0;
    double cycle_amplitude = 1.0;
    /// Support of each raised-cosine cycle pulse.
    double pulse_width_s = 0.4;
    double noise_sd = 0.1;
    double drift_amplitude = 0.3;
    double drift_hz = 0.05;
    double sample_rate = 30.0;
    std::uint64_t seed = 1;

    /// Throws Error(parameter).
    void validate() const;
};

struct GroundTruth {
    std::vector<double> cycle_times;
    /// Per burst: first cycle - period/2 to last cycle + period/2.
    std::vector<std::pair<double, double>> burst_spans;
    std::vector<int> cycles_per_burst;
    double true_frequency_hz = 0.0;
    double session_duration_s = 0.0;
};

struct SyntheticSignal {
    MovementSignal signal; ///< raw, vertical mode
    GroundTruth truth;
};

/// Raised-cosine pulses at the truth cycle times, plus white noise and a
/// slow non-negative drift a/2 (1 - cos 2 pi f t). Deterministic in the seed.
SyntheticSignal generate_signal(const Scenario& scenario);

/// Scripted head pose for rendering a synthetic trajectory.
struct PoseScript {
    double scale_px = 3.0; ///< pixels per model unit
    double center_x_px = 320.0;
    double center_y_px = 240.0;
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    /// Sinusoidal head rotation about the static angles, at motion_hz.
    double yaw_amplitude_deg = 0.0;
    double pitch_amplitude_deg = 0.0;
    double roll_amplitude_deg = 0.0;
    double translation_amplitude_px = 0.0;
    double motion_hz = 0.05;
    double pixel_noise_sd = 0.0;
    /// Probability that a frame (other than the first) is missing entirely.
    double drop_fraction = 0.0;
    /// Landmark whose model-space vertical displacement follows the scenario signal.
    int landmark_id = kDefaultLandmark;
    /// Spread of the subject's identity coefficients.
    double subject_sd = 0.5;

    void validate() const;
    AffineCamera camera_at(double t) const;
};

struct SyntheticTrajectory {
    TrajectorySession session;
    GroundTruth truth;
    /// Model-space vertical displacement injected at pose.landmark_id.
    MovementSignal injected;
    /// Identity coefficients; frame i uses subject + injected[i] * jaw_direction.
    Eigen::VectorXd subject;
    Eigen::VectorXd jaw_direction;
};

/// Minimum-norm coefficient direction that moves `landmark_id` by exactly
/// (0, 1, 0) model units. Throws Error(structural) if the model cannot.
Eigen::VectorXd vertical_direction(const ShapeModel& model, int landmark_id);

/// Renders generate_signal(scenario) as the vertical motion of one landmark
/// of `model`, seen through the scripted camera.
SyntheticTrajectory generate_trajectory(const Scenario& scenario, const ShapeModel& model,
                                        const PoseScript& pose = {});

struct DetectionScore {
    double cycle_recall = 0.0;
    double cycle_precision = 0.0;
    int matched = 0;
    int detected = 0;
    int truth_cycles = 0;
    /// Detected minus true burst count.
    int burst_count_error = 0;
    std::optional<double> frequency_error_hz;
};

inline constexpr double kMatchWindowS = 0.15;

/// Greedy one-to-one matching (closest pairs first) of the report's in-burst
/// cycles to the truth cycles within +-window_s. Empty detections give
/// precision 1; an empty truth gives recall 1.
DetectionScore score_detection(const NNSReport& report, const GroundTruth& truth,
                               double window_s = kMatchWindowS);

} // namespace nns
