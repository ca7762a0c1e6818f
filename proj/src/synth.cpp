#include "nns/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <Eigen/Geometry>
#include <Eigen/QR>

#include "nns/error.hpp"
#include "nns/random.hpp"

namespace nns {

using std::numbers::pi;

void Scenario::validate() const
{
    const auto fail = [](const std::string& what) { throw Error(ErrorKind::parameter, "scenario: " + what); };
    if (!(sample_rate > 0.0)) fail("sample_rate must be > 0");
    if (burst_count < 0) fail("burst_count must be >= 0");
    if (min_cycles_per_burst < 1 || max_cycles_per_burst < min_cycles_per_burst) {
        fail("cycles_per_burst range must satisfy 1 <= min <= max");
    }
    if (!(intra_burst_hz > 0.0) || !(intra_burst_hz < 0.5 * sample_rate)) {
        fail("intra_burst_hz must lie in (0, sample_rate/2)");
    }
    if (!(min_pause_s >= 0.0) || max_pause_s < min_pause_s) fail("pause range must satisfy 0 <= min <= max");
    if (!(lead_in_s >= 0.0) || !(tail_s >= 0.0)) fail("lead_in_s and tail_s must be >= 0");
    if (!(cycle_amplitude >= 0.0)) fail("cycle_amplitude must be >= 0");
    if (!(pulse_width_s > 0.0)) fail("pulse_width_s must be > 0");
    if (!(noise_sd >= 0.0)) fail("noise_sd must be >= 0");
    if (!(drift_amplitude >= 0.0)) fail("drift_amplitude must be >= 0");
    if (!(drift_hz >= 0.0 && drift_hz < 0.1)) fail("drift_hz must lie in [0, 0.1)");
}

SyntheticSignal generate_signal(const Scenario& scenario)
{
    scenario.validate();
    Rng rng(scenario.seed);
    const double fs = scenario.sample_rate;
    const double period = 1.0 / scenario.intra_burst_hz;

    GroundTruth truth;
    double cursor = scenario.lead_in_s;
    double total_cycles = 0.0;
    double total_duration = 0.0;
    for (int b = 0; b < scenario.burst_count; ++b) {
        const int n = rng.uniform_int(scenario.min_cycles_per_burst, scenario.max_cycles_per_burst);
        const double first = std::round((cursor + 0.5 * period) * fs) / fs;
        for (int i = 0; i < n; ++i) {
            truth.cycle_times.push_back(first + i * period);
        }
        const double last = truth.cycle_times.back();
        truth.burst_spans.emplace_back(first - 0.5 * period, last + 0.5 * period);
        truth.cycles_per_burst.push_back(n);
        total_cycles += n;
        total_duration += n * period;
        cursor = last + 0.5 * period;
        if (b + 1 < scenario.burst_count) {
            cursor += rng.uniform(scenario.min_pause_s, scenario.max_pause_s);
        }
    }
    truth.true_frequency_hz = total_duration > 0.0 ? total_cycles / total_duration : 0.0;

    const auto count = static_cast<std::size_t>(std::ceil((cursor + scenario.tail_s) * fs));
    std::vector<double> samples(count, 0.0);
    const double half_width = 0.5 * scenario.pulse_width_s;
    for (const double c : truth.cycle_times) {
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((c - half_width) * fs)));
        for (std::size_t i = lo; i < count; ++i) {
            const double dt = static_cast<double>(i) / fs - c;
            if (dt > half_width) {
                break;
            }
            if (std::abs(dt) <= half_width) {
                samples[i] += scenario.cycle_amplitude * 0.5 * (1.0 + std::cos(pi * dt / half_width));
            }
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / fs;
        samples[i] += 0.5 * scenario.drift_amplitude * (1.0 - std::cos(2.0 * pi * scenario.drift_hz * t));
        if (scenario.noise_sd > 0.0) {
            samples[i] += rng.normal(0.0, scenario.noise_sd);
        }
    }
    truth.session_duration_s = static_cast<double>(count) / fs;

    SyntheticSignal out{make_signal(std::move(samples), fs), std::move(truth)};
    out.signal.mode = DisplacementMode::vertical;
    return out;
}

void PoseScript::validate() const
{
    if (!(scale_px > 0.0)) throw Error(ErrorKind::parameter, "pose: scale_px must be > 0");
    if (!(pixel_noise_sd >= 0.0)) throw Error(ErrorKind::parameter, "pose: pixel_noise_sd must be >= 0");
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) {
        throw Error(ErrorKind::parameter, "pose: drop_fraction must lie in [0, 1)");
    }
    if (landmark_id < 0 || landmark_id >= kNumLandmarks) {
        throw Error(ErrorKind::range, "pose: landmark_id outside 0..67");
    }
    if (!(subject_sd >= 0.0)) throw Error(ErrorKind::parameter, "pose: subject_sd must be >= 0");
}

AffineCamera PoseScript::camera_at(double t) const
{
    const double phase = 2.0 * pi * motion_hz * t;
    const double deg = pi / 180.0;
    const double yaw = (yaw_deg + yaw_amplitude_deg * std::sin(phase)) * deg;
    const double pitch = (pitch_deg + pitch_amplitude_deg * std::sin(phase + 1.0)) * deg;
    const double roll = (roll_deg + roll_amplitude_deg * std::sin(phase + 2.0)) * deg;
    const Eigen::Matrix3d rotation = (Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()) *
                                      Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                                      Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()))
                                         .toRotationMatrix();
    Eigen::Matrix<double, 2, 4> top;
    top.leftCols<3>() = scale_px * rotation.topRows<2>();
    top(0, 3) = center_x_px + translation_amplitude_px * std::sin(phase);
    top(1, 3) = center_y_px + translation_amplitude_px * std::cos(phase);
    return AffineCamera(top);
}

Eigen::VectorXd vertical_direction(const ShapeModel& model, int landmark_id)
{
    if (landmark_id < 0 || landmark_id >= kNumLandmarks) {
        throw Error(ErrorKind::range, "landmark id outside 0..67");
    }
    const Eigen::MatrixXd basis = model.scaled_basis(model.annotation()[landmark_id]);
    const Eigen::Vector3d target(0.0, 1.0, 0.0);
    const Eigen::VectorXd direction = basis.completeOrthogonalDecomposition().solve(target);
    if ((basis * direction - target).norm() > 1e-9) {
        throw Error(ErrorKind::structural, "model cannot move landmark " + std::to_string(landmark_id) +
                                               " purely vertically");
    }
    return direction;
}

SyntheticTrajectory generate_trajectory(const Scenario& scenario, const ShapeModel& model,
                                        const PoseScript& pose)
{
    pose.validate();
    SyntheticSignal base = generate_signal(scenario);

    SyntheticTrajectory out;
    out.truth = std::move(base.truth);
    out.injected = std::move(base.signal);
    out.injected.landmark_id = pose.landmark_id;
    out.jaw_direction = vertical_direction(model, pose.landmark_id);

    // Separate stream so the signal stays identical to generate_signal's.
    Rng rng(scenario.seed ^ 0x9e3779b97f4a7c15ULL);
    out.subject = Eigen::VectorXd(model.num_components());
    for (Eigen::Index k = 0; k < out.subject.size(); ++k) {
        out.subject[k] = rng.normal(0.0, pose.subject_sd);
    }

    TrajectorySession& session = out.session;
    session.source_id = "synth-seed-" + std::to_string(scenario.seed);
    session.sample_rate_hint = scenario.sample_rate;
    session.metadata["generator"] = "nns synth";
    const auto& samples = out.injected.samples;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const bool dropped = i > 0 && pose.drop_fraction > 0.0 && rng.uniform() < pose.drop_fraction;
        if (dropped) {
            continue;
        }
        const double t = out.injected.timestamps[i];
        const ShapeCoefficients coeffs{out.subject + samples[i] * out.jaw_direction};
        const auto projected = project(pose.camera_at(t), synthesize_shape(model, coeffs));
        LandmarkFrame frame;
        frame.frame_index = static_cast<int>(i);
        frame.timestamp = t;
        for (int j = 0; j < kNumLandmarks; ++j) {
            frame.points[j] = projected[j];
            if (pose.pixel_noise_sd > 0.0) {
                frame.points[j].x() += rng.normal(0.0, pose.pixel_noise_sd);
                frame.points[j].y() += rng.normal(0.0, pose.pixel_noise_sd);
            }
            frame.valid[j] = true;
        }
        session.frames.push_back(frame);
    }
    return out;
}

DetectionScore score_detection(const NNSReport& report, const GroundTruth& truth, double window_s)
{
    std::vector<double> detected;
    for (const auto& b : report.bursts) {
        for (const auto& c : b.cycles) {
            detected.push_back(c.time);
        }
    }
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t d = 0; d < detected.size(); ++d) {
        for (std::size_t t = 0; t < truth.cycle_times.size(); ++t) {
            const double gap = std::abs(detected[d] - truth.cycle_times[t]);
            if (gap <= window_s + 1e-12) {
                pairs.emplace_back(gap, t, d);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> used_detected(detected.size(), false);
    std::vector<bool> used_truth(truth.cycle_times.size(), false);
    DetectionScore score;
    for (const auto& [gap, t, d] : pairs) {
        if (!used_detected[d] && !used_truth[t]) {
            used_detected[d] = used_truth[t] = true;
            ++score.matched;
        }
    }
    score.detected = static_cast<int>(detected.size());
    score.truth_cycles = static_cast<int>(truth.cycle_times.size());
    score.cycle_recall = score.truth_cycles > 0 ? static_cast<double>(score.matched) / score.truth_cycles : 1.0;
    score.cycle_precision = score.detected > 0 ? static_cast<double>(score.matched) / score.detected : 1.0;
    score.burst_count_error =
        static_cast<int>(report.bursts.size()) - static_cast<int>(truth.burst_spans.size());
    if (report.mean_frequency_hz && !truth.cycle_times.empty()) {
        score.frequency_error_hz = std::abs(*report.mean_frequency_hz - truth.true_frequency_hz);
    }
    return score;
}

} // namespace nns
