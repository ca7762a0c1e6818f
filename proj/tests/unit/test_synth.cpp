#include <gtest/gtest.h>

#include <cmath>

#include "nns/error.hpp"
#include "nns/random.hpp"
#include "nns/pipeline.hpp"
#include "nns/report_io.hpp"
#include "nns/synth.hpp"

using namespace nns;

namespace {

Scenario clean(int bursts = 1, int cycles = 8)
{
    Scenario s;
    s.burst_count = bursts;
    s.min_cycles_per_burst = s.max_cycles_per_burst = cycles;
    s.noise_sd = 0.0;
    s.drift_amplitude = 0.0;
    return s;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    double ma = 0, mb = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) && std::isfinite(b[i])) {
            ma += a[i];
            mb += b[i];
            ++n;
        }
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isfinite(a[i]) && std::isfinite(b[i])) {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST(GenerateSignal, CleanBurstHasExactlyItsCycles)
{
    const auto g = generate_signal(clean());
    ASSERT_EQ(g.truth.cycle_times.size(), 8u);
    for (std::size_t i = 1; i < 8; ++i) EXPECT_NEAR(g.truth.cycle_times[i] - g.truth.cycle_times[i - 1], 0.5, 1e-12);
    const auto& x = g.signal.samples;
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] > x[i + 1] && x[i] > 0.5) ++maxima;
    }
    EXPECT_EQ(maxima, 8);
    EXPECT_EQ(g.truth.cycles_per_burst, (std::vector<int>{8}));
    EXPECT_DOUBLE_EQ(g.truth.true_frequency_hz, 2.0);
    EXPECT_EQ(g.signal.mode, DisplacementMode::vertical);
}

TEST(GenerateSignal, DeterministicPerSeed)
{
    Scenario s;
    s.seed = 99;
    const auto a = generate_signal(s);
    const auto b = generate_signal(s);
    EXPECT_EQ(serialize_signal(a.signal), serialize_signal(b.signal));
    EXPECT_EQ(truth_to_json(a.truth).dump(), truth_to_json(b.truth).dump());
    s.seed = 100;
    EXPECT_NE(serialize_signal(generate_signal(s).signal), serialize_signal(a.signal));
}

TEST(GenerateSignal, TruthInvariants)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Scenario s;
        s.seed = seed;
        const auto g = generate_signal(s);
        const auto& t = g.truth;
        ASSERT_EQ(t.burst_spans.size(), 4u);
        int total = 0;
        for (std::size_t b = 0; b < t.cycles_per_burst.size(); ++b) {
            EXPECT_GE(t.cycles_per_burst[b], 6);
            EXPECT_LE(t.cycles_per_burst[b], 12);
            total += t.cycles_per_burst[b];
        }
        EXPECT_EQ(static_cast<std::size_t>(total), t.cycle_times.size());
        for (std::size_t i = 0; i < t.cycle_times.size(); ++i) {
            if (i > 0) EXPECT_GT(t.cycle_times[i], t.cycle_times[i - 1]);
            int inside = 0;
            for (const auto& [lo, hi] : t.burst_spans) inside += t.cycle_times[i] >= lo && t.cycle_times[i] <= hi;
            EXPECT_EQ(inside, 1);
        }
        EXPECT_LT(t.cycle_times.back(), t.session_duration_s);
        EXPECT_DOUBLE_EQ(t.session_duration_s, g.signal.duration_s());
    }
}

TEST(GenerateSignal, CleanSignalRecoveredExactlyAfterFiltering)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Scenario s;
        s.seed = seed;
        s.noise_sd = 0.0;
        s.drift_amplitude = 0.0;
        const auto g = generate_signal(s);
        const auto filtered = apply_bandpass(g.signal, design_bandpass({}, s.sample_rate));
        EXPECT_EQ(detect_cycles(filtered, {}).size(), g.truth.cycle_times.size()) << "seed " << seed;
    }
}

TEST(GenerateSignal, InvalidScenarios)
{
    Scenario s;
    s.intra_burst_hz = 15.0;
    EXPECT_THROW(generate_signal(s), Error);
    s = {};
    s.min_cycles_per_burst = 8;
    s.max_cycles_per_burst = 6;
    EXPECT_THROW(generate_signal(s), Error);
    s = {};
    s.noise_sd = -1;
    EXPECT_THROW(generate_signal(s), Error);
    s = {};
    s.drift_hz = 0.2;
    EXPECT_THROW(generate_signal(s), Error);
}

TEST(GenerateTrajectory, StaticPoseRecoversInjectedDisplacement)
{
    const ShapeModel model = make_fixture_model();
    Scenario s;
    s.seed = 4;
    PoseScript pose;
    pose.yaw_deg = 15;
    pose.pitch_deg = -10;
    const auto traj = generate_trajectory(s, model, pose);
    ASSERT_EQ(traj.session.frames.size(), traj.injected.size());
    const auto outcomes = fit_frames(model, traj.session.frames, {3, 0.0, false});
    const auto signal = displacement_signal(std::span<const FrameOutcome>(outcomes), pose.landmark_id,
                                            DisplacementMode::vertical);
    ASSERT_EQ(signal.size(), traj.injected.size());
    const double base = traj.injected.samples[0];
    for (std::size_t i = 0; i < signal.size(); ++i) {
        EXPECT_NEAR(signal.samples[i], traj.injected.samples[i] - base, 1e-6);
    }
}

TEST(GenerateTrajectory, SlowHeadRotationIsDecoupled)
{
    const ShapeModel model = make_fixture_model();
    Scenario s;
    s.seed = 5;
    PoseScript pose;
    pose.yaw_amplitude_deg = 30;
    pose.pitch_amplitude_deg = 15;
    pose.roll_amplitude_deg = 10;
    pose.translation_amplitude_px = 40;
    pose.motion_hz = 0.05;
    const auto traj = generate_trajectory(s, model, pose);
    PipelineConfig config;
    config.mode = DisplacementMode::vertical;
    const auto result = run_pipeline(traj.session, model, config);
    const auto truth_filtered = apply_bandpass(traj.injected, design_bandpass({}, s.sample_rate));
    EXPECT_GE(correlation(result.filtered.samples, truth_filtered.samples), 0.99);
}

TEST(GenerateTrajectory, DroppedFramesKeepBurstStructure)
{
    const ShapeModel model = make_fixture_model();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Scenario s;
        s.seed = seed;
        PoseScript pose;
        pose.drop_fraction = 0.1;
        const auto traj = generate_trajectory(s, model, pose);
        EXPECT_LT(traj.session.frames.size(), traj.injected.size());
        EXPECT_EQ(traj.session.frames.front().frame_index, 0);
        const auto result = run_pipeline(traj.session, model, {});
        ASSERT_EQ(result.report.bursts.size(), traj.truth.cycles_per_burst.size()) << "seed " << seed;
        for (std::size_t b = 0; b < result.report.bursts.size(); ++b) {
            EXPECT_LE(std::abs(result.report.cycles_per_burst[b] - traj.truth.cycles_per_burst[b]), 1);
        }
    }
}

TEST(GenerateTrajectory, SameSeedSameSession)
{
    const ShapeModel model = make_fixture_model();
    Scenario s;
    PoseScript pose;
    pose.pixel_noise_sd = 0.3;
    pose.drop_fraction = 0.05;
    EXPECT_EQ(format_trajectory(generate_trajectory(s, model, pose).session),
              format_trajectory(generate_trajectory(s, model, pose).session));
}

TEST(VerticalDirection, MovesOnlyTheLandmarkVertically)
{
    const ShapeModel model = make_fixture_model();
    const Eigen::VectorXd d = vertical_direction(model, kDefaultLandmark);
    const auto a = synthesize_shape(model, ShapeCoefficients::zeros(5));
    const auto b = synthesize_shape(model, {d});
    EXPECT_LT((b.points[kDefaultLandmark] - a.points[kDefaultLandmark] - Eigen::Vector3d(0, 1, 0)).norm(), 1e-9);
}

namespace {

NNSReport report_from_truth(const GroundTruth& truth, double shift = 0.0)
{
    std::vector<CycleEvent> cycles;
    for (std::size_t i = 0; i < truth.cycle_times.size(); ++i) cycles.push_back({truth.cycle_times[i] + shift, 1.0, i, 0});
    QuantParams p;
    const auto seg = segment_bursts(cycles, p);
    return quantify(make_signal(std::vector<double>(10, 0.0), 30.0, 0.0, SignalStage::filtered), cycles, seg,
                    truth.session_duration_s, p);
}

} // namespace

TEST(Score, PerfectReport)
{
    const auto g = generate_signal(Scenario{});
    const auto score = score_detection(report_from_truth(g.truth), g.truth);
    EXPECT_DOUBLE_EQ(score.cycle_recall, 1.0);
    EXPECT_DOUBLE_EQ(score.cycle_precision, 1.0);
    EXPECT_EQ(score.burst_count_error, 0);
    ASSERT_TRUE(score.frequency_error_hz.has_value());
    EXPECT_NEAR(*score.frequency_error_hz, 0.0, 1e-12);
}

TEST(Score, EmptyReportHasPrecisionOne)
{
    const auto g = generate_signal(Scenario{});
    const auto score = score_detection(NNSReport{}, g.truth);
    EXPECT_EQ(score.cycle_recall, 0.0);
    EXPECT_EQ(score.cycle_precision, 1.0);
    EXPECT_EQ(score.burst_count_error, -4);
    EXPECT_FALSE(score.frequency_error_hz.has_value());
}

TEST(Score, ShiftBeyondWindowMatchesNothing)
{
    const auto g = generate_signal(Scenario{});
    const auto score = score_detection(report_from_truth(g.truth, 0.3), g.truth);
    EXPECT_EQ(score.cycle_recall, 0.0);
    EXPECT_EQ(score.matched, 0);
    const auto near = score_detection(report_from_truth(g.truth, 0.14), g.truth);
    EXPECT_EQ(near.cycle_recall, 1.0);
}

TEST(Score, Bounds)
{
    nns::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Scenario s;
        s.seed = static_cast<std::uint64_t>(trial + 1);
        const auto g = generate_signal(s);
        const auto r = report_from_truth(g.truth, rng.uniform(-0.3, 0.3));
        const auto score = score_detection(r, g.truth);
        EXPECT_NEAR(score.cycle_recall * score.truth_cycles, score.matched, 1e-9);
        EXPECT_LE(score.matched, std::min(score.detected, score.truth_cycles));
        EXPECT_GE(score.cycle_recall, 0.0);
        EXPECT_LE(score.cycle_precision, 1.0);
    }
}
