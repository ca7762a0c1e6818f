#include "nns/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "nns/error.hpp"
#include "nns/report_io.hpp"

namespace nns {

namespace {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw e.with_stage(stage);
    }
}

} // namespace

void PipelineConfig::validate() const
{
    in_stage("fit", [&] {
        if (fit.iterations < 1) {
            throw Error(ErrorKind::parameter, "iterations must be >= 1");
        }
        if (!(fit.ridge >= 0.0)) {
            throw Error(ErrorKind::parameter, "ridge must be >= 0");
        }
        if (jobs < 1) {
            throw Error(ErrorKind::parameter, "jobs must be >= 1");
        }
    });
    in_stage("signal", [&] {
        if (landmark_id < 0 || landmark_id >= kNumLandmarks) {
            throw Error(ErrorKind::range, "landmark_id " + std::to_string(landmark_id) + " outside 0..67");
        }
    });
    in_stage("quantify", [&] { quant.validate(); });
}

MovementSignal filter_stage(const MovementSignal& raw, const FilterSpec& spec)
{
    return in_stage("filter", [&] { return apply_bandpass(raw, design_bandpass(spec, raw.sample_rate)); });
}

NNSReport quantify_stage(const MovementSignal& filtered, const QuantParams& params)
{
    return in_stage("quantify", [&] { return analyze_signal(filtered, params); });
}

PipelineResult run_pipeline(const TrajectorySession& session, const ShapeModel& model,
                            const PipelineConfig& config)
{
    config.validate();
    PipelineResult out;
    out.outcomes = in_stage("fit", [&] {
        auto outcomes = fit_frames(model, session.frames, config.fit, config.jobs);
        if (std::none_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.fitted(); })) {
            throw Error(ErrorKind::empty_session, "no frame of '" + session.source_id + "' could be fitted");
        }
        return outcomes;
    });
    SignalOptions options = config.signal;
    if (!options.sample_rate && session.sample_rate_hint) {
        options.sample_rate = session.sample_rate_hint;
    }
    out.raw = in_stage("signal", [&] {
        return displacement_signal(std::span<const FrameOutcome>(out.outcomes), config.landmark_id,
                                   config.mode, options);
    });
    out.filtered = filter_stage(out.raw, config.filter);
    out.report = quantify_stage(out.filtered, config.quant);
    return out;
}

void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir,
                     const std::map<std::string, std::string>& metadata)
{
    const auto track = frontalized_track(result.outcomes);
    write_landmarks3d(track, out_dir / kLandmarksFile, metadata);
    write_signal(result.raw, out_dir / kRawSignalFile);
    write_signal(result.filtered, out_dir / kFilteredSignalFile);
    write_report(result.report, out_dir / kReportFile);
}

NNSReport run_pipeline(const std::filesystem::path& trajectory_path,
                       const std::filesystem::path& model_path, const PipelineConfig& config,
                       const std::optional<std::filesystem::path>& out_dir)
{
    const TrajectorySession session = in_stage("parse", [&] { return parse_trajectory(trajectory_path); });
    const ShapeModel model = in_stage("parse", [&] { return load_shape_model(model_path); });
    PipelineResult result = run_pipeline(session, model, config);
    if (out_dir) {
        in_stage("write", [&] { write_artifacts(result, *out_dir, landmark_metadata(session)); });
    }
    return std::move(result.report);
}

std::vector<BatchOutcome> run_batch(std::span<const std::filesystem::path> trajectories,
                                    const ShapeModel& model, const PipelineConfig& config,
                                    const std::filesystem::path& out_root, int jobs)
{
    if (jobs < 1) {
        throw Error(ErrorKind::parameter, "jobs must be >= 1");
    }
    std::vector<BatchOutcome> out(trajectories.size());
    PipelineConfig per_session = config;
    per_session.jobs = 1;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < out.size(); i = next++) {
            BatchOutcome& o = out[i];
            o.trajectory = trajectories[i];
            o.out_dir = out_root / trajectories[i].stem();
            try {
                const TrajectorySession session =
                    in_stage("parse", [&] { return parse_trajectory(o.trajectory); });
                PipelineResult result = run_pipeline(session, model, per_session);
                in_stage("write", [&] { write_artifacts(result, o.out_dir, landmark_metadata(session)); });
                o.report = std::move(result.report);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(out.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
    }
    return out;
}

} // namespace nns
