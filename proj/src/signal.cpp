#include "nns/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nns/error.hpp"

namespace nns {

std::string_view to_string(DisplacementMode mode)
{
    switch (mode) {
    case DisplacementMode::euclidean: return "euclidean";
    case DisplacementMode::horizontal: return "horizontal";
    case DisplacementMode::vertical: return "vertical";
    }
    return "euclidean";
}

std::string_view to_string(SignalStage stage)
{
    return stage == SignalStage::raw ? "raw" : "filtered";
}

DisplacementMode parse_displacement_mode(std::string_view name)
{
    if (name == "euclidean") return DisplacementMode::euclidean;
    if (name == "horizontal") return DisplacementMode::horizontal;
    if (name == "vertical") return DisplacementMode::vertical;
    throw Error(ErrorKind::validation,
                "mode must be euclidean, horizontal or vertical, got '" + std::string(name) + "'");
}

SignalStage parse_signal_stage(std::string_view name)
{
    if (name == "raw") return SignalStage::raw;
    if (name == "filtered") return SignalStage::filtered;
    throw Error(ErrorKind::validation, "stage must be raw or filtered, got '" + std::string(name) + "'");
}

namespace {

std::vector<SignalSegment> finite_runs(const std::vector<double>& samples)
{
    std::vector<SignalSegment> runs;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!std::isfinite(samples[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < samples.size() && std::isfinite(samples[j])) {
            ++j;
        }
        runs.push_back({i, j});
        i = j;
    }
    return runs;
}

double median(std::vector<double> values)
{
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) {
        return *mid;
    }
    return 0.5 * (*mid + *std::max_element(values.begin(), mid));
}

} // namespace

MovementSignal make_signal(std::vector<double> samples, double sample_rate, double start_time,
                           SignalStage stage)
{
    if (!(sample_rate > 0.0)) {
        throw Error(ErrorKind::parameter, "sample rate must be positive");
    }
    MovementSignal s;
    s.sample_rate = sample_rate;
    s.stage = stage;
    s.timestamps.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        s.timestamps[i] = start_time + static_cast<double>(i) / sample_rate;
    }
    s.samples = std::move(samples);
    s.interpolated.assign(s.samples.size(), false);
    s.segments = finite_runs(s.samples);
    return s;
}

std::vector<FrontalizedFrame> frontalized_track(std::span<const FrameOutcome> outcomes)
{
    std::vector<FrontalizedFrame> track;
    track.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        FrontalizedFrame f{o.frame_index, o.timestamp, std::nullopt};
        if (o.fit) {
            f.landmarks = o.fit->frontalized;
        }
        track.push_back(std::move(f));
    }
    return track;
}

MovementSignal displacement_signal(std::span<const FrameOutcome> outcomes, int landmark_id,
                                   DisplacementMode mode, const SignalOptions& options)
{
    const auto track = frontalized_track(outcomes);
    return displacement_signal(std::span<const FrontalizedFrame>(track), landmark_id, mode, options);
}

MovementSignal displacement_signal(std::span<const FrontalizedFrame> frames, int landmark_id,
                                   DisplacementMode mode, const SignalOptions& options)
{
    if (landmark_id < 0 || landmark_id >= kNumLandmarks) {
        throw Error(ErrorKind::range, "landmark id " + std::to_string(landmark_id) + " outside 0..67");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
            throw Error(ErrorKind::ordering, "frame timestamps must be strictly increasing (frame " +
                                                 std::to_string(frames[i].frame_index) + ")");
        }
    }
    std::vector<double> times;
    std::vector<int> indices;
    std::vector<Eigen::Vector3d> positions;
    for (const auto& f : frames) {
        if (f.landmarks) {
            times.push_back(f.timestamp);
            indices.push_back(f.frame_index);
            positions.push_back(f.landmarks->points[landmark_id]);
        }
    }
    if (times.empty()) {
        throw Error(ErrorKind::empty_session, "no fitted frames");
    }
    if (times.size() < 2) {
        throw Error(ErrorKind::insufficient_data, "at least 2 fitted frames are required");
    }

    double period = 0.0;
    if (options.sample_rate) {
        if (!(*options.sample_rate > 0.0)) {
            throw Error(ErrorKind::parameter, "sample rate must be positive");
        }
        period = 1.0 / *options.sample_rate;
    } else {
        std::vector<double> steps;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const int di = indices[i] - indices[i - 1];
            const double dt = times[i] - times[i - 1];
            steps.push_back(di > 0 ? dt / di : dt);
        }
        period = median(std::move(steps));
    }

    const double t0 = times.front();
    const double span = times.back() - t0;
    const auto count = static_cast<std::size_t>(std::floor(span / period + 1e-6)) + 1;
    const double tolerance = options.jitter_tolerance * period;
    const double max_step = options.max_interpolation_gap_s + period + 1e-9;

    MovementSignal out;
    out.landmark_id = landmark_id;
    out.mode = mode;
    out.sample_rate = 1.0 / period;
    out.stage = SignalStage::raw;
    out.samples.assign(count, std::numeric_limits<double>::quiet_NaN());
    out.timestamps.resize(count);
    out.interpolated.assign(count, false);

    const Eigen::Vector3d origin = positions.front();
    const auto displacement = [&](const Eigen::Vector3d& p) {
        const Eigen::Vector3d d = p - origin;
        switch (mode) {
        case DisplacementMode::horizontal: return d.x();
        case DisplacementMode::vertical: return d.y();
        case DisplacementMode::euclidean: break;
        }
        return d.norm();
    };

    std::size_t next = 0; // first observation with time >= grid time - tolerance
    for (std::size_t k = 0; k < count; ++k) {
        const double t = t0 + static_cast<double>(k) * period;
        out.timestamps[k] = t;
        while (next < times.size() && times[next] < t - tolerance) {
            ++next;
        }
        if (next < times.size() && std::abs(times[next] - t) <= tolerance) {
            out.samples[k] = displacement(positions[next]);
            continue;
        }
        if (next == 0 || next >= times.size()) {
            continue;
        }
        const double t_prev = times[next - 1];
        const double t_next = times[next];
        const double step = t_next - t_prev;
        if (step > max_step) {
            continue;
        }
        const double u = (t - t_prev) / step;
        out.samples[k] = displacement((1.0 - u) * positions[next - 1] + u * positions[next]);
        out.interpolated[k] = step > 1.5 * period;
    }
    out.segments = finite_runs(out.samples);
    return out;
}

MovementSignal apply_bandpass(const MovementSignal& signal, const FilterKernel& kernel)
{
    if (signal.stage != SignalStage::raw) {
        throw Error(ErrorKind::stage, "apply_bandpass needs a raw signal");
    }
    if (std::abs(kernel.sample_rate() - signal.sample_rate) > 1e-9 * signal.sample_rate) {
        throw Error(ErrorKind::parameter, "filter designed for " + std::to_string(kernel.sample_rate()) +
                                              " Hz applied to a " +
                                              std::to_string(signal.sample_rate) + " Hz signal");
    }
    MovementSignal out = signal;
    out.stage = SignalStage::filtered;
    out.filter_spec = kernel.spec();
    out.segments.clear();
    std::fill(out.samples.begin(), out.samples.end(), std::numeric_limits<double>::quiet_NaN());
    std::size_t longest = 0;
    for (const auto& seg : signal.segments) {
        longest = std::max(longest, seg.size());
        if (seg.size() < kernel.min_length()) {
            continue;
        }
        const std::span<const double> input(signal.samples.data() + seg.begin, seg.size());
        const auto filtered = kernel.apply(input);
        std::copy(filtered.begin(), filtered.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(seg.begin));
        out.segments.push_back(seg);
    }
    if (out.segments.empty()) {
        throw Error(ErrorKind::length, "longest gap-free stretch has " + std::to_string(longest) +
                                           " samples; filtering needs at least " +
                                           std::to_string(kernel.min_length()));
    }
    return out;
}

std::vector<MovementSignal> split_segments(const MovementSignal& signal)
{
    std::vector<MovementSignal> parts;
    for (const auto& seg : signal.segments) {
        MovementSignal part = signal;
        const auto b = static_cast<std::ptrdiff_t>(seg.begin);
        const auto e = static_cast<std::ptrdiff_t>(seg.end);
        part.samples.assign(signal.samples.begin() + b, signal.samples.begin() + e);
        part.timestamps.assign(signal.timestamps.begin() + b, signal.timestamps.begin() + e);
        part.interpolated.assign(signal.interpolated.begin() + b, signal.interpolated.begin() + e);
        part.segments = {{0, seg.size()}};
        parts.push_back(std::move(part));
    }
    return parts;
}

} // namespace nns
