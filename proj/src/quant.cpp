#include "nns/quant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nns/error.hpp"

namespace nns {

std::string_view to_string(ThresholdMode mode)
{
    return mode == ThresholdMode::mean_abs ? "mean_abs" : "mean_raw";
}

ThresholdMode parse_threshold_mode(std::string_view name)
{
    if (name == "mean_abs") return ThresholdMode::mean_abs;
    if (name == "mean_raw") return ThresholdMode::mean_raw;
    throw Error(ErrorKind::validation,
                "threshold mode must be mean_abs or mean_raw, got '" + std::string(name) + "'");
}

void QuantParams::validate() const
{
    if (!(min_peak_distance_s > 0.0) || !std::isfinite(min_peak_distance_s)) {
        throw Error(ErrorKind::parameter, "min_peak_distance_s must be > 0");
    }
    if (!(max_intra_burst_gap_s > 0.0) || !std::isfinite(max_intra_burst_gap_s)) {
        throw Error(ErrorKind::parameter, "max_intra_burst_gap_s must be > 0");
    }
    if (min_cycles_per_burst < 1) {
        throw Error(ErrorKind::parameter, "min_cycles_per_burst must be >= 1");
    }
}

std::size_t QuantParams::min_peak_distance_samples(double sample_rate) const
{
    return static_cast<std::size_t>(std::ceil(min_peak_distance_s * sample_rate - 1e-9));
}

int NNSReport::in_burst_cycles() const
{
    return std::accumulate(cycles_per_burst.begin(), cycles_per_burst.end(), 0);
}

namespace {

/// Local maxima of x[begin, end), plateaus reduced to their middle index.
std::vector<std::size_t> local_maxima(std::span<const double> x)
{
    std::vector<std::size_t> peaks;
    if (x.size() < 3) {
        return peaks;
    }
    std::size_t i = 1;
    const std::size_t last = x.size() - 1;
    while (i < last) {
        if (x[i - 1] < x[i]) {
            std::size_t ahead = i + 1;
            while (ahead < last && x[ahead] == x[i]) {
                ++ahead;
            }
            if (x[ahead] < x[i]) {
                peaks.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return peaks;
}

} // namespace

std::vector<CycleEvent> detect_cycles(const MovementSignal& signal, const QuantParams& params)
{
    params.validate();
    if (signal.stage != SignalStage::filtered) {
        throw Error(ErrorKind::stage, "detect_cycles needs a filtered signal");
    }
    if (signal.samples.size() < 3) {
        throw Error(ErrorKind::length, "detect_cycles needs at least 3 samples");
    }
    const std::size_t min_distance = params.min_peak_distance_samples(signal.sample_rate);

    std::vector<CycleEvent> events;
    for (std::size_t s = 0; s < signal.segments.size(); ++s) {
        const auto& seg = signal.segments[s];
        const std::span<const double> x(signal.samples.data() + seg.begin, seg.size());
        if (x.empty()) {
            continue;
        }
        double threshold = 0.0;
        for (const double v : x) {
            threshold += params.threshold_mode == ThresholdMode::mean_abs ? std::abs(v) : v;
        }
        threshold /= static_cast<double>(x.size());

        std::vector<std::size_t> candidates;
        for (const auto p : local_maxima(x)) {
            if (x[p] > threshold) {
                candidates.push_back(p);
            }
        }
        // Highest first; stable sort keeps lower indices first on ties.
        std::vector<std::size_t> priority(candidates.size());
        std::iota(priority.begin(), priority.end(), 0);
        std::stable_sort(priority.begin(), priority.end(), [&](std::size_t a, std::size_t b) {
            return x[candidates[a]] > x[candidates[b]];
        });
        std::vector<bool> keep(candidates.size(), true);
        for (const auto c : priority) {
            if (!keep[c]) {
                continue;
            }
            for (std::size_t j = c; j-- > 0 && candidates[c] - candidates[j] < min_distance;) {
                keep[j] = false;
            }
            for (std::size_t j = c + 1; j < candidates.size() && candidates[j] - candidates[c] < min_distance; ++j) {
                keep[j] = false;
            }
        }
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (keep[c]) {
                const std::size_t index = seg.begin + candidates[c];
                events.push_back({signal.timestamps[index], signal.samples[index], index, static_cast<int>(s)});
            }
        }
    }
    return events;
}

Burst make_burst(std::vector<CycleEvent> cycles)
{
    Burst b;
    if (cycles.empty()) {
        return b;
    }
    const double first = cycles.front().time;
    const double last = cycles.back().time;
    const auto n = static_cast<double>(cycles.size());
    const double period = cycles.size() > 1 ? (last - first) / (n - 1.0) : 0.0;
    b.start_time = first - 0.5 * period;
    b.end_time = last + 0.5 * period;
    b.duration = n * period;
    b.cycles = std::move(cycles);
    return b;
}

BurstSegmentation segment_bursts(std::span<const CycleEvent> cycles, const QuantParams& params)
{
    params.validate();
    for (std::size_t i = 1; i < cycles.size(); ++i) {
        if (!(cycles[i].time > cycles[i - 1].time)) {
            throw Error(ErrorKind::ordering, "cycles must be sorted by strictly increasing time");
        }
    }
    BurstSegmentation out;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= cycles.size(); ++i) {
        const bool split = i == cycles.size() ||
                           cycles[i].time - cycles[i - 1].time > params.max_intra_burst_gap_s ||
                           cycles[i].segment != cycles[i - 1].segment;
        if (!split) {
            continue;
        }
        if (i > start) {
            Burst run = make_burst({cycles.begin() + static_cast<std::ptrdiff_t>(start),
                                    cycles.begin() + static_cast<std::ptrdiff_t>(i)});
            (run.cycle_count() >= params.min_cycles_per_burst ? out.bursts : out.fragments)
                .push_back(std::move(run));
        }
        start = i;
    }
    return out;
}

NNSReport quantify(const MovementSignal& signal, std::span<const CycleEvent> cycles,
                   const BurstSegmentation& segmentation, double session_duration_s,
                   const QuantParams& params)
{
    params.validate();
    if (!(session_duration_s > 0.0) || !std::isfinite(session_duration_s)) {
        throw Error(ErrorKind::parameter, "session duration must be > 0 s");
    }
    std::set<std::size_t> known;
    for (const auto& c : cycles) {
        known.insert(c.index);
    }
    for (const auto& b : segmentation.bursts) {
        for (const auto& c : b.cycles) {
            if (!known.contains(c.index)) {
                throw Error(ErrorKind::parameter, "burst cycle at sample " + std::to_string(c.index) +
                                                      " is missing from the cycle list");
            }
        }
    }

    NNSReport r;
    r.cycles.assign(cycles.begin(), cycles.end());
    r.bursts = segmentation.bursts;
    r.fragments = segmentation.fragments;
    r.session_duration_s = session_duration_s;
    r.parameters = {params, signal.landmark_id, signal.mode, signal.filter_spec, signal.sample_rate};

    double total_duration = 0.0;
    double amplitude_sum = 0.0;
    int total_cycles = 0;
    for (const auto& b : r.bursts) {
        r.cycles_per_burst.push_back(b.cycle_count());
        r.burst_durations_s.push_back(b.duration);
        total_duration += b.duration;
        total_cycles += b.cycle_count();
        for (const auto& c : b.cycles) {
            amplitude_sum += c.amplitude;
        }
    }
    r.bursts_per_minute = 60.0 * static_cast<double>(r.bursts.size()) / session_duration_s;
    r.cycles_per_minute = 60.0 * total_cycles / session_duration_s;
    if (total_duration > 0.0) {
        r.mean_frequency_hz = total_cycles / total_duration;
    }
    if (total_cycles > 0) {
        r.mean_cycle_amplitude = amplitude_sum / total_cycles;
    }
    return r;
}

NNSReport analyze_signal(const MovementSignal& filtered, const QuantParams& params)
{
    const auto cycles = detect_cycles(filtered, params);
    const auto segmentation = segment_bursts(cycles, params);
    return quantify(filtered, cycles, segmentation, filtered.duration_s(), params);
}

} // namespace nns
