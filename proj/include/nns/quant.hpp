#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nns/filter.hpp"
#include "nns/signal.hpp"

namespace nns {

enum class ThresholdMode {
    mean_abs, ///< mean of |x| over the segment
    mean_raw, ///< mean of x over the segment
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view name);

struct QuantParams {
    double min_peak_distance_s = 0.2;
    double max_intra_burst_gap_s = 1.5;
    int min_cycles_per_burst = 6;
    ThresholdMode threshold_mode = ThresholdMode::mean_abs;

    /// Throws Error(parameter).
    void validate() const;
    /// Minimum index distance between two kept peaks at `sample_rate`.
    std::size_t min_peak_distance_samples(double sample_rate) const;
};

struct CycleEvent {
    double time = 0.0;
    double amplitude = 0.0;
    std::size_t index = 0;
    /// Segment of the source signal the peak was found in.
    int segment = 0;

    bool operator==(const CycleEvent&) const = default;
};

/// A run of cycles. start_time/end_time extend half a mean cycle period
/// beyond the first and last peak, so duration = cycle count * mean period.
struct Burst {
    std::vector<CycleEvent> cycles;
    double start_time = 0.0;
    double end_time = 0.0;
    double duration = 0.0;

    int cycle_count() const noexcept { return static_cast<int>(cycles.size()); }
};

struct BurstSegmentation {
    std::vector<Burst> bursts;
    /// Runs shorter than min_cycles_per_burst.
    std::vector<Burst> fragments;
};

/// Where the analysed signal came from; stored in every report.
struct ReportParameters {
    QuantParams quant;
    int landmark_id = kDefaultLandmark;
    DisplacementMode mode = DisplacementMode::euclidean;
    std::optional<FilterSpec> filter;
    double sample_rate = 30.0;
};

struct NNSReport {
    std::vector<CycleEvent> cycles; ///< every detected cycle
    std::vector<Burst> bursts;
    std::vector<Burst> fragments;
    std::vector<int> cycles_per_burst;
    std::vector<double> burst_durations_s;
    double bursts_per_minute = 0.0;
    double cycles_per_minute = 0.0;
    /// Sum of in-burst cycles over summed burst duration; nullopt when undefined.
    std::optional<double> mean_frequency_hz;
    std::optional<double> mean_cycle_amplitude;
    double session_duration_s = 0.0;
    std::string units = "model";
    ReportParameters parameters;

    int in_burst_cycles() const;
};

/// Peaks of a filtered signal above the segment threshold.
///
/// A peak is a sample strictly above both neighbours, or the middle sample
/// (rounded down) of a flat top bounded by lower samples on both sides.
/// Only values strictly above the threshold qualify. Peaks closer than
/// min_peak_distance_samples() are resolved greedily by amplitude
/// (ties by lower index). Segments are processed independently.
std::vector<CycleEvent> detect_cycles(const MovementSignal& signal, const QuantParams& params);

/// Splits time-sorted cycles wherever the gap exceeds max_intra_burst_gap_s
/// or the source segment changes; runs with fewer than min_cycles_per_burst
/// cycles become fragments.
BurstSegmentation segment_bursts(std::span<const CycleEvent> cycles, const QuantParams& params);

/// Burst timing for a run of cycles (see Burst).
Burst make_burst(std::vector<CycleEvent> cycles);

NNSReport quantify(const MovementSignal& signal, std::span<const CycleEvent> cycles,
                   const BurstSegmentation& segmentation, double session_duration_s,
                   const QuantParams& params);

/// detect_cycles + segment_bursts + quantify over signal.duration_s().
NNSReport analyze_signal(const MovementSignal& filtered, const QuantParams& params);

} // namespace nns
