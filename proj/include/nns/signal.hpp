#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nns/camera_fit.hpp"
#include "nns/filter.hpp"
#include "nns/shape_model.hpp"

namespace nns {

enum class DisplacementMode { euclidean, horizontal, vertical };
enum class SignalStage { raw, filtered };

std::string_view to_string(DisplacementMode mode);
std::string_view to_string(SignalStage stage);
/// Throws Error(validation) for an unknown name.
DisplacementMode parse_displacement_mode(std::string_view name);
SignalStage parse_signal_stage(std::string_view name);

/// Half-open sample range [begin, end) without gaps.
struct SignalSegment {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const SignalSegment&) const = default;
};

/// One landmark's displacement over a uniform time grid (model units).
///
/// Samples inside gaps too long to interpolate are NaN; `segments` lists
/// the gap-free runs, which are filtered and analysed independently.
struct MovementSignal {
    int landmark_id = kDefaultLandmark;
    DisplacementMode mode = DisplacementMode::euclidean;
    double sample_rate = 30.0;
    std::vector<double> samples;
    std::vector<double> timestamps;
    SignalStage stage = SignalStage::raw;
    std::optional<FilterSpec> filter_spec;
    /// True where the sample was filled across missing frames.
    std::vector<bool> interpolated;
    std::vector<SignalSegment> segments;

    std::size_t size() const noexcept { return samples.size(); }
    /// Number of samples divided by the sample rate.
    double duration_s() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Gap-free raw signal on t = start_time + i / sample_rate.
MovementSignal make_signal(std::vector<double> samples, double sample_rate, double start_time = 0.0,
                           SignalStage stage = SignalStage::raw);

/// Frontalized landmarks of one frame; nullopt when the frame was not fitted.
struct FrontalizedFrame {
    int frame_index = 0;
    double timestamp = 0.0;
    std::optional<Landmarks3D> landmarks;
};

std::vector<FrontalizedFrame> frontalized_track(std::span<const FrameOutcome> outcomes);

struct SignalOptions {
    /// Overrides the rate estimated from frame timestamps.
    std::optional<double> sample_rate;
    /// Longer runs of missing frames split the signal into segments.
    double max_interpolation_gap_s = 0.5;
    /// Timestamps within this fraction of a period of a grid point are used as is.
    double jitter_tolerance = 0.01;
};

/// Displacement of `landmark_id` from its position in the first fitted frame.
///
/// The sample period is 1/options.sample_rate when given, otherwise the
/// median of (timestamp step / frame-index step) over consecutive fitted
/// frames. Observations are placed on
/// a uniform grid starting at the first fitted frame; grid points without a
/// matching observation are linearly interpolated from the neighbouring
/// fitted frames when the missing stretch is at most max_interpolation_gap_s,
/// and left as NaN (splitting the signal) otherwise.
MovementSignal displacement_signal(std::span<const FrontalizedFrame> frames, int landmark_id,
                                   DisplacementMode mode, const SignalOptions& options = {});

MovementSignal displacement_signal(std::span<const FrameOutcome> outcomes, int landmark_id,
                                   DisplacementMode mode, const SignalOptions& options = {});

/// Filters every segment of a raw signal with `kernel`. Segments shorter
/// than kernel.min_length() are blanked to NaN and removed from `segments`;
/// if none is long enough, throws Error(length).
MovementSignal apply_bandpass(const MovementSignal& signal, const FilterKernel& kernel);

/// Copies of the individual segments as standalone gap-free signals.
std::vector<MovementSignal> split_segments(const MovementSignal& signal);

} // namespace nns
