#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nns/camera_fit.hpp"
#include "nns/filter.hpp"
#include "nns/quant.hpp"
#include "nns/shape_model.hpp"
#include "nns/signal.hpp"
#include "nns/trajectory_io.hpp"

namespace nns {

struct PipelineConfig {
    FitConfig fit;
    /// Worker threads for per-frame fitting.
    int jobs = 1;
    int landmark_id = kDefaultLandmark;
    DisplacementMode mode = DisplacementMode::euclidean;
    FilterSpec filter;
    QuantParams quant;
    SignalOptions signal;

    /// Throws Error(parameter) or Error(range), labelled with the stage that owns the field.
    void validate() const;
};

struct PipelineResult {
    std::vector<FrameOutcome> outcomes;
    MovementSignal raw;
    MovementSignal filtered;
    NNSReport report;
};

/// Fit, signal extraction, filtering and quantification. Errors carry the
/// stage label "fit", "signal", "filter" or "quantify".
PipelineResult run_pipeline(const TrajectorySession& session, const ShapeModel& model,
                            const PipelineConfig& config);

/// Signal stages only: filter a raw signal, then quantify it.
MovementSignal filter_stage(const MovementSignal& raw, const FilterSpec& spec);
NNSReport quantify_stage(const MovementSignal& filtered, const QuantParams& params);

/// File names written by write_artifacts().
inline constexpr const char* kLandmarksFile = "landmarks.csv";
inline constexpr const char* kRawSignalFile = "signal_raw.json";
inline constexpr const char* kFilteredSignalFile = "signal_filtered.json";
inline constexpr const char* kReportFile = "report.json";

/// `metadata` heads the landmark file (see landmark_metadata()).
void write_artifacts(const PipelineResult& result, const std::filesystem::path& out_dir,
                     const std::map<std::string, std::string>& metadata = {});

/// Reads both inputs (stage "parse"), runs the pipeline and, when out_dir is
/// given, writes landmarks, both signals and the report there.
NNSReport run_pipeline(const std::filesystem::path& trajectory_path,
                       const std::filesystem::path& model_path, const PipelineConfig& config,
                       const std::optional<std::filesystem::path>& out_dir = {});

struct BatchOutcome {
    std::filesystem::path trajectory;
    std::filesystem::path out_dir;
    std::optional<NNSReport> report;
    std::string error;
};

/// Runs every trajectory through the pipeline on `jobs` workers. Session i
/// writes to out_root / <trajectory stem>; failures are recorded, not thrown.
std::vector<BatchOutcome> run_batch(std::span<const std::filesystem::path> trajectories,
                                    const ShapeModel& model, const PipelineConfig& config,
                                    const std::filesystem::path& out_root, int jobs);

} // namespace nns
