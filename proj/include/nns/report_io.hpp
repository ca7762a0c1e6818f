#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nns/quant.hpp"
#include "nns/signal.hpp"
#include "nns/synth.hpp"

namespace nns {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "nns-report/1";
inline constexpr const char* kSignalSchema = "nns-signal/1";
inline constexpr const char* kTruthSchema = "nns-truth/1";
inline constexpr const char* kScoreSchema = "nns-score/1";
inline constexpr const char* kScenarioSchema = "nns-scenario/1";

// Reports. Numbers are written in shortest round-trip form, so parsing a
// written report gives back bit-identical values.
OrderedJson report_to_json(const NNSReport& report);
NNSReport report_from_json(const nlohmann::json& doc);
std::string serialize_report(const NNSReport& report);
/// Throws Error(parse) on malformed or truncated text, Error(version) on an
/// unknown schema; never returns a partial report.
NNSReport parse_report_text(const std::string& text);
void write_report(const NNSReport& report, const std::filesystem::path& path);
NNSReport parse_report(const std::filesystem::path& path);

OrderedJson signal_to_json(const MovementSignal& signal);
MovementSignal signal_from_json(const nlohmann::json& doc);
std::string serialize_signal(const MovementSignal& signal);
MovementSignal parse_signal_text(const std::string& text);
void write_signal(const MovementSignal& signal, const std::filesystem::path& path);
MovementSignal parse_signal(const std::filesystem::path& path);

OrderedJson truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& doc);
void write_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth parse_truth(const std::filesystem::path& path);

OrderedJson score_to_json(const DetectionScore& score);

OrderedJson filter_spec_to_json(const FilterSpec& spec);
/// Missing keys keep the defaults of `base`.
FilterSpec filter_spec_from_json(const nlohmann::json& doc, FilterSpec base = {});
OrderedJson quant_params_to_json(const QuantParams& params);
QuantParams quant_params_from_json(const nlohmann::json& doc, QuantParams base = {});

/// Scenario document: every Scenario field is optional (defaults apply),
/// plus an optional "pose" object with PoseScript fields.
struct ScenarioDocument {
    Scenario scenario;
    std::optional<PoseScript> pose;
};
OrderedJson scenario_to_json(const Scenario& scenario, const std::optional<PoseScript>& pose = {});
ScenarioDocument parse_scenario_text(const std::string& text);
ScenarioDocument parse_scenario(const std::filesystem::path& path);

/// Parses JSON text, mapping syntax errors to Error(parse).
nlohmann::json parse_json_text(const std::string& text, const std::string& what);

} // namespace nns
