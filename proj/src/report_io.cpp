#include "nns/report_io.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "nns/error.hpp"
#include "nns/trajectory_io.hpp"

namespace nns {

using Json = nlohmann::json;

namespace {

const Json& field(const Json& doc, const char* name)
{
    if (!doc.is_object()) {
        throw Error(ErrorKind::parse, std::string("expected an object holding '") + name + "'");
    }
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw Error(ErrorKind::parse, std::string("missing field '") + name + "'");
    }
    return *it;
}

double number(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (!v.is_number()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be a number");
    }
    return v.get<double>();
}

std::optional<double> optional_number(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (v.is_null()) {
        return std::nullopt;
    }
    if (!v.is_number()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be a number or null");
    }
    return v.get<double>();
}

long long integer(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (!v.is_number_integer()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be an integer");
    }
    return v.get<long long>();
}

bool boolean(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (!v.is_boolean()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be true or false");
    }
    return v.get<bool>();
}

std::string text(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (!v.is_string()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be a string");
    }
    return v.get<std::string>();
}

const Json& array(const Json& doc, const char* name)
{
    const Json& v = field(doc, name);
    if (!v.is_array()) {
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be an array");
    }
    return v;
}

std::vector<double> number_list(const Json& doc, const char* name)
{
    std::vector<double> out;
    for (const auto& v : array(doc, name)) {
        if (!v.is_number()) {
            throw Error(ErrorKind::parse, std::string("field '") + name + "' must hold numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

void check_schema(const Json& doc, const char* expected)
{
    const std::string schema = text(doc, "schema");
    if (schema != expected) {
        throw Error(ErrorKind::version,
                    "unsupported schema '" + schema + "', expected '" + expected + "'");
    }
}

template <typename T>
T with_parse_context(const char* what, T (*fn)(const Json&), const Json& doc)
{
    try {
        return fn(doc);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::parse, std::string(what) + ": " + e.what());
    }
}

OrderedJson cycle_to_json(const CycleEvent& c)
{
    return {{"time_s", c.time}, {"amplitude", c.amplitude}, {"index", c.index}, {"segment", c.segment}};
}

CycleEvent cycle_from_json(const Json& doc)
{
    CycleEvent c;
    c.time = number(doc, "time_s");
    c.amplitude = number(doc, "amplitude");
    const long long index = integer(doc, "index");
    if (index < 0) {
        throw Error(ErrorKind::parse, "cycle index must be >= 0");
    }
    c.index = static_cast<std::size_t>(index);
    c.segment = static_cast<int>(integer(doc, "segment"));
    return c;
}

OrderedJson burst_to_json(const Burst& b)
{
    OrderedJson cycles = OrderedJson::array();
    for (const auto& c : b.cycles) {
        cycles.push_back(cycle_to_json(c));
    }
    return {{"start_time_s", b.start_time},
            {"end_time_s", b.end_time},
            {"duration_s", b.duration},
            {"cycle_count", b.cycle_count()},
            {"cycles", std::move(cycles)}};
}

Burst burst_from_json(const Json& doc)
{
    Burst b;
    b.start_time = number(doc, "start_time_s");
    b.end_time = number(doc, "end_time_s");
    b.duration = number(doc, "duration_s");
    for (const auto& c : array(doc, "cycles")) {
        b.cycles.push_back(cycle_from_json(c));
    }
    if (integer(doc, "cycle_count") != b.cycle_count()) {
        throw Error(ErrorKind::parse, "burst cycle_count disagrees with its cycle list");
    }
    return b;
}

std::vector<Burst> burst_list(const Json& doc, const char* name)
{
    std::vector<Burst> out;
    for (const auto& b : array(doc, name)) {
        out.push_back(burst_from_json(b));
    }
    return out;
}

OrderedJson optional_to_json(const std::optional<double>& v)
{
    return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

NNSReport report_from_json_impl(const Json& doc)
{
    check_schema(doc, kReportSchema);
    NNSReport r;
    r.units = text(field(doc, "units"), "displacement");
    r.session_duration_s = number(doc, "session_duration_s");
    const Json& summary = field(doc, "summary");
    for (const auto& v : array(summary, "cycles_per_burst")) {
        if (!v.is_number_integer()) {
            throw Error(ErrorKind::parse, "field 'cycles_per_burst' must hold integers");
        }
        r.cycles_per_burst.push_back(v.get<int>());
    }
    r.burst_durations_s = number_list(summary, "burst_durations_s");
    r.bursts_per_minute = number(summary, "bursts_per_minute");
    r.cycles_per_minute = number(summary, "cycles_per_minute");
    r.mean_frequency_hz = optional_number(summary, "mean_frequency_hz");
    if (boolean(summary, "frequency_defined") != r.mean_frequency_hz.has_value()) {
        throw Error(ErrorKind::parse, "frequency_defined disagrees with mean_frequency_hz");
    }
    r.mean_cycle_amplitude = optional_number(summary, "mean_cycle_amplitude");
    r.bursts = burst_list(doc, "bursts");
    r.fragments = burst_list(doc, "fragments");
    for (const auto& c : array(doc, "cycles")) {
        r.cycles.push_back(cycle_from_json(c));
    }
    if (r.cycles_per_burst.size() != r.bursts.size() || r.burst_durations_s.size() != r.bursts.size()) {
        throw Error(ErrorKind::parse, "summary lists disagree with the burst list");
    }
    const Json& params = field(doc, "parameters");
    r.parameters.quant = quant_params_from_json(field(params, "quant"));
    r.parameters.landmark_id = static_cast<int>(integer(params, "landmark_id"));
    r.parameters.mode = parse_displacement_mode(text(params, "mode"));
    r.parameters.sample_rate = number(params, "sample_rate_hz");
    const Json& filter = field(params, "filter");
    if (!filter.is_null()) {
        r.parameters.filter = filter_spec_from_json(filter);
    }
    return r;
}

MovementSignal signal_from_json_impl(const Json& doc)
{
    check_schema(doc, kSignalSchema);
    MovementSignal s;
    s.landmark_id = static_cast<int>(integer(doc, "landmark_id"));
    s.mode = parse_displacement_mode(text(doc, "mode"));
    s.stage = parse_signal_stage(text(doc, "stage"));
    s.sample_rate = number(doc, "sample_rate_hz");
    if (!(s.sample_rate > 0.0)) {
        throw Error(ErrorKind::parse, "sample_rate_hz must be > 0");
    }
    const Json& filter = field(doc, "filter");
    if (!filter.is_null()) {
        s.filter_spec = filter_spec_from_json(filter);
    }
    s.timestamps = number_list(doc, "timestamps_s");
    for (const auto& v : array(doc, "samples")) {
        if (v.is_null()) {
            s.samples.push_back(std::numeric_limits<double>::quiet_NaN());
        } else if (v.is_number()) {
            s.samples.push_back(v.get<double>());
        } else {
            throw Error(ErrorKind::parse, "field 'samples' must hold numbers or null");
        }
    }
    if (s.samples.size() != s.timestamps.size()) {
        throw Error(ErrorKind::parse, "samples and timestamps_s differ in length");
    }
    s.interpolated.assign(s.samples.size(), false);
    for (const auto& v : array(doc, "interpolated_indices")) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() >= s.samples.size()) {
            throw Error(ErrorKind::parse, "interpolated_indices entry out of range");
        }
        s.interpolated[v.get<std::size_t>()] = true;
    }
    for (const auto& v : array(doc, "segments")) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
            throw Error(ErrorKind::parse, "segments must be [begin, end] pairs");
        }
        const SignalSegment seg{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
        if (seg.begin >= seg.end || seg.end > s.samples.size()) {
            throw Error(ErrorKind::parse, "segment out of range");
        }
        for (std::size_t i = seg.begin; i < seg.end; ++i) {
            if (!std::isfinite(s.samples[i])) {
                throw Error(ErrorKind::parse, "segment covers a missing sample");
            }
        }
        s.segments.push_back(seg);
    }
    return s;
}

GroundTruth truth_from_json_impl(const Json& doc)
{
    check_schema(doc, kTruthSchema);
    GroundTruth t;
    t.cycle_times = number_list(doc, "cycle_times_s");
    for (const auto& span : array(doc, "burst_spans_s")) {
        if (!span.is_array() || span.size() != 2 || !span[0].is_number() || !span[1].is_number()) {
            throw Error(ErrorKind::parse, "burst_spans_s must be [start, end] pairs");
        }
        t.burst_spans.emplace_back(span[0].get<double>(), span[1].get<double>());
    }
    for (const auto& v : array(doc, "cycles_per_burst")) {
        t.cycles_per_burst.push_back(v.get<int>());
    }
    t.true_frequency_hz = number(doc, "true_frequency_hz");
    t.session_duration_s = number(doc, "session_duration_s");
    return t;
}

} // namespace

Json parse_json_text(const std::string& content, const std::string& what)
{
    try {
        return Json::parse(content);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::parse, what + " is not valid JSON: " + e.what());
    }
}

OrderedJson filter_spec_to_json(const FilterSpec& spec)
{
    return {{"low_cut_hz", spec.low_cut_hz},
            {"high_cut_hz", spec.high_cut_hz},
            {"order", spec.order},
            {"zero_phase", spec.zero_phase}};
}

FilterSpec filter_spec_from_json(const Json& doc, FilterSpec base)
{
    if (!doc.is_object()) {
        throw Error(ErrorKind::parse, "filter must be an object");
    }
    if (doc.contains("low_cut_hz")) base.low_cut_hz = number(doc, "low_cut_hz");
    if (doc.contains("high_cut_hz")) base.high_cut_hz = number(doc, "high_cut_hz");
    if (doc.contains("order")) base.order = static_cast<int>(integer(doc, "order"));
    if (doc.contains("zero_phase")) base.zero_phase = boolean(doc, "zero_phase");
    return base;
}

OrderedJson quant_params_to_json(const QuantParams& p)
{
    return {{"min_peak_distance_s", p.min_peak_distance_s},
            {"max_intra_burst_gap_s", p.max_intra_burst_gap_s},
            {"min_cycles_per_burst", p.min_cycles_per_burst},
            {"threshold_mode", std::string(to_string(p.threshold_mode))}};
}

QuantParams quant_params_from_json(const Json& doc, QuantParams base)
{
    if (!doc.is_object()) {
        throw Error(ErrorKind::parse, "quant parameters must be an object");
    }
    if (doc.contains("min_peak_distance_s")) base.min_peak_distance_s = number(doc, "min_peak_distance_s");
    if (doc.contains("max_intra_burst_gap_s")) base.max_intra_burst_gap_s = number(doc, "max_intra_burst_gap_s");
    if (doc.contains("min_cycles_per_burst")) {
        base.min_cycles_per_burst = static_cast<int>(integer(doc, "min_cycles_per_burst"));
    }
    if (doc.contains("threshold_mode")) base.threshold_mode = parse_threshold_mode(text(doc, "threshold_mode"));
    return base;
}

OrderedJson report_to_json(const NNSReport& r)
{
    OrderedJson doc;
    doc["schema"] = kReportSchema;
    doc["units"] = {{"displacement", r.units},
                    {"time", "s"},
                    {"frequency", "Hz"},
                    {"rates", "per minute"}};
    doc["session_duration_s"] = r.session_duration_s;
    doc["summary"] = {{"burst_count", r.bursts.size()},
                      {"in_burst_cycles", r.in_burst_cycles()},
                      {"detected_cycles", r.cycles.size()},
                      {"fragment_count", r.fragments.size()},
                      {"cycles_per_burst", r.cycles_per_burst},
                      {"burst_durations_s", r.burst_durations_s},
                      {"bursts_per_minute", r.bursts_per_minute},
                      {"cycles_per_minute", r.cycles_per_minute},
                      {"mean_frequency_hz", optional_to_json(r.mean_frequency_hz)},
                      {"frequency_defined", r.mean_frequency_hz.has_value()},
                      {"mean_cycle_amplitude", optional_to_json(r.mean_cycle_amplitude)}};
    doc["bursts"] = OrderedJson::array();
    for (const auto& b : r.bursts) {
        doc["bursts"].push_back(burst_to_json(b));
    }
    doc["fragments"] = OrderedJson::array();
    for (const auto& b : r.fragments) {
        doc["fragments"].push_back(burst_to_json(b));
    }
    doc["cycles"] = OrderedJson::array();
    for (const auto& c : r.cycles) {
        doc["cycles"].push_back(cycle_to_json(c));
    }
    doc["parameters"] = {
        {"quant", quant_params_to_json(r.parameters.quant)},
        {"landmark_id", r.parameters.landmark_id},
        {"mode", std::string(to_string(r.parameters.mode))},
        {"sample_rate_hz", r.parameters.sample_rate},
        {"filter", r.parameters.filter ? filter_spec_to_json(*r.parameters.filter) : OrderedJson(nullptr)}};
    return doc;
}

NNSReport report_from_json(const Json& doc)
{
    return with_parse_context("report", &report_from_json_impl, doc);
}

std::string serialize_report(const NNSReport& report)
{
    return report_to_json(report).dump(2) + "\n";
}

NNSReport parse_report_text(const std::string& content)
{
    return report_from_json(parse_json_text(content, "report"));
}

void write_report(const NNSReport& report, const std::filesystem::path& path)
{
    write_text_file(path, serialize_report(report));
}

NNSReport parse_report(const std::filesystem::path& path)
{
    return parse_report_text(read_text_file(path));
}

OrderedJson signal_to_json(const MovementSignal& s)
{
    OrderedJson doc;
    doc["schema"] = kSignalSchema;
    doc["landmark_id"] = s.landmark_id;
    doc["mode"] = std::string(to_string(s.mode));
    doc["stage"] = std::string(to_string(s.stage));
    doc["units"] = {{"displacement", "model"}, {"time", "s"}};
    doc["sample_rate_hz"] = s.sample_rate;
    doc["filter"] = s.filter_spec ? filter_spec_to_json(*s.filter_spec) : OrderedJson(nullptr);
    doc["timestamps_s"] = s.timestamps;
    OrderedJson samples = OrderedJson::array();
    for (const double v : s.samples) {
        samples.push_back(std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr));
    }
    doc["samples"] = std::move(samples);
    OrderedJson interpolated = OrderedJson::array();
    for (std::size_t i = 0; i < s.interpolated.size(); ++i) {
        if (s.interpolated[i]) {
            interpolated.push_back(i);
        }
    }
    doc["interpolated_indices"] = std::move(interpolated);
    OrderedJson segments = OrderedJson::array();
    for (const auto& seg : s.segments) {
        segments.push_back({seg.begin, seg.end});
    }
    doc["segments"] = std::move(segments);
    return doc;
}

MovementSignal signal_from_json(const Json& doc)
{
    return with_parse_context("signal", &signal_from_json_impl, doc);
}

std::string serialize_signal(const MovementSignal& signal)
{
    return signal_to_json(signal).dump() + "\n";
}

MovementSignal parse_signal_text(const std::string& content)
{
    return signal_from_json(parse_json_text(content, "signal"));
}

void write_signal(const MovementSignal& signal, const std::filesystem::path& path)
{
    write_text_file(path, serialize_signal(signal));
}

MovementSignal parse_signal(const std::filesystem::path& path)
{
    return parse_signal_text(read_text_file(path));
}

OrderedJson truth_to_json(const GroundTruth& t)
{
    OrderedJson spans = OrderedJson::array();
    for (const auto& [start, end] : t.burst_spans) {
        spans.push_back({start, end});
    }
    return {{"schema", kTruthSchema},
            {"cycle_times_s", t.cycle_times},
            {"burst_spans_s", std::move(spans)},
            {"cycles_per_burst", t.cycles_per_burst},
            {"true_frequency_hz", t.true_frequency_hz},
            {"session_duration_s", t.session_duration_s}};
}

GroundTruth truth_from_json(const Json& doc)
{
    return with_parse_context("truth", &truth_from_json_impl, doc);
}

void write_truth(const GroundTruth& truth, const std::filesystem::path& path)
{
    write_text_file(path, truth_to_json(truth).dump(2) + "\n");
}

GroundTruth parse_truth(const std::filesystem::path& path)
{
    return truth_from_json(parse_json_text(read_text_file(path), "truth"));
}

OrderedJson score_to_json(const DetectionScore& s)
{
    return {{"schema", kScoreSchema},
            {"match_window_s", kMatchWindowS},
            {"cycle_recall", s.cycle_recall},
            {"cycle_precision", s.cycle_precision},
            {"matched_cycles", s.matched},
            {"detected_cycles", s.detected},
            {"truth_cycles", s.truth_cycles},
            {"burst_count_error", s.burst_count_error},
            {"frequency_error_hz", optional_to_json(s.frequency_error_hz)}};
}

namespace {

void reject_unknown_keys(const Json& doc, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw Error(ErrorKind::parse, "unknown " + where + " field '" + key + "'");
        }
    }
}

PoseScript pose_from_json(const Json& doc)
{
    reject_unknown_keys(doc,
                        {"scale_px", "center_x_px", "center_y_px", "yaw_deg", "pitch_deg", "roll_deg",
                         "yaw_amplitude_deg", "pitch_amplitude_deg", "roll_amplitude_deg",
                         "translation_amplitude_px", "motion_hz", "pixel_noise_sd", "drop_fraction",
                         "landmark_id", "subject_sd"},
                        "pose");
    PoseScript p;
    const auto opt = [&](const char* name, double& target) {
        if (doc.contains(name)) target = number(doc, name);
    };
    opt("scale_px", p.scale_px);
    opt("center_x_px", p.center_x_px);
    opt("center_y_px", p.center_y_px);
    opt("yaw_deg", p.yaw_deg);
    opt("pitch_deg", p.pitch_deg);
    opt("roll_deg", p.roll_deg);
    opt("yaw_amplitude_deg", p.yaw_amplitude_deg);
    opt("pitch_amplitude_deg", p.pitch_amplitude_deg);
    opt("roll_amplitude_deg", p.roll_amplitude_deg);
    opt("translation_amplitude_px", p.translation_amplitude_px);
    opt("motion_hz", p.motion_hz);
    opt("pixel_noise_sd", p.pixel_noise_sd);
    opt("drop_fraction", p.drop_fraction);
    opt("subject_sd", p.subject_sd);
    if (doc.contains("landmark_id")) p.landmark_id = static_cast<int>(integer(doc, "landmark_id"));
    p.validate();
    return p;
}

ScenarioDocument scenario_from_json_impl(const Json& doc)
{
    if (!doc.is_object()) {
        throw Error(ErrorKind::parse, "scenario must be an object");
    }
    if (doc.contains("schema")) {
        check_schema(doc, kScenarioSchema);
    }
    reject_unknown_keys(doc,
                        {"schema", "burst_count", "cycles_per_burst_range", "intra_burst_hz",
                         "pause_s_range", "lead_in_s", "tail_s", "cycle_amplitude", "pulse_width_s",
                         "noise_sd", "drift_amplitude", "drift_hz", "sample_rate", "seed", "pose"},
                        "scenario");
    ScenarioDocument out;
    Scenario& s = out.scenario;
    const auto opt = [&](const char* name, double& target) {
        if (doc.contains(name)) target = number(doc, name);
    };
    if (doc.contains("burst_count")) s.burst_count = static_cast<int>(integer(doc, "burst_count"));
    if (doc.contains("cycles_per_burst_range")) {
        const Json& r = array(doc, "cycles_per_burst_range");
        if (r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
            throw Error(ErrorKind::parse, "cycles_per_burst_range must be [min, max] integers");
        }
        s.min_cycles_per_burst = r[0].get<int>();
        s.max_cycles_per_burst = r[1].get<int>();
    }
    if (doc.contains("pause_s_range")) {
        const auto r = number_list(doc, "pause_s_range");
        if (r.size() != 2) {
            throw Error(ErrorKind::parse, "pause_s_range must be [min, max]");
        }
        s.min_pause_s = r[0];
        s.max_pause_s = r[1];
    }
    opt("intra_burst_hz", s.intra_burst_hz);
    opt("lead_in_s", s.lead_in_s);
    opt("tail_s", s.tail_s);
    opt("cycle_amplitude", s.cycle_amplitude);
    opt("pulse_width_s", s.pulse_width_s);
    opt("noise_sd", s.noise_sd);
    opt("drift_amplitude", s.drift_amplitude);
    opt("drift_hz", s.drift_hz);
    opt("sample_rate", s.sample_rate);
    if (doc.contains("seed")) {
        const Json& seed = field(doc, "seed");
        if (!seed.is_number_unsigned()) {
            throw Error(ErrorKind::parse, "field 'seed' must be a non-negative integer");
        }
        s.seed = seed.get<std::uint64_t>();
    }
    s.validate();
    if (doc.contains("pose")) {
        out.pose = pose_from_json(field(doc, "pose"));
    }
    return out;
}

} // namespace

OrderedJson scenario_to_json(const Scenario& s, const std::optional<PoseScript>& pose)
{
    OrderedJson doc = {{"schema", kScenarioSchema},
                       {"burst_count", s.burst_count},
                       {"cycles_per_burst_range", {s.min_cycles_per_burst, s.max_cycles_per_burst}},
                       {"intra_burst_hz", s.intra_burst_hz},
                       {"pause_s_range", {s.min_pause_s, s.max_pause_s}},
                       {"lead_in_s", s.lead_in_s},
                       {"tail_s", s.tail_s},
                       {"cycle_amplitude", s.cycle_amplitude},
                       {"pulse_width_s", s.pulse_width_s},
                       {"noise_sd", s.noise_sd},
                       {"drift_amplitude", s.drift_amplitude},
                       {"drift_hz", s.drift_hz},
                       {"sample_rate", s.sample_rate},
                       {"seed", s.seed}};
    if (pose) {
        doc["pose"] = {{"scale_px", pose->scale_px},
                       {"center_x_px", pose->center_x_px},
                       {"center_y_px", pose->center_y_px},
                       {"yaw_deg", pose->yaw_deg},
                       {"pitch_deg", pose->pitch_deg},
                       {"roll_deg", pose->roll_deg},
                       {"yaw_amplitude_deg", pose->yaw_amplitude_deg},
                       {"pitch_amplitude_deg", pose->pitch_amplitude_deg},
                       {"roll_amplitude_deg", pose->roll_amplitude_deg},
                       {"translation_amplitude_px", pose->translation_amplitude_px},
                       {"motion_hz", pose->motion_hz},
                       {"pixel_noise_sd", pose->pixel_noise_sd},
                       {"drop_fraction", pose->drop_fraction},
                       {"landmark_id", pose->landmark_id},
                       {"subject_sd", pose->subject_sd}};
    }
    return doc;
}

ScenarioDocument parse_scenario_text(const std::string& content)
{
    const Json doc = parse_json_text(content, "scenario");
    try {
        return scenario_from_json_impl(doc);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::parse, std::string("scenario: ") + e.what());
    }
}

ScenarioDocument parse_scenario(const std::filesystem::path& path)
{
    return parse_scenario_text(read_text_file(path));
}

} // namespace nns
