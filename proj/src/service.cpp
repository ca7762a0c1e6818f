#include "nns/service.hpp"

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include <httplib.h>

#include "nns/annotation.hpp"
#include "nns/error.hpp"
#include "nns/pipeline.hpp"
#include "nns/report_io.hpp"
#include "nns/trajectory_io.hpp"

namespace nns {

namespace {

using Json = nlohmann::json;

constexpr const char* kTrajectoryFile = "trajectory.csv";
constexpr const char* kSessionFile = "session.json";

struct FieldError {
    std::vector<std::string> fields;
    std::string message;
};

struct ErrorInfo {
    std::string kind;
    std::string stage;
    std::string message;
};

int status_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::not_found:
        return 404;
    case ErrorKind::length:
    case ErrorKind::insufficient_data:
    case ErrorKind::empty_session:
        return 422;
    case ErrorKind::io:
        return 500;
    default:
        return 400;
    }
}

Response json_response(int status, const OrderedJson& doc)
{
    return {status, doc.dump(2) + "\n"};
}

Response error_response(int status, const std::string& kind, const std::string& stage,
                        const std::string& message, const std::vector<std::string>& fields = {})
{
    OrderedJson err = {{"kind", kind},
                       {"stage", stage.empty() ? OrderedJson(nullptr) : OrderedJson(stage)},
                       {"message", message},
                       {"fields", fields}};
    return json_response(status, {{"error", std::move(err)}});
}

Response error_response(const Error& e)
{
    return error_response(status_for(e.kind()), std::string(to_string(e.kind())), e.stage(), e.message());
}

Response validation_response(const std::vector<FieldError>& errors)
{
    std::vector<std::string> fields;
    std::string message;
    for (const auto& e : errors) {
        fields.insert(fields.end(), e.fields.begin(), e.fields.end());
        message += (message.empty() ? "" : "; ") + e.message;
    }
    return error_response(400, "validation", "request", message, fields);
}

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::optional<double> parse_double(const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<int> parse_int(const std::string& text)
{
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        return std::nullopt;
    }
    return v;
}

std::optional<bool> parse_bool(const std::string& text)
{
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    return std::nullopt;
}

// Field checks shared by the signal and quantify endpoints; `prefix` names
// the request fields in error reports.
void check_filter(const FilterSpec& spec, double sample_rate, const std::string& low,
                  const std::string& high, const std::string& order, std::vector<FieldError>& errors)
{
    if (spec.order < 2 || spec.order % 2 != 0) {
        errors.push_back({{order}, "filter order must be an even integer >= 2"});
    }
    if (!(spec.low_cut_hz > 0.0)) {
        errors.push_back({{low}, "low cutoff must be > 0 Hz"});
    }
    if (!(spec.high_cut_hz > spec.low_cut_hz)) {
        errors.push_back({{low, high}, "high cutoff must exceed the low cutoff"});
    } else if (spec.high_cut_hz >= 0.5 * sample_rate) {
        std::ostringstream msg;
        msg << "high cutoff " << spec.high_cut_hz << " Hz is not below Nyquist " << 0.5 * sample_rate << " Hz";
        errors.push_back({{high}, msg.str()});
    }
}

void check_landmark(int landmark, const std::string& field, std::vector<FieldError>& errors)
{
    if (landmark < 0 || landmark >= kNumLandmarks) {
        errors.push_back({{field}, "landmark " + std::to_string(landmark) + " outside 0..67"});
    }
}

OrderedJson units_json()
{
    return {{"displacement", "model"}, {"time", "s"}, {"frequency", "Hz"}, {"rates", "per minute"}};
}

} // namespace

std::string_view to_string(SessionStatus status)
{
    switch (status) {
    case SessionStatus::uploaded:
        return "uploaded";
    case SessionStatus::fitted:
        return "fitted";
    case SessionStatus::error:
        return "error";
    }
    return "unknown";
}

struct AnalysisService::Session {
    std::string id;
    std::string created_at;
    std::string model;
    std::filesystem::path dir;
    TrajectorySession trajectory;

    mutable std::mutex mutex;
    mutable std::condition_variable settled;
    SessionStatus status = SessionStatus::uploaded;
    std::optional<ErrorInfo> error;
    int fitted_frames = 0;
    // Immutable once status is fitted.
    std::vector<FrontalizedFrame> track;

    OrderedJson describe() const
    {
        std::lock_guard lock(mutex);
        OrderedJson doc = {{"session_id", id},
                           {"status", std::string(to_string(status))},
                           {"created_at", created_at},
                           {"model", model},
                           {"source_id", trajectory.source_id},
                           {"frame_count", trajectory.frames.size()},
                           {"sample_rate_hint_hz", trajectory.sample_rate_hint
                                                       ? OrderedJson(*trajectory.sample_rate_hint)
                                                       : OrderedJson(nullptr)}};
        if (status == SessionStatus::fitted) {
            doc["fitted_frames"] = fitted_frames;
            doc["failed_frames"] = static_cast<int>(trajectory.frames.size()) - fitted_frames;
        } else {
            doc["fitted_frames"] = nullptr;
            doc["failed_frames"] = nullptr;
        }
        doc["error"] = error ? OrderedJson{{"kind", error->kind}, {"stage", error->stage}, {"message", error->message}}
                             : OrderedJson(nullptr);
        return doc;
    }

    void persist() const { write_text_file(dir / kSessionFile, describe().dump(2) + "\n"); }

    SignalOptions signal_options() const
    {
        SignalOptions options;
        options.sample_rate = trajectory.sample_rate_hint;
        return options;
    }
};

AnalysisService::AnalysisService(std::filesystem::path workdir, std::map<std::string, ShapeModel> models,
                                 FitConfig fit)
    : workdir_(std::move(workdir)), models_(std::move(models)), fit_(fit)
{
    if (models_.empty()) {
        throw Error(ErrorKind::parameter, "the service needs at least one shape model");
    }
    std::filesystem::create_directories(workdir_);
    reload();
}

AnalysisService::~AnalysisService()
{
    std::vector<std::jthread> workers;
    {
        std::lock_guard lock(mutex_);
        workers.swap(workers_);
    }
    workers.clear();
}

void AnalysisService::reload()
{
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(workdir_)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / kTrajectoryFile)) {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        auto s = std::make_shared<Session>();
        s->id = dir.filename().string();
        s->dir = dir;
        try {
            s->trajectory = parse_trajectory(dir / kTrajectoryFile);
            Json info = Json::object();
            if (std::filesystem::exists(dir / kSessionFile)) {
                info = parse_json_text(read_text_file(dir / kSessionFile), "session file");
            }
            s->created_at = info.value("created_at", utc_now());
            s->model = info.value("model", models_.begin()->first);
            if (!models_.contains(s->model)) {
                continue;
            }
            if (std::filesystem::exists(dir / kLandmarksFile)) {
                s->track = parse_landmarks3d(dir / kLandmarksFile);
                s->fitted_frames = static_cast<int>(s->track.size());
                s->status = SessionStatus::fitted;
            } else if (info.value("status", "") == "error" && info["error"].is_object()) {
                s->status = SessionStatus::error;
                s->error = ErrorInfo{info["error"].value("kind", ""), info["error"].value("stage", ""),
                                     info["error"].value("message", "")};
            }
        } catch (const Error&) {
            continue;
        }
        const auto n = s->id.rfind('-');
        if (n != std::string::npos) {
            if (const auto v = parse_int(s->id.substr(n + 1))) {
                next_id_ = std::max(next_id_, *v + 1);
            }
        }
        sessions_[s->id] = s;
        if (s->status == SessionStatus::uploaded) {
            workers_.emplace_back([this, s] { fit_session(s); });
        }
    }
}

std::shared_ptr<AnalysisService::Session> AnalysisService::find(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw Error(ErrorKind::not_found, "unknown session '" + id + "'", "request");
    }
    return it->second;
}

void AnalysisService::fit_session(std::shared_ptr<Session> session)
{
    const ShapeModel& model = models_.at(session->model);
    std::optional<ErrorInfo> failure;
    std::vector<FrontalizedFrame> track;
    int fitted = 0;
    try {
        const auto outcomes = fit_frames(model, session->trajectory.frames, fit_, 1);
        fitted = static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                                [](const FrameOutcome& o) { return o.fitted(); }));
        if (fitted == 0) {
            throw Error(ErrorKind::empty_session, "no frame could be fitted", "fit");
        }
        track = frontalized_track(outcomes);
        std::erase_if(track, [](const FrontalizedFrame& f) { return !f.landmarks; });
        write_landmarks3d(track, session->dir / kLandmarksFile, landmark_metadata(session->trajectory));
    } catch (const Error& e) {
        const Error labelled = e.with_stage("fit");
        failure = ErrorInfo{std::string(to_string(labelled.kind())), labelled.stage(), labelled.message()};
    } catch (const std::exception& e) {
        failure = ErrorInfo{"io", "fit", e.what()};
    }
    {
        std::lock_guard lock(session->mutex);
        if (failure) {
            session->status = SessionStatus::error;
            session->error = failure;
        } else {
            session->status = SessionStatus::fitted;
            session->track = std::move(track);
            session->fitted_frames = fitted;
        }
    }
    try {
        session->persist();
    } catch (const std::exception&) {
        // The in-memory state stays authoritative.
    }
    session->settled.notify_all();
}

Response AnalysisService::create_session(const std::string& body, const std::string& content_type,
                                         const QueryParams& query)
{
    std::string csv;
    std::string model_name = models_.begin()->first;
    if (const auto it = query.find("model"); it != query.end()) {
        model_name = it->second;
    }
    try {
        if (content_type.find("json") != std::string::npos) {
            const Json doc = parse_json_text(body, "request body");
            if (!doc.is_object()) {
                return validation_response({{{"body"}, "request body must be a JSON object"}});
            }
            std::vector<FieldError> errors;
            for (const auto& [key, value] : doc.items()) {
                if (key != "trajectory" && key != "model") {
                    errors.push_back({{key}, "unknown field '" + key + "'"});
                }
            }
            if (!doc.contains("trajectory") || !doc["trajectory"].is_string()) {
                errors.push_back({{"trajectory"}, "trajectory must be the trajectory CSV text"});
            }
            if (doc.contains("model")) {
                if (!doc["model"].is_string()) {
                    errors.push_back({{"model"}, "model must name a shape model"});
                } else {
                    model_name = doc["model"].get<std::string>();
                }
            }
            if (!errors.empty()) {
                return validation_response(errors);
            }
            csv = doc["trajectory"].get<std::string>();
        } else {
            csv = body;
        }
    } catch (const Error& e) {
        return error_response(e.with_stage("parse"));
    }
    if (!models_.contains(model_name)) {
        return validation_response({{{"model"}, "unknown model '" + model_name + "'"}});
    }

    auto s = std::make_shared<Session>();
    try {
        s->trajectory = parse_trajectory_text(csv);
    } catch (const Error& e) {
        return error_response(e.with_stage("parse"));
    }
    s->model = model_name;
    s->created_at = utc_now();
    {
        std::lock_guard lock(mutex_);
        std::ostringstream id;
        id << "session-" << std::setw(4) << std::setfill('0') << next_id_++;
        s->id = id.str();
        s->dir = workdir_ / s->id;
        sessions_[s->id] = s;
    }
    try {
        write_trajectory(s->trajectory, s->dir / kTrajectoryFile);
        s->persist();
    } catch (const Error& e) {
        std::lock_guard lock(mutex_);
        sessions_.erase(s->id);
        return error_response(e);
    }
    const OrderedJson doc = s->describe();
    {
        std::lock_guard lock(mutex_);
        workers_.emplace_back([this, s] { fit_session(s); });
    }
    return json_response(202, doc);
}

Response AnalysisService::get_session(const std::string& id) const
{
    try {
        return json_response(200, find(id)->describe());
    } catch (const Error& e) {
        return error_response(e);
    }
}

Response AnalysisService::list_sessions() const
{
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(mutex_);
        for (const auto& [id, s] : sessions_) {
            all.push_back(s);
        }
    }
    OrderedJson list = OrderedJson::array();
    for (const auto& s : all) {
        list.push_back(s->describe());
    }
    return json_response(200, {{"sessions", std::move(list)}});
}

bool AnalysisService::wait_until_settled(const std::string& id, std::chrono::milliseconds timeout) const
{
    std::shared_ptr<Session> s;
    try {
        s = find(id);
    } catch (const Error&) {
        return false;
    }
    std::unique_lock lock(s->mutex);
    return s->settled.wait_for(lock, timeout, [&] { return s->status != SessionStatus::uploaded; });
}

namespace {

// Returns the fitted track, or a response explaining why there is none.
template <typename SessionPtr>
std::optional<Response> require_fitted(const SessionPtr& s)
{
    std::lock_guard lock(s->mutex);
    if (s->status == SessionStatus::uploaded) {
        return json_response(409, {{"session_id", s->id},
                                   {"status", "uploaded"},
                                   {"error", {{"kind", "not_ready"},
                                              {"stage", "fit"},
                                              {"message", "session is still being fitted"},
                                              {"fields", OrderedJson::array()}}}});
    }
    if (s->status == SessionStatus::error) {
        return error_response(409, s->error->kind, s->error->stage, s->error->message);
    }
    return std::nullopt;
}

} // namespace

Response AnalysisService::get_signal(const std::string& id, const QueryParams& query) const
{
    std::shared_ptr<Session> s;
    try {
        s = find(id);
    } catch (const Error& e) {
        return error_response(e);
    }

    static const std::set<std::string> known{"landmark", "mode", "low", "high", "order", "causal"};
    std::vector<FieldError> errors;
    int landmark = kDefaultLandmark;
    DisplacementMode mode = DisplacementMode::euclidean;
    FilterSpec spec;
    bool filtered = false;
    for (const auto& [key, value] : query) {
        if (!known.contains(key)) {
            errors.push_back({{key}, "unknown parameter '" + key + "'"});
        } else if (query.count(key) > 1) {
            errors.push_back({{key}, "parameter '" + key + "' given more than once"});
        }
    }
    for (const auto& [key, value] : query) {
        if (key == "landmark") {
            if (const auto v = parse_int(value)) {
                landmark = *v;
                check_landmark(landmark, "landmark", errors);
            } else {
                errors.push_back({{"landmark"}, "landmark must be an integer"});
            }
        } else if (key == "mode") {
            try {
                mode = parse_displacement_mode(value);
            } catch (const Error& e) {
                errors.push_back({{"mode"}, e.message()});
            }
        } else if (key == "low" || key == "high") {
            filtered = true;
            if (const auto v = parse_double(value)) {
                (key == "low" ? spec.low_cut_hz : spec.high_cut_hz) = *v;
            } else {
                errors.push_back({{key}, key + " must be a number in Hz"});
            }
        } else if (key == "order") {
            filtered = true;
            if (const auto v = parse_int(value)) {
                spec.order = *v;
            } else {
                errors.push_back({{"order"}, "order must be an integer"});
            }
        } else if (key == "causal") {
            filtered = true;
            if (const auto v = parse_bool(value)) {
                spec.zero_phase = !*v;
            } else {
                errors.push_back({{"causal"}, "causal must be true or false"});
            }
        }
    }
    if (!errors.empty()) {
        return validation_response(errors);
    }
    if (auto r = require_fitted(s)) {
        return *r;
    }
    try {
        const MovementSignal raw = [&] {
            try {
                return displacement_signal(std::span<const FrontalizedFrame>(s->track), landmark, mode,
                                           s->signal_options());
            } catch (const Error& e) {
                throw e.with_stage("signal");
            }
        }();
        if (filtered) {
            check_filter(spec, raw.sample_rate, "low", "high", "order", errors);
            if (!errors.empty()) {
                return validation_response(errors);
            }
        }
        OrderedJson doc = {{"session_id", s->id},
                           {"parameters", {{"landmark", landmark},
                                           {"mode", std::string(to_string(mode))},
                                           {"filter", filtered ? filter_spec_to_json(spec) : OrderedJson(nullptr)}}},
                           {"units", units_json()},
                           {"raw", signal_to_json(raw)}};
        doc["filtered"] = filtered ? signal_to_json(filter_stage(raw, spec)) : OrderedJson(nullptr);
        return json_response(200, doc);
    } catch (const Error& e) {
        return error_response(e);
    }
}

Response AnalysisService::quantify(const std::string& id, const std::string& body) const
{
    std::shared_ptr<Session> s;
    try {
        s = find(id);
    } catch (const Error& e) {
        return error_response(e);
    }
    Json doc = Json::object();
    if (body.find_first_not_of(" \t\r\n") != std::string::npos) {
        try {
            doc = parse_json_text(body, "request body");
        } catch (const Error& e) {
            return error_response(e.with_stage("parse"));
        }
    }
    if (!doc.is_object()) {
        return validation_response({{{"body"}, "request body must be a JSON object"}});
    }

    std::vector<FieldError> errors;
    int landmark = kDefaultLandmark;
    DisplacementMode mode = DisplacementMode::euclidean;
    FilterSpec spec;
    QuantParams params;
    for (const auto& [key, value] : doc.items()) {
        if (key == "landmark_id") {
            if (value.is_number_integer()) {
                landmark = value.get<int>();
                check_landmark(landmark, "landmark_id", errors);
            } else {
                errors.push_back({{"landmark_id"}, "landmark_id must be an integer"});
            }
        } else if (key == "mode") {
            try {
                mode = parse_displacement_mode(value.is_string() ? value.get<std::string>() : value.dump());
            } catch (const Error& e) {
                errors.push_back({{"mode"}, e.message()});
            }
        } else if (key == "filter" || key == "quant") {
            if (!value.is_object()) {
                errors.push_back({{key}, key + " must be an object"});
                continue;
            }
            static const std::set<std::string> filter_keys{"low_cut_hz", "high_cut_hz", "order", "zero_phase"};
            static const std::set<std::string> quant_keys{"min_peak_distance_s", "max_intra_burst_gap_s",
                                                          "min_cycles_per_burst", "threshold_mode"};
            const auto& allowed = key == "filter" ? filter_keys : quant_keys;
            for (const auto& [sub, subvalue] : value.items()) {
                if (!allowed.contains(sub)) {
                    errors.push_back({{key + "." + sub}, "unknown field '" + key + "." + sub + "'"});
                    continue;
                }
                try {
                    if (key == "filter") {
                        spec = filter_spec_from_json(Json{{sub, subvalue}}, spec);
                    } else {
                        params = quant_params_from_json(Json{{sub, subvalue}}, params);
                    }
                } catch (const Error& e) {
                    errors.push_back({{key + "." + sub}, e.message()});
                }
            }
        } else {
            errors.push_back({{key}, "unknown field '" + key + "'"});
        }
    }
    if (!(params.min_peak_distance_s > 0.0)) {
        errors.push_back({{"quant.min_peak_distance_s"}, "min_peak_distance_s must be > 0"});
    }
    if (!(params.max_intra_burst_gap_s > 0.0)) {
        errors.push_back({{"quant.max_intra_burst_gap_s"}, "max_intra_burst_gap_s must be > 0"});
    }
    if (params.min_cycles_per_burst < 1) {
        errors.push_back({{"quant.min_cycles_per_burst"}, "min_cycles_per_burst must be >= 1"});
    }
    if (!errors.empty()) {
        return validation_response(errors);
    }
    if (auto r = require_fitted(s)) {
        return *r;
    }
    try {
        const MovementSignal raw = [&] {
            try {
                return displacement_signal(std::span<const FrontalizedFrame>(s->track), landmark, mode,
                                           s->signal_options());
            } catch (const Error& e) {
                throw e.with_stage("signal");
            }
        }();
        check_filter(spec, raw.sample_rate, "filter.low_cut_hz", "filter.high_cut_hz", "filter.order", errors);
        if (!errors.empty()) {
            return validation_response(errors);
        }
        const NNSReport report = quantify_stage(filter_stage(raw, spec), params);
        return json_response(200, {{"session_id", s->id}, {"report", report_to_json(report)}});
    } catch (const Error& e) {
        return error_response(e);
    }
}

Response AnalysisService::annotation() const
{
    OrderedJson points = OrderedJson::array();
    const auto& layout = schematic_landmarks();
    for (int i = 0; i < kNumLandmarks; ++i) {
        points.push_back({{"id", i},
                          {"x", layout[static_cast<std::size_t>(i)].x},
                          {"y", layout[static_cast<std::size_t>(i)].y},
                          {"region", std::string(landmark_region(i))}});
    }
    return json_response(200, {{"landmark_count", kNumLandmarks},
                               {"default_landmark", kDefaultLandmark},
                               {"units", {{"x", "fraction of face width, left to right"},
                                          {"y", "fraction of face height, top to bottom"}}},
                               {"landmarks", std::move(points)}});
}

struct HttpServer::Impl {
    AnalysisService& service;
    httplib::Server server;
    std::jthread thread;

    explicit Impl(AnalysisService& s) : service(s) { routes(); }

    static QueryParams query_of(const httplib::Request& req)
    {
        return QueryParams(req.params.begin(), req.params.end());
    }

    static void send(httplib::Response& res, const Response& r)
    {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    }

    void routes()
    {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.create_session(req.body, req.get_header_value("Content-Type"), query_of(req)));
        });
        server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
            send(res, service.list_sessions());
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_session(req.matches[1]));
        });
        server.Get(R"(/sessions/([^/]+)/signal)", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_signal(req.matches[1], query_of(req)));
        });
        server.Post(R"(/sessions/([^/]+)/quantify)", [this](const httplib::Request& req, httplib::Response& res) {
            send(res, service.quantify(req.matches[1], req.body));
        });
        server.Get("/annotation", [this](const httplib::Request&, httplib::Response& res) {
            send(res, service.annotation());
        });
    }
};

HttpServer::HttpServer(AnalysisService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::start(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port), "serve");
    }
    impl_->thread = std::jthread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::run(const std::string& host, int port)
{
    if (!impl_->server.listen(host, port)) {
        throw Error(ErrorKind::io, "cannot serve on " + host + ":" + std::to_string(port), "serve");
    }
}

void HttpServer::stop()
{
    if (impl_) {
        impl_->server.stop();
        if (impl_->thread.joinable()) {
            impl_->thread.join();
        }
    }
}

} // namespace nns
