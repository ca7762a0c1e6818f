#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nns/camera_fit.hpp"
#include "nns/shape_model.hpp"

namespace nns {

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

enum class SessionStatus { uploaded, fitted, error };
std::string_view to_string(SessionStatus status);

/// Request handling for the analysis service, independent of the transport.
///
/// Every session lives in workdir/<id>/ as trajectory.csv plus, once fitted,
/// landmarks.csv (the same files the CLI reads and writes) and session.json.
/// Sessions found in workdir at construction are reloaded.
class AnalysisService {
public:
    /// `models` maps selector names to shape models; the first entry (by
    /// name) is used when a request names none.
    AnalysisService(std::filesystem::path workdir, std::map<std::string, ShapeModel> models,
                    FitConfig fit = {});
    ~AnalysisService();

    AnalysisService(const AnalysisService&) = delete;
    AnalysisService& operator=(const AnalysisService&) = delete;

    /// Body is trajectory CSV (model selector in ?model=) or a JSON object
    /// {"trajectory": "<csv text>", "model": "<name>"}. Fitting runs in the background.
    Response create_session(const std::string& body, const std::string& content_type,
                            const QueryParams& query = {});
    Response get_session(const std::string& id) const;
    Response list_sessions() const;
    /// ?landmark=&mode=&low=&high=&order=&causal=; any filter field requests
    /// the filtered series as well.
    Response get_signal(const std::string& id, const QueryParams& query) const;
    /// Body: {"landmark_id", "mode", "filter": {...}, "quant": {...}}, all optional.
    Response quantify(const std::string& id, const std::string& body) const;
    Response annotation() const;

    /// Blocks until the session has left "uploaded" or the timeout passes.
    bool wait_until_settled(const std::string& id, std::chrono::milliseconds timeout) const;

    const std::filesystem::path& workdir() const noexcept { return workdir_; }

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    void fit_session(std::shared_ptr<Session> session);
    void reload();

    std::filesystem::path workdir_;
    std::map<std::string, ShapeModel> models_;
    FitConfig fit_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    int next_id_ = 1;
    std::vector<std::jthread> workers_;
};

/// HTTP front end for AnalysisService.
class HttpServer {
public:
    explicit HttpServer(AnalysisService& service);
    ~HttpServer();

    /// Binds and serves on a background thread; port 0 picks a free port.
    /// Returns the bound port. Throws Error(io) when binding fails.
    int start(const std::string& host, int port);
    /// Serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace nns
