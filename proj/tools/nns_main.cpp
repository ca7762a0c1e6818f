// nns: command-line front end for the NNS quantification pipeline.

#include <charconv>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nns/error.hpp"
#include "nns/pipeline.hpp"
#include "nns/report_io.hpp"
#include "nns/service.hpp"
#include "nns/synth.hpp"
#include "nns/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace nns;

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

struct FitFlags {
    int iterations = 3;
    double ridge = 1.0;
    bool use_confidence = false;
    int jobs = 1;

    void add(CLI::App* app)
    {
        app->add_option("--iterations", iterations, "Camera/shape alternation rounds")->capture_default_str();
        app->add_option("--ridge", ridge, "Shape coefficient regularization")->capture_default_str();
        app->add_flag("--use-confidence", use_confidence, "Weight landmarks by tracker confidence");
        app->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    }
    FitConfig config() const { return {iterations, ridge, use_confidence}; }
};

struct SignalFlags {
    int landmark = kDefaultLandmark;
    std::string mode = "euclidean";
    std::optional<double> sample_rate;
    double max_gap = 0.5;

    void add(CLI::App* app)
    {
        app->add_option("--landmark", landmark, "Landmark id (0..67)")->capture_default_str();
        app->add_option("--mode", mode, "euclidean, horizontal or vertical")->capture_default_str();
        app->add_option("--sample-rate", sample_rate, "Override the estimated frame rate (Hz)");
        app->add_option("--max-gap", max_gap, "Longest interpolated gap (s)")->capture_default_str();
    }
    SignalOptions options() const
    {
        SignalOptions o;
        o.sample_rate = sample_rate;
        o.max_interpolation_gap_s = max_gap;
        return o;
    }
};

struct FilterFlags {
    FilterSpec spec;
    bool causal = false;

    void add(CLI::App* app)
    {
        app->add_option("--low", spec.low_cut_hz, "Low cutoff (Hz)")->capture_default_str();
        app->add_option("--high", spec.high_cut_hz, "High cutoff (Hz)")->capture_default_str();
        app->add_option("--order", spec.order, "Bandpass order per pass (even)")->capture_default_str();
        app->add_flag("--causal", causal, "Single forward pass instead of zero-phase");
    }
    FilterSpec get() const
    {
        FilterSpec s = spec;
        s.zero_phase = !causal;
        return s;
    }
};

struct QuantFlags {
    QuantParams params;
    std::string threshold = "mean_abs";

    void add(CLI::App* app)
    {
        app->add_option("--min-peak-distance", params.min_peak_distance_s, "Minimum cycle spacing (s)")
            ->capture_default_str();
        app->add_option("--max-gap-in-burst", params.max_intra_burst_gap_s, "Largest gap inside a burst (s)")
            ->capture_default_str();
        app->add_option("--min-cycles", params.min_cycles_per_burst, "Fewest cycles that make a burst")
            ->capture_default_str();
        app->add_option("--threshold-mode", threshold, "mean_abs or mean_raw")->capture_default_str();
    }
    QuantParams get() const
    {
        QuantParams p = params;
        p.threshold_mode = in_stage("quantify", [&] { return parse_threshold_mode(threshold); });
        return p;
    }
};

PipelineConfig pipeline_config(const FitFlags& fit, const SignalFlags& sig, const FilterFlags& filter,
                               const QuantFlags& quant)
{
    PipelineConfig c;
    c.fit = fit.config();
    c.jobs = fit.jobs;
    c.landmark_id = sig.landmark;
    c.mode = in_stage("signal", [&] { return parse_displacement_mode(sig.mode); });
    c.signal = sig.options();
    c.filter = filter.get();
    c.quant = quant.get();
    return c;
}

void print_json(const OrderedJson& doc)
{
    std::cout << doc.dump(2) << "\n";
}

OrderedJson report_summary(const NNSReport& r)
{
    return report_to_json(r)["summary"];
}

std::atomic<HttpServer*> g_server{nullptr};

void on_signal(int)
{
    if (HttpServer* s = g_server.load()) {
        s->stop();
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Non-nutritive sucking quantification from facial landmark trajectories"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Fit the shape model to every frame and write frontalized landmarks");
    fs::path fit_traj, fit_model, fit_out;
    FitFlags fit_flags;
    fit->add_option("--trajectory,-t", fit_traj, "2D landmark trajectory CSV")->required();
    fit->add_option("--model,-m", fit_model, "Shape model JSON")->required();
    fit->add_option("--out,-o", fit_out, "Frontalized landmark CSV")->required();
    fit_flags.add(fit);

    // signal
    auto* sig = app.add_subcommand("signal", "Extract the raw and filtered displacement signal of one landmark");
    fs::path sig_landmarks, sig_traj, sig_model, sig_raw, sig_filtered;
    SignalFlags sig_flags;
    FilterFlags sig_filter;
    FitFlags sig_fit;
    auto* sig_src = sig->add_option("--landmarks,-l", sig_landmarks, "Frontalized landmark CSV from `fit`");
    sig->add_option("--trajectory,-t", sig_traj, "Trajectory CSV (fitted on the fly)")->excludes(sig_src);
    sig->add_option("--model,-m", sig_model, "Shape model JSON, with --trajectory");
    sig->add_option("--out-raw", sig_raw, "Raw signal JSON");
    sig->add_option("--out-filtered", sig_filtered, "Filtered signal JSON");
    sig_flags.add(sig);
    sig_filter.add(sig);
    sig_fit.add(sig);

    // quantify
    auto* quant = app.add_subcommand("quantify", "Detect cycles and bursts in a filtered signal");
    fs::path q_signal, q_out;
    QuantFlags q_flags;
    quant->add_option("--signal,-s", q_signal, "Filtered signal JSON")->required();
    quant->add_option("--out,-o", q_out, "Report JSON (summary printed when omitted)");
    q_flags.add(quant);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic session with ground truth");
    fs::path syn_scenario, syn_model, syn_out;
    std::optional<std::uint64_t> syn_seed;
    synth->add_option("--scenario", syn_scenario, "Scenario JSON (defaults when omitted)");
    synth->add_option("--model,-m", syn_model, "Shape model JSON; also renders a 2D trajectory");
    synth->add_option("--seed", syn_seed, "Override the scenario seed");
    synth->add_option("--out-dir,-o", syn_out, "Output directory")->required();

    // score
    auto* score = app.add_subcommand("score", "Score a report against synthetic ground truth");
    fs::path sc_report, sc_truth, sc_out;
    double sc_window = kMatchWindowS;
    score->add_option("--report,-r", sc_report, "Report JSON")->required();
    score->add_option("--truth", sc_truth, "Truth JSON from `synth`")->required();
    score->add_option("--window", sc_window, "Match window (s)")->capture_default_str();
    score->add_option("--out,-o", sc_out, "Score JSON");

    // run
    auto* run = app.add_subcommand("run", "Trajectory to report in one step");
    std::vector<fs::path> run_traj;
    fs::path run_model, run_out;
    int run_batch_jobs = 1;
    FitFlags run_fit;
    SignalFlags run_sig;
    FilterFlags run_filter;
    QuantFlags run_quant;
    run->add_option("--trajectory,-t", run_traj, "Trajectory CSV; several run as a batch")->required();
    run->add_option("--model,-m", run_model, "Shape model JSON")->required();
    run->add_option("--out-dir,-o", run_out, "Artifact directory (one subdirectory per session in batch mode)")
        ->required();
    run->add_option("--sessions-parallel", run_batch_jobs, "Sessions processed in parallel in batch mode")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run_fit.add(run);
    run_sig.add(run);
    run_filter.add(run);
    run_quant.add(run);

    // serve
    auto* serve = app.add_subcommand("serve", "Start the HTTP analysis service");
    fs::path srv_workdir;
    std::vector<std::string> srv_models;
    std::string srv_host = "127.0.0.1";
    int srv_port = 8080;
    FitFlags srv_fit;
    serve->add_option("--workdir,-w", srv_workdir, "Session directory")->required();
    serve->add_option("--model,-m", srv_models, "name=path of a shape model (repeatable; a bare path is 'default')")
        ->required();
    serve->add_option("--host", srv_host)->capture_default_str();
    serve->add_option("--port,-p", srv_port)->capture_default_str();
    srv_fit.add(serve);

    // make-model
    auto* mk = app.add_subcommand("make-model", "Write the deterministic fixture shape model");
    FixtureModelOptions mk_opts;
    fs::path mk_out;
    mk->add_option("--out,-o", mk_out, "Model JSON")->required();
    mk->add_option("--seed", mk_opts.seed)->capture_default_str();
    mk->add_option("--vertices", mk_opts.num_vertices)->capture_default_str();
    mk->add_option("--components", mk_opts.num_components)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            const auto session = in_stage("parse", [&] { return parse_trajectory(fit_traj); });
            const auto model = in_stage("parse", [&] { return load_shape_model(fit_model); });
            const auto outcomes = in_stage("fit", [&] {
                auto o = fit_frames(model, session.frames, fit_flags.config(), fit_flags.jobs);
                if (std::none_of(o.begin(), o.end(), [](const FrameOutcome& f) { return f.fitted(); })) {
                    throw Error(ErrorKind::empty_session, "no frame could be fitted");
                }
                return o;
            });
            const auto track = frontalized_track(outcomes);
            in_stage("write", [&] { write_landmarks3d(track, fit_out, landmark_metadata(session)); });
            int fitted = 0;
            for (const auto& o : outcomes) {
                if (o.fitted()) {
                    ++fitted;
                } else {
                    std::cerr << "frame " << o.frame_index << " not fitted: " << o.failure << "\n";
                }
            }
            print_json({{"frames", outcomes.size()}, {"fitted_frames", fitted}, {"landmarks", fit_out.string()}});
        } else if (*sig) {
            std::vector<FrontalizedFrame> track;
            std::optional<double> hint;
            if (!sig_landmarks.empty()) {
                std::map<std::string, std::string> meta;
                track = in_stage("parse", [&] { return parse_landmarks3d(sig_landmarks, &meta); });
                if (const auto it = meta.find("sample_rate_hint"); it != meta.end()) {
                    hint = in_stage("parse", [&] {
                        double rate = 0.0;
                        const auto& v = it->second;
                        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), rate);
                        if (ec != std::errc() || end != v.data() + v.size() || !(rate > 0.0)) {
                            throw Error(ErrorKind::range, "sample_rate_hint '" + v + "' is not a positive number");
                        }
                        return rate;
                    });
                }
            } else if (!sig_traj.empty() && !sig_model.empty()) {
                const auto session = in_stage("parse", [&] { return parse_trajectory(sig_traj); });
                const auto model = in_stage("parse", [&] { return load_shape_model(sig_model); });
                hint = session.sample_rate_hint;
                const auto outcomes =
                    in_stage("fit", [&] { return fit_frames(model, session.frames, sig_fit.config(), sig_fit.jobs); });
                track = frontalized_track(outcomes);
            } else {
                throw Error(ErrorKind::parameter, "give --landmarks, or --trajectory with --model", "signal");
            }
            SignalOptions options = sig_flags.options();
            if (!options.sample_rate) {
                options.sample_rate = hint;
            }
            const auto mode = in_stage("signal", [&] { return parse_displacement_mode(sig_flags.mode); });
            const auto raw = in_stage("signal", [&] {
                return displacement_signal(std::span<const FrontalizedFrame>(track), sig_flags.landmark, mode, options);
            });
            const auto filtered = filter_stage(raw, sig_filter.get());
            in_stage("write", [&] {
                if (!sig_raw.empty()) write_signal(raw, sig_raw);
                if (!sig_filtered.empty()) write_signal(filtered, sig_filtered);
            });
            print_json({{"samples", raw.size()},
                        {"sample_rate_hz", raw.sample_rate},
                        {"segments", raw.segments.size()},
                        {"filtered_segments", filtered.segments.size()}});
        } else if (*quant) {
            const auto signal = in_stage("parse", [&] { return parse_signal(q_signal); });
            const auto report = quantify_stage(signal, q_flags.get());
            if (!q_out.empty()) {
                in_stage("write", [&] { write_report(report, q_out); });
            }
            print_json(report_summary(report));
        } else if (*synth) {
            ScenarioDocument doc;
            if (!syn_scenario.empty()) {
                doc = in_stage("parse", [&] { return parse_scenario(syn_scenario); });
            }
            if (syn_seed) {
                doc.scenario.seed = *syn_seed;
            }
            const auto generated = in_stage("synth", [&] { return generate_signal(doc.scenario); });
            std::optional<ShapeModel> model;
            if (!syn_model.empty()) {
                model = in_stage("parse", [&] { return load_shape_model(syn_model); });
            }
            const auto trajectory = in_stage("synth", [&] {
                return model ? std::optional(generate_trajectory(doc.scenario, *model, doc.pose.value_or(PoseScript{})))
                             : std::nullopt;
            });
            in_stage("write", [&] {
                write_signal(generated.signal, syn_out / "signal.json");
                write_truth(generated.truth, syn_out / "truth.json");
                write_text_file(syn_out / "scenario.json", scenario_to_json(doc.scenario, doc.pose).dump(2) + "\n");
                if (trajectory) {
                    write_trajectory(trajectory->session, syn_out / "trajectory.csv");
                }
            });
            print_json({{"cycles", generated.truth.cycle_times.size()},
                        {"bursts", generated.truth.cycles_per_burst.size()},
                        {"session_duration_s", generated.truth.session_duration_s},
                        {"trajectory", trajectory.has_value()}});
        } else if (*score) {
            const auto report = in_stage("parse", [&] { return parse_report(sc_report); });
            const auto truth = in_stage("parse", [&] { return parse_truth(sc_truth); });
            const auto result = in_stage("score", [&] { return score_detection(report, truth, sc_window); });
            const auto doc = score_to_json(result);
            if (!sc_out.empty()) {
                in_stage("write", [&] { write_text_file(sc_out, doc.dump(2) + "\n"); });
            }
            print_json(doc);
        } else if (*run) {
            const PipelineConfig config = pipeline_config(run_fit, run_sig, run_filter, run_quant);
            if (run_traj.size() == 1) {
                const auto report = run_pipeline(run_traj.front(), run_model, config, run_out);
                print_json(report_summary(report));
            } else {
                const auto model = in_stage("parse", [&] { return load_shape_model(run_model); });
                const auto results = run_batch(run_traj, model, config, run_out, run_batch_jobs);
                OrderedJson list = OrderedJson::array();
                bool failed = false;
                for (const auto& r : results) {
                    list.push_back({{"trajectory", r.trajectory.string()},
                                    {"out_dir", r.out_dir.string()},
                                    {"ok", r.report.has_value()},
                                    {"error", r.report ? OrderedJson(nullptr) : OrderedJson(r.error)}});
                    if (!r.report) {
                        std::cerr << r.trajectory.string() << ": " << r.error << "\n";
                        failed = true;
                    }
                }
                print_json({{"sessions", std::move(list)}});
                return failed ? 1 : 0;
            }
        } else if (*serve) {
            std::map<std::string, ShapeModel> models;
            for (const auto& entry : srv_models) {
                const auto eq = entry.find('=');
                const std::string name = eq == std::string::npos ? "default" : entry.substr(0, eq);
                const fs::path path = eq == std::string::npos ? entry : entry.substr(eq + 1);
                models.emplace(name, in_stage("parse", [&] { return load_shape_model(path); }));
            }
            AnalysisService service(srv_workdir, std::move(models), srv_fit.config());
            HttpServer server(service);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving on http://" << srv_host << ":" << srv_port << "\n";
            server.run(srv_host, srv_port);
            g_server = nullptr;
        } else if (*mk) {
            const auto model = in_stage("model", [&] { return make_fixture_model(mk_opts); });
            in_stage("write", [&] { save_shape_model(model, mk_out); });
            print_json({{"vertices", model.num_vertices()}, {"components", model.num_components()}});
        }
    } catch (const Error& e) {
        const Error labelled = e.with_stage(app.get_subcommands().front()->get_name());
        std::cerr << "error: " << labelled.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: [" << app.get_subcommands().front()->get_name() << "] " << e.what() << "\n";
        return 1;
    }
    return 0;
}
