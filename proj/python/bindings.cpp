#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nns/error.hpp"
#include "nns/pipeline.hpp"
#include "nns/report_io.hpp"
#include "nns/synth.hpp"

namespace py = pybind11;
using namespace nns;

namespace {

using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using Points3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

QuantParams quant_params(double min_peak_distance_s, double max_intra_burst_gap_s, int min_cycles,
                         const std::string& threshold_mode)
{
    QuantParams p;
    p.min_peak_distance_s = min_peak_distance_s;
    p.max_intra_burst_gap_s = max_intra_burst_gap_s;
    p.min_cycles_per_burst = min_cycles;
    p.threshold_mode = parse_threshold_mode(threshold_mode);
    return p;
}

MovementSignal filtered_signal(const std::vector<double>& samples, double sample_rate)
{
    MovementSignal s = make_signal(samples, sample_rate, 0.0, SignalStage::filtered);
    return s;
}

} // namespace

PYBIND11_MODULE(_nns, m)
{
    m.doc() = "NNS quantification core";

    static py::exception<Error> error_type(m, "NNSError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type.ptr())(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            exc.attr("stage") = e.stage();
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.attr("NUM_LANDMARKS") = kNumLandmarks;
    m.attr("DEFAULT_LANDMARK") = kDefaultLandmark;

    py::class_<ShapeModel>(m, "ShapeModel")
        .def_property_readonly("num_vertices", &ShapeModel::num_vertices)
        .def_property_readonly("num_components", &ShapeModel::num_components)
        .def("to_json", [](const ShapeModel& model) { return serialize_shape_model(model); });

    m.def("make_fixture_model",
          [](std::uint64_t seed, int num_vertices, int num_components) {
              FixtureModelOptions o;
              o.seed = seed;
              o.num_vertices = num_vertices;
              o.num_components = num_components;
              return make_fixture_model(o);
          },
          py::arg("seed") = 7, py::arg("num_vertices") = 100, py::arg("num_components") = 5);
    m.def("load_shape_model", &load_shape_model, py::arg("path"));
    m.def("parse_shape_model", &parse_shape_model, py::arg("text"));

    m.def("synthesize_shape",
          [](const ShapeModel& model, const Eigen::VectorXd& alpha) {
              const Landmarks3D l = synthesize_shape(model, ShapeCoefficients{alpha});
              Points3 out(kNumLandmarks, 3);
              for (int i = 0; i < kNumLandmarks; ++i) {
                  out.row(i) = l.points[static_cast<std::size_t>(i)].transpose();
              }
              return out;
          },
          py::arg("model"), py::arg("alpha"), "68x3 annotated landmarks of the shape instance");

    m.def("estimate_affine_camera",
          [](const Points2& points2d, const Points3& points3d) {
              if (points2d.rows() != points3d.rows()) {
                  throw Error(ErrorKind::dimension, "point lists differ in length");
              }
              std::vector<Eigen::Vector2d> p2(static_cast<std::size_t>(points2d.rows()));
              std::vector<Eigen::Vector3d> p3(p2.size());
              for (Eigen::Index i = 0; i < points2d.rows(); ++i) {
                  p2[static_cast<std::size_t>(i)] = points2d.row(i).transpose();
                  p3[static_cast<std::size_t>(i)] = points3d.row(i).transpose();
              }
              return Eigen::Matrix<double, 3, 4>(estimate_affine_camera(p2, p3).matrix());
          },
          py::arg("points2d"), py::arg("points3d"), "3x4 affine camera from n x 2 and n x 3 point arrays");

    py::class_<FilterKernel>(m, "FilterKernel")
        .def("gain", &FilterKernel::gain, py::arg("frequency_hz"))
        .def("apply", [](const FilterKernel& k, const std::vector<double>& x) { return k.apply(x); })
        .def_property_readonly("sample_rate", &FilterKernel::sample_rate);
    m.def("design_bandpass",
          [](double low, double high, int order, double sample_rate, bool zero_phase) {
              return design_bandpass(FilterSpec{low, high, order, zero_phase}, sample_rate);
          },
          py::arg("low_cut_hz") = 0.3, py::arg("high_cut_hz") = 3.0, py::arg("order") = 4,
          py::arg("sample_rate") = 30.0, py::arg("zero_phase") = true);

    m.def("detect_cycles",
          [](const std::vector<double>& samples, double sample_rate, double min_peak_distance_s,
             const std::string& threshold_mode) {
              const auto cycles = detect_cycles(filtered_signal(samples, sample_rate),
                                                quant_params(min_peak_distance_s, 1.5, 6, threshold_mode));
              std::vector<std::tuple<double, double, std::size_t>> out;
              for (const auto& c : cycles) {
                  out.emplace_back(c.time, c.amplitude, c.index);
              }
              return out;
          },
          py::arg("samples"), py::arg("sample_rate"), py::arg("min_peak_distance_s") = 0.2,
          py::arg("threshold_mode") = "mean_abs", "(time_s, amplitude, index) of each cycle");

    m.def("analyze_signal_json",
          [](const std::vector<double>& samples, double sample_rate, double min_peak_distance_s,
             double max_intra_burst_gap_s, int min_cycles_per_burst, const std::string& threshold_mode) {
              const auto params = quant_params(min_peak_distance_s, max_intra_burst_gap_s,
                                               min_cycles_per_burst, threshold_mode);
              return serialize_report(analyze_signal(filtered_signal(samples, sample_rate), params));
          },
          py::arg("samples"), py::arg("sample_rate"), py::arg("min_peak_distance_s") = 0.2,
          py::arg("max_intra_burst_gap_s") = 1.5, py::arg("min_cycles_per_burst") = 6,
          py::arg("threshold_mode") = "mean_abs");

    m.def("generate_signal_json",
          [](const std::string& scenario_json) {
              const ScenarioDocument doc = parse_scenario_text(scenario_json);
              const SyntheticSignal s = generate_signal(doc.scenario);
              return std::make_pair(serialize_signal(s.signal), truth_to_json(s.truth).dump());
          },
          py::arg("scenario_json") = "{}", "(signal JSON, truth JSON)");

    m.def("run_pipeline_json",
          [](const std::filesystem::path& trajectory, const std::filesystem::path& model, int landmark_id,
             const std::string& mode, double low, double high, int order, bool causal,
             std::optional<std::filesystem::path> out_dir) {
              PipelineConfig c;
              c.landmark_id = landmark_id;
              c.mode = parse_displacement_mode(mode);
              c.filter = FilterSpec{low, high, order, !causal};
              py::gil_scoped_release release;
              return serialize_report(run_pipeline(trajectory, model, c, out_dir));
          },
          py::arg("trajectory"), py::arg("model"), py::arg("landmark_id") = kDefaultLandmark,
          py::arg("mode") = "euclidean", py::arg("low_cut_hz") = 0.3, py::arg("high_cut_hz") = 3.0,
          py::arg("order") = 4, py::arg("causal") = false, py::arg("out_dir") = py::none());

    m.def("score_json",
          [](const std::string& report_json, const std::string& truth_json, double window_s) {
              const NNSReport report = parse_report_text(report_json);
              const GroundTruth truth = truth_from_json(parse_json_text(truth_json, "truth"));
              return score_to_json(score_detection(report, truth, window_s)).dump();
          },
          py::arg("report_json"), py::arg("truth_json"), py::arg("window_s") = kMatchWindowS);
}
