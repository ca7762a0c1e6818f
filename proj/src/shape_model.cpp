#include "nns/shape_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/QR>
#include <json.hpp>

#include "nns/error.hpp"
#include "nns/random.hpp"

namespace nns {

using Json = nlohmann::json;

ShapeModel::ShapeModel(Eigen::VectorXd mean, Eigen::MatrixXd components, Eigen::VectorXd sigmas,
                       LandmarkAnnotation annotation)
    : mean_(std::move(mean)), components_(std::move(components)), sigmas_(std::move(sigmas)),
      annotation_(annotation)
{
    if (mean_.size() % 3 != 0) {
        throw Error(ErrorKind::structural, "mean length " + std::to_string(mean_.size()) +
                                               " is not a multiple of 3");
    }
    const auto n = mean_.size() / 3;
    if (n < kNumLandmarks) {
        throw Error(ErrorKind::structural,
                    "model has " + std::to_string(n) + " vertices, at least 68 required");
    }
    if (components_.rows() != mean_.size()) {
        throw Error(ErrorKind::structural, "components have " + std::to_string(components_.rows()) +
                                               " rows, expected 3N = " + std::to_string(mean_.size()));
    }
    if (components_.cols() != sigmas_.size()) {
        throw Error(ErrorKind::structural, "components have " + std::to_string(components_.cols()) +
                                               " columns but sigmas has " +
                                               std::to_string(sigmas_.size()) + " entries");
    }
    if (sigmas_.size() == 0) {
        throw Error(ErrorKind::structural, "model has no principal components");
    }
    for (Eigen::Index k = 0; k < sigmas_.size(); ++k) {
        if (!(sigmas_[k] > 0.0) || !std::isfinite(sigmas_[k])) {
            throw Error(ErrorKind::structural,
                        "sigmas[" + std::to_string(k) + "] must be finite and > 0");
        }
    }
    if (!mean_.allFinite() || !components_.allFinite()) {
        throw Error(ErrorKind::structural, "mean and components must be finite");
    }
    std::set<int> seen;
    for (int j = 0; j < kNumLandmarks; ++j) {
        const int v = annotation_[j];
        if (v < 0 || v >= n) {
            throw Error(ErrorKind::structural, "landmark_annotation[" + std::to_string(j) +
                                                   "] = " + std::to_string(v) + " outside 0.." +
                                                   std::to_string(n - 1));
        }
        if (!seen.insert(v).second) {
            throw Error(ErrorKind::structural,
                        "landmark_annotation repeats vertex " + std::to_string(v));
        }
    }
}

Eigen::Vector3d ShapeModel::mean_vertex(int vertex) const
{
    return mean_.segment<3>(3 * vertex);
}

Eigen::Matrix<double, 3, Eigen::Dynamic> ShapeModel::scaled_basis(int vertex) const
{
    return components_.middleRows<3>(3 * vertex) * sigmas_.asDiagonal();
}

Landmarks3D synthesize_shape(const ShapeModel& model, const ShapeCoefficients& coeffs)
{
    if (coeffs.alpha.size() != model.num_components()) {
        throw Error(ErrorKind::dimension, "expected " + std::to_string(model.num_components()) +
                                              " shape coefficients, got " +
                                              std::to_string(coeffs.alpha.size()));
    }
    const Eigen::VectorXd weights = coeffs.alpha.cwiseProduct(model.sigmas());
    Landmarks3D out;
    for (int j = 0; j < kNumLandmarks; ++j) {
        const int v = model.annotation()[j];
        out.points[j] = model.mean_vertex(v) + model.components().middleRows<3>(3 * v) * weights;
    }
    return out;
}

namespace {

const Json& require(const Json& doc, const char* field)
{
    const auto it = doc.find(field);
    if (it == doc.end()) {
        throw Error(ErrorKind::parse, std::string("missing field '") + field + "'");
    }
    return *it;
}

Eigen::VectorXd number_array(const Json& doc, const char* field)
{
    const Json& node = require(doc, field);
    if (!node.is_array()) {
        throw Error(ErrorKind::parse, std::string("field '") + field + "' must be an array");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number()) {
            throw Error(ErrorKind::parse, std::string("field '") + field + "' entry " +
                                              std::to_string(i) + " is not a number");
        }
        out[static_cast<Eigen::Index>(i)] = node[i].get<double>();
    }
    return out;
}

int count_field(const Json& doc, const char* field)
{
    const Json& node = require(doc, field);
    if (!node.is_number_integer() || node.get<long long>() < 0) {
        throw Error(ErrorKind::parse,
                    std::string("field '") + field + "' must be a non-negative integer");
    }
    return node.get<int>();
}

} // namespace

ShapeModel parse_shape_model(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("shape model is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::parse, "shape model document must be an object");
    }
    const int n = count_field(doc, "num_vertices");
    const int k = count_field(doc, "num_components");
    Eigen::VectorXd mean = number_array(doc, "mean");
    Eigen::VectorXd sigmas = number_array(doc, "sigmas");
    Eigen::VectorXd flat = number_array(doc, "components");
    const Eigen::VectorXd annotation_values = number_array(doc, "landmark_annotation");

    if (mean.size() != 3 * static_cast<Eigen::Index>(n)) {
        throw Error(ErrorKind::structural, "mean has " + std::to_string(mean.size()) +
                                               " numbers, expected 3*num_vertices = " +
                                               std::to_string(3 * n));
    }
    if (sigmas.size() != k) {
        throw Error(ErrorKind::structural, "sigmas has " + std::to_string(sigmas.size()) +
                                               " numbers, expected num_components = " +
                                               std::to_string(k));
    }
    if (flat.size() != 3 * static_cast<Eigen::Index>(n) * k) {
        throw Error(ErrorKind::structural, "components has " + std::to_string(flat.size()) +
                                               " numbers, expected 3N*K = " +
                                               std::to_string(3LL * n * k));
    }
    if (annotation_values.size() != kNumLandmarks) {
        throw Error(ErrorKind::structural, "landmark_annotation has " +
                                               std::to_string(annotation_values.size()) +
                                               " entries, expected 68");
    }
    LandmarkAnnotation annotation{};
    for (int j = 0; j < kNumLandmarks; ++j) {
        const double v = annotation_values[j];
        if (v != std::floor(v)) {
            throw Error(ErrorKind::parse,
                        "landmark_annotation entry " + std::to_string(j) + " is not an integer");
        }
        annotation[j] = static_cast<int>(v);
    }
    Eigen::MatrixXd components =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), 3 * n, k);
    return ShapeModel(std::move(mean), std::move(components), std::move(sigmas), annotation);
}

ShapeModel load_shape_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open shape model '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_shape_model(buffer.str());
}

std::string serialize_shape_model(const ShapeModel& model)
{
    nlohmann::ordered_json doc;
    doc["format"] = "nns-shape-model";
    doc["version"] = 1;
    doc["units"] = "model";
    doc["num_vertices"] = model.num_vertices();
    doc["num_components"] = model.num_components();
    doc["mean"] = std::vector<double>(model.mean().data(), model.mean().data() + model.mean().size());
    doc["sigmas"] =
        std::vector<double>(model.sigmas().data(), model.sigmas().data() + model.sigmas().size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(model.components().size()));
    for (Eigen::Index r = 0; r < model.components().rows(); ++r) {
        for (Eigen::Index c = 0; c < model.components().cols(); ++c) {
            flat.push_back(model.components()(r, c));
        }
    }
    doc["components"] = std::move(flat);
    doc["landmark_annotation"] = model.annotation();
    return doc.dump(1) + "\n";
}

void save_shape_model(const ShapeModel& model, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::io, "cannot write shape model '" + path.string() + "'");
    }
    out << serialize_shape_model(model);
}

ShapeModel make_fixture_model(const FixtureModelOptions& options)
{
    const int n = options.num_vertices;
    const int k = options.num_components;
    if (n < kNumLandmarks || k < 1) {
        throw Error(ErrorKind::parameter, "fixture model needs >= 68 vertices and >= 1 component");
    }
    Rng rng(options.seed);
    const double w = options.face_width;

    // Schematic (sx, sy) in [0,1]^2 onto a shallow ellipsoid.
    const auto place = [w](double sx, double sy) {
        const double x = (sx - 0.5) * w;
        const double y = (sy - 0.55) * 1.2 * w;
        const double r2 = std::pow(x / (0.62 * w), 2) + std::pow(y / (0.8 * w), 2);
        const double z = 0.3 * w * std::sqrt(std::max(0.0, 1.0 - r2));
        return Eigen::Vector3d(x, y, z);
    };

    // Landmarks land on shuffled vertex slots so the annotation is exercised.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    }
    LandmarkAnnotation annotation{};
    std::copy_n(order.begin(), kNumLandmarks, annotation.begin());

    Eigen::VectorXd mean(3 * n);
    std::vector<double> schematic_y(static_cast<std::size_t>(n));
    const auto& schematic = schematic_landmarks();
    for (int j = 0; j < kNumLandmarks; ++j) {
        Eigen::Vector3d p = place(schematic[j].x, schematic[j].y);
        if (j >= 27 && j <= 35) {
            p.z() += 0.08 * w * (j == 30 || j == 33 ? 1.0 : 0.6); // nose
        }
        mean.segment<3>(3 * annotation[j]) = p;
        schematic_y[static_cast<std::size_t>(annotation[j])] = schematic[j].y;
    }
    for (int i = kNumLandmarks; i < n; ++i) {
        const double sx = rng.uniform(0.1, 0.9);
        const double sy = rng.uniform(0.25, 0.95);
        mean.segment<3>(3 * order[static_cast<std::size_t>(i)]) = place(sx, sy);
        schematic_y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = sy;
    }

    Eigen::MatrixXd basis(3 * n, k);
    for (int v = 0; v < n; ++v) {
        const double lower = std::clamp((schematic_y[static_cast<std::size_t>(v)] - 0.55) / 0.4, 0.0, 1.0);
        basis(3 * v, 0) = 0.0;
        basis(3 * v + 1, 0) = lower * lower;
        basis(3 * v + 2, 0) = 0.0;
    }
    for (int c = 1; c < k; ++c) {
        for (int r = 0; r < 3 * n; ++r) {
            basis(r, c) = rng.normal();
        }
    }

    // Remove, per coordinate, the part of each mode that is an affine
    // function of the mean landmark positions.
    Eigen::MatrixXd affine(kNumLandmarks, 4);
    for (int j = 0; j < kNumLandmarks; ++j) {
        affine.row(j) << mean.segment<3>(3 * annotation[j]).transpose(), 1.0;
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(affine).householderQ() *
                              Eigen::MatrixXd::Identity(kNumLandmarks, 4);
    for (int c = 0; c < k; ++c) {
        for (int axis = 0; axis < 3; ++axis) {
            Eigen::VectorXd channel(kNumLandmarks);
            for (int j = 0; j < kNumLandmarks; ++j) {
                channel[j] = basis(3 * annotation[j] + axis, c);
            }
            channel -= q * (q.transpose() * channel);
            for (int j = 0; j < kNumLandmarks; ++j) {
                basis(3 * annotation[j] + axis, c) = channel[j];
            }
        }
    }
    // Modified Gram-Schmidt keeps column 0 as the jaw mode.
    for (int c = 0; c < k; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            basis.col(c) -= basis.col(prev).dot(basis.col(c)) * basis.col(prev);
        }
        basis.col(c).normalize();
    }

    Eigen::VectorXd sigmas(k);
    for (int c = 0; c < k; ++c) {
        sigmas[c] = options.leading_sigma * std::pow(options.sigma_decay, c);
    }
    return ShapeModel(std::move(mean), std::move(basis), std::move(sigmas), annotation);
}

} // namespace nns
