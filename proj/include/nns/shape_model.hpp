#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "nns/annotation.hpp"

namespace nns {

/// Landmark id (0..67) to model vertex index.
using LandmarkAnnotation = std::array<int, kNumLandmarks>;

/// PCA face shape model: S = mean + sum_k alpha_k * sigma_k * v_k.
///
/// Vertex i occupies entries 3i, 3i+1, 3i+2 of the mean and of every
/// component column. Immutable once constructed; the constructor enforces
/// every structural invariant and throws Error(structural) otherwise.
class ShapeModel {
public:
    ShapeModel(Eigen::VectorXd mean, Eigen::MatrixXd components, Eigen::VectorXd sigmas,
               LandmarkAnnotation annotation);

    int num_vertices() const noexcept { return static_cast<int>(mean_.size() / 3); }
    int num_components() const noexcept { return static_cast<int>(sigmas_.size()); }

    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& components() const noexcept { return components_; }
    const Eigen::VectorXd& sigmas() const noexcept { return sigmas_; }
    const LandmarkAnnotation& annotation() const noexcept { return annotation_; }

    Eigen::Vector3d mean_vertex(int vertex) const;
    /// Rows 3v..3v+2 of the components, each column scaled by its sigma.
    Eigen::Matrix<double, 3, Eigen::Dynamic> scaled_basis(int vertex) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd components_;
    Eigen::VectorXd sigmas_;
    LandmarkAnnotation annotation_;
};

struct ShapeCoefficients {
    Eigen::VectorXd alpha;

    static ShapeCoefficients zeros(int count) { return {Eigen::VectorXd::Zero(count)}; }
};

struct Landmarks3D {
    std::array<Eigen::Vector3d, kNumLandmarks> points;
    std::optional<int> frame_index;
};

/// Annotated vertices of the instance described by `coeffs`, in landmark order.
Landmarks3D synthesize_shape(const ShapeModel& model, const ShapeCoefficients& coeffs);

ShapeModel parse_shape_model(const std::string& text);
ShapeModel load_shape_model(const std::filesystem::path& path);
std::string serialize_shape_model(const ShapeModel& model);
void save_shape_model(const ShapeModel& model, const std::filesystem::path& path);

struct FixtureModelOptions {
    std::uint64_t seed = 7;
    int num_vertices = 100;
    int num_components = 5;
    /// Face width in model units.
    double face_width = 140.0;
    /// sigma_k = leading_sigma * sigma_decay^k
    double leading_sigma = 30.0;
    double sigma_decay = 0.8;
};

/// Deterministic synthetic PCA model for tests and demos.
///
/// Landmarks sit on the schematic 68-point layout (x right, y down, z toward
/// the viewer) curved onto a shallow ellipsoid; the remaining vertices are
/// scattered over the same surface. Component 0 is a jaw-opening mode (mostly
/// +y motion of the lower face); the others are random. On the annotated
/// vertices every component is orthogonal, coordinate by coordinate, to the
/// affine functions of the mean landmark positions, so no shape mode can be
/// mimicked by a change of affine camera.
ShapeModel make_fixture_model(const FixtureModelOptions& options = {});

} // namespace nns
