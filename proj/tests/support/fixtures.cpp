#include "fixtures.hpp"

#include <numbers>
#include <numeric>

#include <Eigen/Geometry>
#include <Eigen/QR>

namespace fixture {

nns::ShapeModel random_model(nns::Rng& rng, int num_vertices, int num_components)
{
    Eigen::VectorXd mean(3 * num_vertices);
    for (auto& v : mean) v = rng.normal(0.0, 50.0);
    Eigen::MatrixXd raw(3 * num_vertices, num_components);
    for (auto& v : raw.reshaped()) v = rng.normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
                              Eigen::MatrixXd::Identity(3 * num_vertices, num_components);
    Eigen::VectorXd sigmas(num_components);
    for (auto& s : sigmas) s = rng.uniform(0.5, 20.0);
    std::vector<int> slots(static_cast<std::size_t>(num_vertices));
    std::iota(slots.begin(), slots.end(), 0);
    for (std::size_t i = slots.size(); i > 1; --i) {
        std::swap(slots[i - 1], slots[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    }
    nns::LandmarkAnnotation annotation{};
    for (int j = 0; j < nns::kNumLandmarks; ++j) {
        annotation[static_cast<std::size_t>(j)] = slots[static_cast<std::size_t>(j)];
    }
    return nns::ShapeModel(mean, q, sigmas, annotation);
}

Eigen::VectorXd random_alpha(nns::Rng& rng, int count, double sd)
{
    Eigen::VectorXd a(count);
    for (auto& v : a) v = rng.normal(0.0, sd);
    return a;
}

nns::AffineCamera pose_camera(double yaw, double pitch, double roll, double scale, double tx, double ty)
{
    constexpr double deg = std::numbers::pi / 180.0;
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(roll * deg, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(pitch * deg, Eigen::Vector3d::UnitX()) *
                               Eigen::AngleAxisd(yaw * deg, Eigen::Vector3d::UnitY()))
                                  .toRotationMatrix();
    Eigen::Matrix<double, 2, 4> top;
    top.leftCols<3>() = scale * r.topRows<2>();
    top.col(3) << tx, ty;
    return nns::AffineCamera(top);
}

nns::AffineCamera random_camera(nns::Rng& rng)
{
    return pose_camera(rng.uniform(-40, 40), rng.uniform(-25, 25), rng.uniform(-20, 20), rng.uniform(2, 5),
                       rng.uniform(200, 400), rng.uniform(150, 300));
}

nns::LandmarkFrame render(const nns::ShapeModel& model, const Eigen::VectorXd& alpha,
                          const nns::AffineCamera& camera, int frame_index, double timestamp)
{
    const auto shape = nns::synthesize_shape(model, {alpha});
    nns::LandmarkFrame f;
    f.frame_index = frame_index;
    f.timestamp = timestamp;
    for (std::size_t j = 0; j < nns::kNumLandmarks; ++j) {
        f.points[j] = camera.project(shape.points[j]);
        f.valid[j] = true;
    }
    return f;
}

std::filesystem::path temp_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("nns_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixture
