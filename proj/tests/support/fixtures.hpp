#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nns/camera_fit.hpp"
#include "nns/random.hpp"
#include "nns/shape_model.hpp"

namespace fixture {

/// Unstructured model: random mean, components and sigmas, random annotation.
nns::ShapeModel random_model(nns::Rng& rng, int num_vertices, int num_components);

Eigen::VectorXd random_alpha(nns::Rng& rng, int count, double sd = 1.0);

/// Scaled rotation plus translation, scale in [2, 5] px per unit.
nns::AffineCamera random_camera(nns::Rng& rng);

/// Camera from yaw/pitch/roll (degrees), scale and image translation.
nns::AffineCamera pose_camera(double yaw, double pitch, double roll, double scale, double tx, double ty);

/// Projects the shape instance; every landmark valid.
nns::LandmarkFrame render(const nns::ShapeModel& model, const Eigen::VectorXd& alpha,
                          const nns::AffineCamera& camera, int frame_index = 0, double timestamp = 0.0);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

} // namespace fixture
