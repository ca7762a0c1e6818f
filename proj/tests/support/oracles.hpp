#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nns/quant.hpp"
#include "nns/shape_model.hpp"

namespace oracle {

// Straight from the definitions, written for clarity rather than speed.

/// S = mean + sum alpha_k sigma_k v_k, evaluated entry by entry.
std::array<Eigen::Vector3d, nns::kNumLandmarks> shape(const nns::ShapeModel& model,
                                                      const Eigen::VectorXd& alpha);

/// Top two rows of the 3x4 matrix times (x, y, z, 1), written out.
Eigen::Vector2d project(const Eigen::Matrix<double, 3, 4>& camera, const Eigen::Vector3d& point);

/// Closed-form Butterworth bandpass magnitude at f for the per-pass `order`,
/// with prewarped band edges.
double butterworth_gain(double f, double low, double high, int order, double fs);

/// Peak indices of one gap-free segment (indices relative to the segment).
std::vector<std::size_t> peaks(const std::vector<double>& x, const nns::QuantParams& params,
                               double sample_rate);

struct Run {
    std::size_t first = 0; ///< index into the cycle list
    std::size_t count = 0;
    bool burst = false;
};

/// Maximal runs in which every pair of neighbouring cycles shares a segment
/// and lies within the gap.
std::vector<Run> runs(const std::vector<nns::CycleEvent>& cycles, const nns::QuantParams& params);

} // namespace oracle
