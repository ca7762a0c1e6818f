#include "nns/camera_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "nns/error.hpp"

namespace nns {

int LandmarkFrame::valid_count() const
{
    return static_cast<int>(std::count(valid.begin(), valid.end(), true));
}

AffineCamera::AffineCamera()
{
    matrix_.setZero();
    matrix_(0, 0) = 1.0;
    matrix_(1, 1) = 1.0;
    matrix_(2, 3) = 1.0;
}

AffineCamera::AffineCamera(const Eigen::Matrix<double, 2, 4>& top_rows)
{
    if (!top_rows.allFinite()) {
        throw Error(ErrorKind::degenerate, "camera matrix has non-finite entries");
    }
    const Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(top_rows.leftCols<3>());
    const auto& sv = svd.singularValues();
    if (!(sv[1] > 1e-12 * std::max(sv[0], 1e-300))) {
        throw Error(ErrorKind::degenerate, "camera projection is not rank 2");
    }
    matrix_.topRows<2>() = top_rows;
    matrix_.row(2) << 0.0, 0.0, 0.0, 1.0;
}

Eigen::Vector2d AffineCamera::project(const Eigen::Vector3d& point) const
{
    return matrix_.topLeftCorner<2, 3>() * point + matrix_.block<2, 1>(0, 3);
}

AffineCamera estimate_affine_camera(std::span<const Eigen::Vector2d> points2d,
                                    std::span<const Eigen::Vector3d> points3d,
                                    std::span<const double> weights)
{
    if (points2d.size() != points3d.size()) {
        throw Error(ErrorKind::dimension, std::to_string(points2d.size()) + " image points but " +
                                              std::to_string(points3d.size()) + " model points");
    }
    if (!weights.empty() && weights.size() != points2d.size()) {
        throw Error(ErrorKind::dimension, "weights must match the number of correspondences");
    }
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < points2d.size(); ++i) {
        if (weights.empty() || weights[i] > 0.0) {
            used.push_back(i);
        }
    }
    if (used.size() < 4) {
        throw Error(ErrorKind::insufficient_data,
                    "need at least 4 correspondences, got " + std::to_string(used.size()));
    }
    const auto m = static_cast<Eigen::Index>(used.size());
    const auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

    Eigen::Vector2d centroid2 = Eigen::Vector2d::Zero();
    Eigen::Vector3d centroid3 = Eigen::Vector3d::Zero();
    for (const auto i : used) {
        centroid2 += points2d[i];
        centroid3 += points3d[i];
    }
    centroid2 /= static_cast<double>(m);
    centroid3 /= static_cast<double>(m);
    double spread2 = 0.0;
    double spread3 = 0.0;
    for (const auto i : used) {
        spread2 += (points2d[i] - centroid2).norm();
        spread3 += (points3d[i] - centroid3).norm();
    }
    spread2 /= static_cast<double>(m);
    spread3 /= static_cast<double>(m);
    if (!(spread3 > 0.0)) {
        throw Error(ErrorKind::degenerate, "all 3D points coincide");
    }
    // Coincident image points are legal (a camera collapsing everything);
    // only the 3D side needs spread.
    const double scale2 = spread2 > 0.0 ? std::numbers::sqrt2 / spread2 : 1.0;
    const double scale3 = std::sqrt(3.0) / spread3;

    Eigen::MatrixXd design(m, 4);
    Eigen::MatrixXd rhs(m, 2);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto i = used[static_cast<std::size_t>(r)];
        const double w = weight(i);
        design.row(r) << w * scale3 * (points3d[i] - centroid3).transpose(), w;
        rhs.row(r) = w * scale2 * (points2d[i] - centroid2).transpose();
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(design);
    if (cod.rank() < 3) {
        throw Error(ErrorKind::degenerate, "3D points are collinear; the camera is not determined");
    }
    const Eigen::Matrix<double, 4, 2> solution = cod.solve(rhs);
    const Eigen::Matrix<double, 2, 4> normalized = solution.transpose();

    Eigen::Matrix<double, 2, 4> top;
    const Eigen::Matrix<double, 2, 3> linear = normalized.leftCols<3>() * (scale3 / scale2);
    top.leftCols<3>() = linear;
    top.col(3) = centroid2 + normalized.col(3) / scale2 - linear * centroid3;
    return AffineCamera(top);
}

std::array<Eigen::Vector2d, kNumLandmarks> project(const AffineCamera& camera,
                                                  const Landmarks3D& landmarks)
{
    std::array<Eigen::Vector2d, kNumLandmarks> out;
    for (int j = 0; j < kNumLandmarks; ++j) {
        out[j] = camera.project(landmarks.points[j]);
    }
    return out;
}

namespace {

double landmark_weight(const LandmarkFrame& frame, int j, bool use_confidence)
{
    if (!frame.valid[j]) {
        return 0.0;
    }
    if (use_confidence && frame.confidence) {
        return (*frame.confidence)[j];
    }
    return 1.0;
}

double rms_residual(const AffineCamera& camera, const Landmarks3D& shape, const LandmarkFrame& frame,
                    bool use_confidence)
{
    // weights enter squared, as they scale the residual rows of the fit
    double sum = 0.0;
    double total = 0.0;
    for (int j = 0; j < kNumLandmarks; ++j) {
        const double w = landmark_weight(frame, j, use_confidence);
        if (w > 0.0) {
            sum += w * w * (camera.project(shape.points[j]) - frame.points[j]).squaredNorm();
            total += w * w;
        }
    }
    return total > 0.0 ? std::sqrt(sum / total) : 0.0;
}

} // namespace

ShapeCoefficients fit_shape_coefficients(const AffineCamera& camera, const ShapeModel& model,
                                         const LandmarkFrame& frame, double ridge,
                                         bool use_confidence)
{
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorKind::parameter, "ridge must be finite and >= 0");
    }
    const int k = model.num_components();
    std::vector<int> rows;
    for (int j = 0; j < kNumLandmarks; ++j) {
        if (landmark_weight(frame, j, use_confidence) > 0.0) {
            rows.push_back(j);
        }
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index extra = ridge > 0.0 ? k : 0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m + extra, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * m + extra);
    const Eigen::Matrix<double, 2, 3> linear = camera.linear();
    for (Eigen::Index r = 0; r < m; ++r) {
        const int j = rows[static_cast<std::size_t>(r)];
        const int v = model.annotation()[j];
        const double w = landmark_weight(frame, j, use_confidence);
        a.middleRows<2>(2 * r) = w * (linear * model.scaled_basis(v));
        b.segment<2>(2 * r) = w * (frame.points[j] - camera.project(model.mean_vertex(v)));
    }
    if (extra > 0) {
        a.bottomRows(extra) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(k, k);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < k) {
        throw Error(ErrorKind::rank_deficient,
                    "shape normal equations are singular (" + std::to_string(qr.rank()) + " of " +
                        std::to_string(k) + " coefficients determined); use a nonzero ridge");
    }
    return {qr.solve(b)};
}

FrameFit fit_frame(const ShapeModel& model, const LandmarkFrame& frame, const FitConfig& config)
{
    if (config.iterations < 1) {
        throw Error(ErrorKind::parameter, "iterations must be >= 1");
    }
    std::vector<Eigen::Vector2d> image;
    std::vector<int> landmark_ids;
    std::vector<double> weights;
    for (int j = 0; j < kNumLandmarks; ++j) {
        const double w = landmark_weight(frame, j, config.use_confidence);
        if (w > 0.0) {
            image.push_back(frame.points[j]);
            landmark_ids.push_back(j);
            weights.push_back(w);
        }
    }
    if (image.size() < 4) {
        throw Error(ErrorKind::insufficient_data, "frame " + std::to_string(frame.frame_index) +
                                                      " has " + std::to_string(image.size()) +
                                                      " usable landmarks, at least 4 required");
    }

    FrameFit fit;
    fit.frame_index = frame.frame_index;
    fit.timestamp = frame.timestamp;
    fit.coefficients = ShapeCoefficients::zeros(model.num_components());
    Landmarks3D shape = synthesize_shape(model, fit.coefficients);
    std::vector<Eigen::Vector3d> model_points(image.size());
    for (int it = 0; it < config.iterations; ++it) {
        for (std::size_t i = 0; i < image.size(); ++i) {
            model_points[i] = shape.points[landmark_ids[i]];
        }
        const AffineCamera camera = estimate_affine_camera(
            image, model_points,
            config.use_confidence ? std::span<const double>(weights) : std::span<const double>());
        ShapeCoefficients coefficients =
            fit_shape_coefficients(camera, model, frame, config.ridge, config.use_confidence);
        Landmarks3D candidate = synthesize_shape(model, coefficients);
        const double residual = rms_residual(camera, candidate, frame, config.use_confidence);
        // The ridge (or confidence weights) can trade a little reprojection
        // error for a smaller alpha; such a round is dropped and the fit
        // stays where it was, which makes every later round identical.
        if (!fit.residual_history.empty() && residual > fit.residual_history.back()) {
            fit.residual_history.resize(static_cast<std::size_t>(config.iterations), fit.residual_history.back());
            break;
        }
        fit.camera = camera;
        fit.coefficients = std::move(coefficients);
        shape = std::move(candidate);
        fit.residual_history.push_back(residual);
    }
    fit.residual = fit.residual_history.back();
    fit.frontalized = shape;
    fit.frontalized.frame_index = frame.frame_index;
    return fit;
}

std::vector<FrameOutcome> fit_frames(const ShapeModel& model, std::span<const LandmarkFrame> frames,
                                     const FitConfig& config, int jobs)
{
    if (config.iterations < 1) {
        throw Error(ErrorKind::parameter, "iterations must be >= 1");
    }
    std::vector<FrameOutcome> out(frames.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            FrameOutcome& o = out[i];
            o.frame_index = frames[i].frame_index;
            o.timestamp = frames[i].timestamp;
            try {
                o.fit = fit_frame(model, frames[i], config);
            } catch (const Error& e) {
                o.failure = e.message();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                                        std::max<std::size_t>(frames.size(), 1));
    if (workers == 1) {
        work(0, frames.size());
        return out;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (frames.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(frames.size(), begin + chunk);
        if (begin < end) {
            pool.emplace_back(work, begin, end);
        }
    }
    pool.clear();
    return out;
}

} // namespace nns
