#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nns/annotation.hpp"
#include "nns/shape_model.hpp"

namespace nns {

/// One frame of tracked 2D landmarks (pixels).
struct LandmarkFrame {
    int frame_index = 0;
    double timestamp = 0.0;
    std::array<Eigen::Vector2d, kNumLandmarks> points{};
    std::array<bool, kNumLandmarks> valid{};
    std::optional<std::array<double, kNumLandmarks>> confidence;

    int valid_count() const;
};

/// 3x4 affine camera with third row (0, 0, 0, 1) and a rank-2 top-left 2x3 block.
class AffineCamera {
public:
    /// [I | 0]: drops z.
    AffineCamera();
    /// Throws Error(degenerate) when the top-left 2x3 block is not rank 2.
    explicit AffineCamera(const Eigen::Matrix<double, 2, 4>& top_rows);

    const Eigen::Matrix<double, 3, 4>& matrix() const noexcept { return matrix_; }
    Eigen::Matrix<double, 2, 3> linear() const { return matrix_.topLeftCorner<2, 3>(); }
    Eigen::Vector2d translation() const { return matrix_.block<2, 1>(0, 3); }

    Eigen::Vector2d project(const Eigen::Vector3d& point) const;

private:
    Eigen::Matrix<double, 3, 4> matrix_;
};

/// Gold standard affine camera estimate: the least-squares camera for the
/// given 2D-3D correspondences, computed on isotropically normalized points
/// (2D mean distance sqrt(2), 3D mean distance sqrt(3)) and denormalized.
///
/// `weights`, when non-empty, scales each correspondence's residual rows;
/// zero-weight correspondences are ignored. Coplanar 3D points give the
/// minimum-norm camera (reprojection of the given points is still exact);
/// collinear or coincident points throw Error(degenerate); fewer than four
/// correspondences throw Error(insufficient_data).
AffineCamera estimate_affine_camera(std::span<const Eigen::Vector2d> points2d,
                                    std::span<const Eigen::Vector3d> points3d,
                                    std::span<const double> weights = {});

std::array<Eigen::Vector2d, kNumLandmarks> project(const AffineCamera& camera,
                                                  const Landmarks3D& landmarks);

/// Ridge-regularized linear least squares for the shape coefficients given
/// a fixed camera: minimize |A alpha - b|^2 + ridge |alpha|^2 over the valid
/// landmarks of `frame`. With ridge == 0 a singular system throws
/// Error(rank_deficient).
ShapeCoefficients fit_shape_coefficients(const AffineCamera& camera, const ShapeModel& model,
                                         const LandmarkFrame& frame, double ridge,
                                         bool use_confidence = false);

struct FitConfig {
    int iterations = 3;
    double ridge = 1.0;
    bool use_confidence = false;
};

struct FrameFit {
    int frame_index = 0;
    double timestamp = 0.0;
    AffineCamera camera;
    ShapeCoefficients coefficients;
    Landmarks3D frontalized{};
    /// RMS 2D reprojection error (pixels) after the last iteration; weighted
    /// by confidence when the fit used confidences.
    double residual = 0.0;
    /// RMS residual after each camera/shape round.
    std::vector<double> residual_history;
};

/// Alternates camera estimation (against the current shape instance) and
/// shape fitting, starting from the mean shape. A round that would raise
/// the reprojection residual is rejected and ends the refinement, so
/// residual_history never increases.
FrameFit fit_frame(const ShapeModel& model, const LandmarkFrame& frame, const FitConfig& config = {});

/// Per-frame result of fitting a whole session. Frames with fewer than four
/// valid landmarks, or whose geometry is degenerate, carry no fit.
struct FrameOutcome {
    int frame_index = 0;
    double timestamp = 0.0;
    std::optional<FrameFit> fit;
    std::string failure;

    bool fitted() const noexcept { return fit.has_value(); }
};

/// Fits every frame; frames are independent and are spread over `jobs`
/// threads. Output order matches input order.
std::vector<FrameOutcome> fit_frames(const ShapeModel& model, std::span<const LandmarkFrame> frames,
                                     const FitConfig& config = {}, int jobs = 1);

} // namespace nns
