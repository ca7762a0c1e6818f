#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "nns/camera_fit.hpp"
#include "nns/error.hpp"
#include "oracles.hpp"

using namespace nns;

namespace {

double reprojection_rms(const AffineCamera& cam, const std::vector<Eigen::Vector2d>& p2,
                        const std::vector<Eigen::Vector3d>& p3)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < p2.size(); ++i) sum += (cam.project(p3[i]) - p2[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(p2.size()));
}

std::vector<Eigen::Vector3d> random_points(Rng& rng, int n)
{
    std::vector<Eigen::Vector3d> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = Eigen::Vector3d(rng.uniform(-70, 70), rng.uniform(-80, 80), rng.uniform(-40, 40));
    return p;
}

Eigen::Matrix<double, 2, 4> random_top(Rng& rng)
{
    Eigen::Matrix<double, 2, 4> top;
    for (auto& v : top.reshaped()) v = rng.uniform(-4, 4);
    top(0, 3) = rng.uniform(100, 500);
    top(1, 3) = rng.uniform(100, 400);
    return top;
}

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::io;
}

} // namespace

TEST(AffineCamera, ProjectExamples)
{
    const AffineCamera identity;
    EXPECT_EQ(identity.project({1, 2, 3}), Eigen::Vector2d(1, 2));
    Eigen::Matrix<double, 2, 4> top;
    top << 1, 0, 0, 5, 0, 1, 0, -7;
    EXPECT_EQ(AffineCamera(top).project(Eigen::Vector3d::Zero()), Eigen::Vector2d(5, -7));
    EXPECT_EQ(identity.matrix().row(2), Eigen::RowVector4d(0, 0, 0, 1));
}

TEST(AffineCamera, RankDeficientMatrixRejected)
{
    Eigen::Matrix<double, 2, 4> top;
    top << 1, 2, 3, 0, 2, 4, 6, 0;
    EXPECT_EQ(kind_of([&] { AffineCamera c(top); }), ErrorKind::degenerate);
}

TEST(AffineCamera, ProjectAgreesWithMatrixMultiplyOracle)
{
    Rng rng(5);
    const ShapeModel model = make_fixture_model();
    for (int trial = 0; trial < 20; ++trial) {
        const AffineCamera cam(random_top(rng));
        const auto shape = synthesize_shape(model, {fixture::random_alpha(rng, 5)});
        const auto projected = project(cam, shape);
        for (std::size_t j = 0; j < kNumLandmarks; ++j) {
            const Eigen::Vector2d expected = oracle::project(cam.matrix(), shape.points[j]);
            EXPECT_LE((projected[j] - expected).cwiseAbs().maxCoeff(), 1e-14 * (1.0 + expected.norm()));
        }
    }
}

TEST(EstimateCamera, PlanarDropZRecovered)
{
    Rng rng(8);
    std::vector<Eigen::Vector3d> p3;
    std::vector<Eigen::Vector2d> p2;
    for (int i = 0; i < 12; ++i) {
        p3.emplace_back(rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0);
        p2.emplace_back(p3.back().x(), p3.back().y());
    }
    const AffineCamera cam = estimate_affine_camera(p2, p3);
    EXPECT_LT(reprojection_rms(cam, p2, p3), 1e-12);
}

TEST(EstimateCamera, ExactCorrespondencesRecovered)
{
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const AffineCamera truth(random_top(rng));
        const auto p3 = random_points(rng, 10);
        std::vector<Eigen::Vector2d> p2;
        for (const auto& x : p3) p2.push_back(truth.project(x));
        const AffineCamera cam = estimate_affine_camera(p2, p3);
        double worst = 0.0;
        for (std::size_t i = 0; i < p3.size(); ++i) worst = std::max(worst, (cam.project(p3[i]) - p2[i]).norm());
        EXPECT_LT(worst, 1e-9);
        EXPECT_LT((cam.matrix() - truth.matrix()).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(EstimateCamera, NoisyResidualScalesWithSigma)
{
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const AffineCamera truth(random_top(rng));
        const auto p3 = random_points(rng, kNumLandmarks);
        std::vector<Eigen::Vector2d> p2;
        for (const auto& x : p3) p2.push_back(truth.project(x) + Eigen::Vector2d(rng.normal(0, 0.5), rng.normal(0, 0.5)));
        const double rms = reprojection_rms(estimate_affine_camera(p2, p3), p2, p3);
        EXPECT_GE(rms, 0.2);
        EXPECT_LE(rms, 1.0);
    }
}

TEST(EstimateCamera, LeastSquaresOptimality)
{
    // Perturbing the estimate in any direction cannot lower the cost.
    Rng rng(12);
    const AffineCamera truth(random_top(rng));
    const auto p3 = random_points(rng, 30);
    std::vector<Eigen::Vector2d> p2;
    for (const auto& x : p3) p2.push_back(truth.project(x) + Eigen::Vector2d(rng.normal(0, 2), rng.normal(0, 2)));
    const AffineCamera best = estimate_affine_camera(p2, p3);
    const double cost = reprojection_rms(best, p2, p3);
    for (int i = 0; i < 8; ++i) {
        Eigen::Matrix<double, 2, 4> top = best.matrix().topRows<2>();
        top.reshaped()(i) += 1e-4;
        EXPECT_GE(reprojection_rms(AffineCamera(top), p2, p3), cost);
    }
}

TEST(EstimateCamera, TooFewOrDegenerate)
{
    std::vector<Eigen::Vector3d> p3{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    std::vector<Eigen::Vector2d> p2{{0, 0}, {1, 0}, {0, 1}};
    EXPECT_EQ(kind_of([&] { estimate_affine_camera(p2, p3); }), ErrorKind::insufficient_data);

    std::vector<Eigen::Vector3d> line;
    std::vector<Eigen::Vector2d> line2;
    for (int i = 0; i < 6; ++i) {
        line.emplace_back(i, 2.0 * i, -i);
        line2.emplace_back(i, i);
    }
    EXPECT_EQ(kind_of([&] { estimate_affine_camera(line2, line); }), ErrorKind::degenerate);

    std::vector<Eigen::Vector3d> same(5, Eigen::Vector3d(1, 2, 3));
    std::vector<Eigen::Vector2d> same2(5, Eigen::Vector2d(4, 5));
    EXPECT_EQ(kind_of([&] { estimate_affine_camera(same2, same); }), ErrorKind::degenerate);

    // Zero weights remove correspondences.
    std::vector<Eigen::Vector3d> four{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<Eigen::Vector2d> four2{{0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}};
    const std::vector<double> w{1, 1, 1, 0};
    EXPECT_EQ(kind_of([&] { estimate_affine_camera(four2, four, w); }), ErrorKind::insufficient_data);
}

TEST(ShapeFit, MeanObservationsGiveZeroAlpha)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(1);
    const AffineCamera cam = fixture::random_camera(rng);
    const LandmarkFrame f = fixture::render(model, Eigen::VectorXd::Zero(5), cam);
    EXPECT_LT(fit_shape_coefficients(cam, model, f, 0.0).alpha.norm(), 1e-10);
}

TEST(ShapeFit, KnownAlphaRecoveredWithoutRidge)
{
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const ShapeModel model = fixture::random_model(rng, 90, rng.uniform_int(1, 10));
        const Eigen::VectorXd alpha = fixture::random_alpha(rng, model.num_components());
        const AffineCamera cam = fixture::random_camera(rng);
        const LandmarkFrame f = fixture::render(model, alpha, cam);
        const auto fitted = fit_shape_coefficients(cam, model, f, 0.0);
        EXPECT_LT((fitted.alpha - alpha).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(ShapeFit, RidgeShrinksMonotonically)
{
    Rng rng(3);
    const ShapeModel model = make_fixture_model();
    const AffineCamera cam = fixture::random_camera(rng);
    const LandmarkFrame f = fixture::render(model, fixture::random_alpha(rng, 5, 2.0), cam);
    double previous = fit_shape_coefficients(cam, model, f, 0.0).alpha.norm();
    for (const double ridge : {1e-2, 1.0, 1e2, 1e4, 1e6, 1e9}) {
        const double norm = fit_shape_coefficients(cam, model, f, ridge).alpha.norm();
        EXPECT_LE(norm, previous);
        previous = norm;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(ShapeFit, SingularWithoutRidgeIsRankDeficient)
{
    Rng rng(4);
    const ShapeModel model = fixture::random_model(rng, 80, 10);
    const AffineCamera cam = fixture::random_camera(rng);
    LandmarkFrame f = fixture::render(model, Eigen::VectorXd::Zero(10), cam);
    for (std::size_t j = 4; j < kNumLandmarks; ++j) f.valid[j] = false;
    EXPECT_EQ(kind_of([&] { fit_shape_coefficients(cam, model, f, 0.0); }), ErrorKind::rank_deficient);
    EXPECT_NO_THROW(fit_shape_coefficients(cam, model, f, 1.0));
}

TEST(FitFrame, MeanShapeFixpoint)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(6);
    const LandmarkFrame f = fixture::render(model, Eigen::VectorXd::Zero(5), fixture::random_camera(rng));
    const FrameFit fit = fit_frame(model, f, {1, 1.0, false});
    EXPECT_LT(fit.residual, 1e-9);
    EXPECT_LT(fit.coefficients.alpha.norm(), 1e-6);
}

TEST(FitFrame, RecoversShapeAndIsMonotone)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd alpha = fixture::random_alpha(rng, 5);
        const LandmarkFrame f = fixture::render(model, alpha, fixture::random_camera(rng));
        const FrameFit fit = fit_frame(model, f, {3, 0.0, false});
        const auto expected = synthesize_shape(model, {alpha});
        for (std::size_t j = 0; j < kNumLandmarks; ++j) {
            EXPECT_LT((fit.frontalized.points[j] - expected.points[j]).cwiseAbs().maxCoeff(), 1e-6);
        }
        ASSERT_EQ(fit.residual_history.size(), 3u);
        for (std::size_t i = 1; i < fit.residual_history.size(); ++i) {
            EXPECT_LE(fit.residual_history[i], fit.residual_history[i - 1] + 1e-9);
        }
        const auto again = synthesize_shape(model, fit.coefficients);
        for (std::size_t j = 0; j < kNumLandmarks; ++j) EXPECT_EQ(again.points[j], fit.frontalized.points[j]);
    }
}

TEST(FitFrame, ResidualMonotoneUnderNoiseAndRidge)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        LandmarkFrame f = fixture::render(model, fixture::random_alpha(rng, 5, 1.5), fixture::random_camera(rng));
        for (auto& p : f.points) p += Eigen::Vector2d(rng.normal(0, 1.0), rng.normal(0, 1.0));
        const FrameFit fit = fit_frame(model, f, {6, rng.uniform(0.0, 3.0), false});
        for (std::size_t i = 1; i < fit.residual_history.size(); ++i) {
            EXPECT_LE(fit.residual_history[i], fit.residual_history[i - 1] + 1e-9);
        }
        EXPECT_GE(fit.residual, 0.0);
    }
}

TEST(FitFrame, TwoPosesSameShapeAgree)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(13);
    const Eigen::VectorXd alpha = fixture::random_alpha(rng, 5);
    const auto a = fit_frame(model, fixture::render(model, alpha, fixture::pose_camera(30, 10, -5, 3, 320, 240)),
                             {3, 0.0, false});
    const auto b = fit_frame(model, fixture::render(model, alpha, fixture::pose_camera(-25, -15, 12, 4.5, 200, 300)),
                             {3, 0.0, false});
    for (std::size_t j = 0; j < kNumLandmarks; ++j) {
        EXPECT_LT((a.frontalized.points[j] - b.frontalized.points[j]).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(FitFrame, ConfidenceWeightingIgnoresZeroConfidenceOutlier)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(14);
    const Eigen::VectorXd alpha = fixture::random_alpha(rng, 5);
    LandmarkFrame f = fixture::render(model, alpha, fixture::random_camera(rng));
    f.points[30] += Eigen::Vector2d(80, -60);
    std::array<double, kNumLandmarks> conf{};
    conf.fill(1.0);
    conf[30] = 0.0;
    f.confidence = conf;
    const auto weighted = fit_frame(model, f, {30, 0.0, true}); // 67 landmarks: converges, not one-step exact
    const auto unweighted = fit_frame(model, f, {3, 0.0, false});
    const auto expected = synthesize_shape(model, {alpha});
    EXPECT_LT((weighted.frontalized.points[8] - expected.points[8]).norm(), 1e-6);
    EXPECT_GT((unweighted.frontalized.points[8] - expected.points[8]).norm(), 1e-3);
}

TEST(FitFrames, ParallelMatchesSequentialAndMarksUnfittable)
{
    const ShapeModel model = make_fixture_model();
    Rng rng(15);
    std::vector<LandmarkFrame> frames;
    for (int i = 0; i < 40; ++i) {
        frames.push_back(fixture::render(model, fixture::random_alpha(rng, 5), fixture::random_camera(rng), i, i / 30.0));
    }
    for (std::size_t j = 3; j < kNumLandmarks; ++j) frames[7].valid[j] = false;
    const auto seq = fit_frames(model, frames, {}, 1);
    const auto par = fit_frames(model, frames, {}, 4);
    ASSERT_EQ(seq.size(), frames.size());
    ASSERT_EQ(par.size(), frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        EXPECT_EQ(seq[i].frame_index, static_cast<int>(i));
        EXPECT_EQ(par[i].frame_index, static_cast<int>(i));
        EXPECT_EQ(seq[i].fitted(), i != 7);
        EXPECT_EQ(par[i].fitted(), i != 7);
        if (seq[i].fitted()) {
            EXPECT_EQ(seq[i].fit->coefficients.alpha, par[i].fit->coefficients.alpha);
        }
    }
    EXPECT_FALSE(seq[7].failure.empty());
    EXPECT_EQ(kind_of([&] { fit_frame(model, frames[7]); }), ErrorKind::insufficient_data);
}
