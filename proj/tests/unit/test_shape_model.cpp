#include <gtest/gtest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "nns/error.hpp"
#include "nns/random.hpp"
#include "nns/shape_model.hpp"
#include "oracles.hpp"

using namespace nns;

namespace {

nlohmann::json minimal_model_doc()
{
    // N = 68, K = 2, component k is the unit vector on entry k.
    nlohmann::json doc;
    doc["num_vertices"] = 68;
    doc["num_components"] = 2;
    std::vector<double> mean(204), components(204 * 2, 0.0);
    for (int i = 0; i < 204; ++i) mean[static_cast<std::size_t>(i)] = 0.5 * i;
    components[0 * 2 + 0] = 1.0;
    components[1 * 2 + 1] = 1.0;
    std::vector<int> annotation(68);
    for (int j = 0; j < 68; ++j) annotation[static_cast<std::size_t>(j)] = 67 - j;
    doc["mean"] = mean;
    doc["sigmas"] = {2.0, 3.0};
    doc["components"] = components;
    doc["landmark_annotation"] = annotation;
    return doc;
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

std::string message_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.message();
    }
    return {};
}

} // namespace

TEST(ShapeModel, MinimalFileLoads)
{
    const ShapeModel m = parse_shape_model(minimal_model_doc().dump());
    EXPECT_EQ(m.num_components(), 2);
    EXPECT_EQ(m.num_vertices(), 68);
    // Landmark 67 sits on vertex 0, whose x coordinate carries component 0.
    const auto s = synthesize_shape(m, {Eigen::Vector2d(1.0, 0.0)});
    EXPECT_DOUBLE_EQ(s.points[67].x(), 0.0 + 2.0);
    EXPECT_DOUBLE_EQ(s.points[67].y(), 0.5 + 3.0 * 0.0);
}

TEST(ShapeModel, ZeroSigmaIsStructural)
{
    auto doc = minimal_model_doc();
    doc["sigmas"] = {2.0, 0.0};
    EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::structural);
}

TEST(ShapeModel, ParseErrorsNameTheField)
{
    for (const char* field : {"num_vertices", "mean", "sigmas", "components", "landmark_annotation"}) {
        auto doc = minimal_model_doc();
        doc.erase(field);
        EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::parse) << field;
        EXPECT_NE(message_of([&] { parse_shape_model(doc.dump()); }).find(field), std::string::npos) << field;
    }
    auto doc = minimal_model_doc();
    doc["mean"][3] = "x";
    EXPECT_NE(message_of([&] { parse_shape_model(doc.dump()); }).find("mean"), std::string::npos);
    EXPECT_EQ(kind_of([] { parse_shape_model("{\"num_vertices\": 68,"); }), ErrorKind::parse);
}

TEST(ShapeModel, DimensionMismatchIsStructural)
{
    auto doc = minimal_model_doc();
    doc["components"].erase(doc["components"].size() - 1);
    EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::structural);

    doc = minimal_model_doc();
    doc["landmark_annotation"][5] = doc["landmark_annotation"][6];
    EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::structural);

    doc = minimal_model_doc();
    doc["landmark_annotation"][0] = 68;
    EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::structural);

    doc = minimal_model_doc();
    doc["num_vertices"] = 60;
    doc["mean"] = std::vector<double>(180, 0.0);
    doc["components"] = std::vector<double>(360, 0.0);
    EXPECT_EQ(kind_of([&] { parse_shape_model(doc.dump()); }), ErrorKind::structural);
}

TEST(ShapeModel, CoefficientLengthMismatchIsDimensionError)
{
    const ShapeModel m = make_fixture_model();
    EXPECT_EQ(kind_of([&] { synthesize_shape(m, ShapeCoefficients::zeros(4)); }), ErrorKind::dimension);
}

TEST(ShapeModel, ZeroAlphaGivesAnnotatedMeanExactly)
{
    const ShapeModel m = make_fixture_model();
    const auto s = synthesize_shape(m, ShapeCoefficients::zeros(m.num_components()));
    for (int j = 0; j < kNumLandmarks; ++j) {
        const int v = m.annotation()[static_cast<std::size_t>(j)];
        for (int c = 0; c < 3; ++c) {
            EXPECT_EQ(s.points[static_cast<std::size_t>(j)](c), m.mean()(3 * v + c));
        }
    }
}

TEST(ShapeModel, UnitAlphaAddsOneScaledComponent)
{
    const ShapeModel m = make_fixture_model();
    for (int k = 0; k < m.num_components(); ++k) {
        const auto s = synthesize_shape(m, {Eigen::VectorXd::Unit(m.num_components(), k)});
        for (int j = 0; j < kNumLandmarks; ++j) {
            const int v = m.annotation()[static_cast<std::size_t>(j)];
            for (int c = 0; c < 3; ++c) {
                EXPECT_NEAR(s.points[static_cast<std::size_t>(j)](c),
                            m.mean()(3 * v + c) + m.sigmas()(k) * m.components()(3 * v + c, k), 1e-12);
            }
        }
    }
}

TEST(ShapeModel, MatchesEntrywiseOracleAndIsLinear)
{
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const ShapeModel m = fixture::random_model(rng, rng.uniform_int(68, 150), rng.uniform_int(1, 8));
        const Eigen::VectorXd a = fixture::random_alpha(rng, m.num_components());
        const Eigen::VectorXd b = fixture::random_alpha(rng, m.num_components());
        const double s = rng.uniform(-3, 3);
        const auto expected = oracle::shape(m, a);
        const auto sa = synthesize_shape(m, {a});
        const auto sb = synthesize_shape(m, {b});
        const auto sab = synthesize_shape(m, {a + b});
        const auto ssa = synthesize_shape(m, {s * a});
        const auto mean = synthesize_shape(m, ShapeCoefficients::zeros(m.num_components()));
        for (std::size_t j = 0; j < kNumLandmarks; ++j) {
            EXPECT_LT((sa.points[j] - expected[j]).norm(), 1e-10);
            EXPECT_LT((sab.points[j] - sa.points[j] - sb.points[j] + mean.points[j]).norm(), 1e-12 * (1.0 + mean.points[j].norm()));
            const Eigen::Vector3d lhs = ssa.points[j] - mean.points[j];
            const Eigen::Vector3d rhs = s * (sa.points[j] - mean.points[j]);
            EXPECT_LE((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST(ShapeModel, SerializeRoundTrip)
{
    const ShapeModel m = make_fixture_model();
    const ShapeModel back = parse_shape_model(serialize_shape_model(m));
    EXPECT_EQ(back.annotation(), m.annotation());
    EXPECT_LE((back.mean() - m.mean()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.components() - m.components()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.sigmas() - m.sigmas()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ShapeModel, FixtureIsDeterministicAndOrthonormal)
{
    const ShapeModel a = make_fixture_model();
    const ShapeModel b = make_fixture_model();
    EXPECT_EQ(serialize_shape_model(a), serialize_shape_model(b));
    EXPECT_EQ(a.num_vertices(), 100);
    EXPECT_EQ(a.num_components(), 5);
    const Eigen::MatrixXd gram = a.components().transpose() * a.components();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
    for (int k = 0; k < 5; ++k) EXPECT_GT(a.sigmas()(k), 0.0);
}

TEST(ShapeModel, BundledModelLoadsAndZeroAlphaIsItsMean)
{
    const ShapeModel m = load_shape_model(std::string(NNS_DATA_DIR) + "/models/fixture_model.json");
    EXPECT_EQ(m.num_vertices(), 100);
    EXPECT_EQ(m.num_components(), 5);
    const auto s = synthesize_shape(m, ShapeCoefficients::zeros(5));
    for (int j = 0; j < kNumLandmarks; ++j) {
        EXPECT_EQ(s.points[static_cast<std::size_t>(j)], m.mean_vertex(m.annotation()[static_cast<std::size_t>(j)]));
    }
    // The bundled file is the fixture generator's output.
    EXPECT_LE((m.mean() - make_fixture_model().mean()).cwiseAbs().maxCoeff(), 1e-12);
}
