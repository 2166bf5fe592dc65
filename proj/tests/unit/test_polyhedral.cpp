#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kdual/polyhedral.hpp"
#include "oracles/brute.hpp"

using namespace kdual;

namespace {

RationalPoint pt(std::initializer_list<long long> xs) {
    RationalPoint p;
    for (auto x : xs) p.emplace_back(x);
    return p;
}

IntegralPolyhedralComplex segment() { return build_complex({{{pt({0}), pt({1})}, {}, 1.0}}); }

IntegralPolyhedralComplex triangle_boundary(const std::vector<RationalPoint>& v) {
    return build_complex({{{v[0], v[1]}, {}, 1.0}, {{v[1], v[2]}, {}, 1.0}, {{v[2], v[0]}, {}, 1.0}});
}

}  // namespace

TEST(BuildComplex, CircleFromGluedSegment) {
    auto c = circle_complex();
    EXPECT_EQ(c.dim, 1u);
    EXPECT_EQ(c.gluings.size(), 1u);
    EXPECT_EQ(c.count_faces(1), 1u);
}

TEST(BuildComplex, StandardTwoSimplexClosure) {
    auto c = build_complex({simplex_face({1, 1, 1})});
    EXPECT_EQ(c.dim, 2u);
    EXPECT_EQ(c.count_faces(2), 1u);
    EXPECT_EQ(c.count_faces(1), 3u);
    EXPECT_EQ(c.count_faces(0), 3u);
}

TEST(BuildComplex, TriangleBoundaryHasThreeEdges) {
    auto c = triangle_boundary({pt({1, 0}), pt({0, 1}), pt({-1, -1})});
    EXPECT_EQ(c.dim, 1u);
    EXPECT_EQ(c.count_faces(1), 3u);
    EXPECT_EQ(c.count_faces(0), 3u);
}

TEST(BuildComplex, RejectsNonIntegralGluing) {
    GluingSpec g{{pt({1})}, {{Rational(1)}}, {Rational(-1, 2)}};
    try {
        build_complex({{{pt({0}), pt({1})}, {}, 1.0}}, {g});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InconsistentGluing);
    }
}

TEST(BuildComplex, RejectsGluingOntoNonFace) {
    GluingSpec g{{pt({1})}, {{Rational(1)}}, {Rational(-3)}};
    EXPECT_THROW(build_complex({{{pt({0}), pt({1})}, {}, 1.0}}, {g}), Error);
}

TEST(BuildComplex, RejectsBadRationalText) {
    try {
        parse_rational("0.3.1");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonRationalVertex);
    }
    EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
}

TEST(RationalPoints, SegmentLevelThree) {
    auto pts = rational_points(segment(), 3);
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts.point(1)[0], Rational(1, 3));
    EXPECT_EQ(pts.point(3)[0], Rational(1));
}

TEST(RationalPoints, CircleLevelFour) {
    auto pts = rational_points(circle_complex(), 4);
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(pts.point(i)[0], Rational(static_cast<long long>(i), 4));
}

TEST(RationalPoints, TriangleBoundaryMatchesEnumerationOracle) {
    std::vector<RationalPoint> v{pt({-1, -1}), pt({2, -1}), pt({-1, 2})};
    auto c = triangle_boundary(v);
    for (std::int64_t l : {1, 2, 3, 5}) {
        auto pts = rational_points(c, l);
        auto expected = oracle::boundary_points_2d(v, l);
        EXPECT_EQ(pts.size(), expected.size()) << "level " << l;
    }
    EXPECT_EQ(rational_points(c, 1).size(), 9u);
}

TEST(RationalPoints, TorusCountIsPeriodProduct) {
    auto t = torus_complex(2, 3);
    EXPECT_EQ(rational_points(t, 1).size(), 6u);
    EXPECT_EQ(rational_points(t, 4).size(), 96u);
}

TEST(RationalPoints, NestedUnderRefinement) {
    auto c = triangle_boundary({pt({1, 0}), pt({0, 1}), pt({-1, -1})});
    for (std::int64_t l : {1, 2, 3}) {
        auto coarse = rational_points(c, l);
        for (std::int64_t k : {2, 3}) {
            auto fine = rational_points(c, l * k);
            for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_TRUE(fine.contains(coarse.point(i)));
        }
    }
}

TEST(RationalPoints, CountOnClosedCurveIsExact) {
    // a closed 1-dimensional complex of lattice length 9 has exactly 9l points
    auto c = triangle_boundary({pt({-1, -1}), pt({2, -1}), pt({-1, 2})});
    for (std::int64_t l : {4, 8, 16, 32}) EXPECT_EQ(rational_points(c, l).size(), static_cast<std::size_t>(9 * l));
}

TEST(RationalPoints, CountAsymptoteOnCubeSurface) {
    // boundary of [-1,1]^3: 24 l^2 + 2 points, normalized volume 48
    std::vector<FaceSpec> faces;
    for (int axis = 0; axis < 3; ++axis)
        for (int sign : {-1, 1}) {
            auto corner = [&](int a, int b) {
                RationalPoint p(3);
                p[axis] = sign;
                p[(axis + 1) % 3] = a;
                p[(axis + 2) % 3] = b;
                return p;
            };
            faces.push_back({{corner(-1, -1), corner(1, -1), corner(1, 1)}, {}, 1.0});
            faces.push_back({{corner(-1, -1), corner(-1, 1), corner(1, 1)}, {}, 1.0});
        }
    auto c = build_complex(faces);
    double prev = 1e9;
    for (std::int64_t l : {4, 8, 16}) {
        auto n = rational_points(c, l).size();
        EXPECT_EQ(n, static_cast<std::size_t>(24 * l * l + 2));
        double err = std::abs(2.0 * static_cast<double>(n) / static_cast<double>(l * l) - 48.0) / 48.0;
        EXPECT_LT(err, prev);
        prev = err;
    }
}

TEST(FaceMeasure, SegmentAndSimplex) {
    auto seg = segment();
    EXPECT_DOUBLE_EQ(face_measure(seg.faces[seg.top_faces()[0]], 1.0).total_mass, 1.0);
    auto tri = build_complex({simplex_face({1, 1, 1})});
    EXPECT_DOUBLE_EQ(face_measure(tri.faces[tri.top_faces()[0]], 1.0).total_mass, 0.5);
}

TEST(FaceMeasure, LatticeLengthOfSlantedEdge) {
    auto c = build_complex({{{pt({-1, 2}), pt({2, -1})}, {}, 1.0}});
    EXPECT_EQ(c.faces[c.top_faces()[0]].lattice_volume, Rational(3));
}

TEST(FaceMeasure, WeightedFacesNormalize) {
    auto c = build_complex({{{pt({0}), pt({1})}, {}, 2.0}, {{pt({1}), pt({2})}, {}, 1.0}});
    auto m = quadrature(c, Rational(1, 2)).normalized();
    double left = 0, right = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double x = m.coords[i][0];
        double w = m.weights[i];
        if (x < 1) left += w;
        else if (x > 1) right += w;
        else {
            left += 2.0 / 3.0 * 0.25;
            right += 1.0 / 3.0 * 0.25;
        }
    }
    EXPECT_NEAR(left, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(right, 1.0 / 3.0, 1e-12);
}

TEST(FaceMeasure, VertexNeedsExplicitPointMass) {
    auto c = segment();
    std::size_t vertex = 0;
    while (c.faces[vertex].dim() != 0) ++vertex;
    try {
        face_measure(c.faces[vertex], 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroDimensionalFace);
    }
    EXPECT_DOUBLE_EQ(face_measure(c.faces[vertex], 1.0, true).total_mass, 1.0);
}

TEST(Quadrature, TrapezoidOnSegment) {
    auto m = quadrature(segment(), Rational(1, 4));
    ASSERT_EQ(m.size(), 5u);
    std::vector<double> expected{0.125, 0.25, 0.25, 0.25, 0.125};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m.weights[i], expected[i]);
}

TEST(Quadrature, CircleIsUniform) {
    auto m = quadrature(circle_complex(), Rational(1, 4));
    ASSERT_EQ(m.size(), 4u);
    for (double w : m.weights) EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(Quadrature, TwoSimplexHalfSpacing) {
    auto m = quadrature(build_complex({simplex_face({1, 1, 1})}), Rational(1, 2));
    EXPECT_EQ(m.size(), 6u);
    EXPECT_NEAR(m.total_mass(), 0.5, 1e-12);
    // corners touch one small triangle, edge midpoints three
    EXPECT_NEAR(m.weights.front(), 0.5 / 4 / 3, 1e-15);
}

TEST(Quadrature, TotalMassResolutionIndependent) {
    auto cube = build_complex({simplex_face({1, 1, 1}), simplex_face({1, 2, 1})});
    auto torus = torus_complex(2, 2);
    for (auto* c : {&cube, &torus}) {
        double ref = quadrature(*c, Rational(1)).total_mass();
        for (long long n : {2, 3, 5, 8}) EXPECT_NEAR(quadrature(*c, Rational(1, n)).total_mass(), ref, 1e-12);
    }
}

TEST(Quadrature, TorusWeightsUniform) {
    auto m = quadrature(torus_complex(1, 1), Rational(1, 4));
    ASSERT_EQ(m.size(), 16u);
    for (double w : m.weights) EXPECT_NEAR(w, 1.0 / 16, 1e-15);
}

TEST(Quadrature, TooCoarse) {
    try {
        quadrature(segment(), Rational(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ResolutionTooCoarse);
    }
}
