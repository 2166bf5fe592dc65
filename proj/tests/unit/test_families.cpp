#include <gtest/gtest.h>

#include "kdual/families.hpp"
#include "kdual/tropical.hpp"

using namespace kdual;

namespace {

/// Polar dual of a convex polygon listed counter-clockwise: one vertex per edge, solving
/// <a, v_k> = <a, v_{k+1}> = -1 by Cramer's rule.
std::vector<RationalPoint> polygon_dual_oracle(const std::vector<std::pair<int, int>>& v) {
    std::vector<RationalPoint> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto [x1, y1] = v[k];
        auto [x2, y2] = v[(k + 1) % v.size()];
        Rational det(x1 * y2 - x2 * y1);
        out.push_back({Rational(-(y2 - y1)) / det, Rational(x2 - x1) / det});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RationalPoint> sorted(std::vector<RationalPoint> v) {
    std::sort(v.begin(), v.end());
    return v;
}

/// Coefficients of prod (1 - y^{d_i}) * sum C(k+3,3) y^k computed by dense polynomial products.
std::vector<std::int64_t> ci_hilbert_oracle(const std::vector<std::int64_t>& d, std::size_t depth) {
    std::vector<std::int64_t> p(depth, 0);
    // (1 - y)^{-4} as repeated prefix sums of the constant series 1
    std::vector<std::int64_t> s(depth, 1);
    for (int r = 0; r < 3; ++r)
        for (std::size_t k = 1; k < depth; ++k) s[k] += s[k - 1];
    p = s;
    for (auto di : d) {
        std::vector<std::int64_t> q(depth, 0);
        for (std::size_t k = 0; k < depth; ++k) {
            q[k] += p[k];
            if (k + di < depth) q[k + di] -= p[k];
        }
        p = q;
    }
    return p;
}

}  // namespace

TEST(Toric, ProjectivePlaneDual) {
    auto pair = reflexive_pair(integer_points({{-1, -1}, {2, -1}, {-1, 2}}));
    EXPECT_EQ(sorted(pair.delta_dual), polygon_dual_oracle({{-1, -1}, {2, -1}, {-1, 2}}));
    EXPECT_EQ(sorted(pair.delta_dual), sorted(integer_points({{1, 0}, {0, 1}, {-1, -1}})));
    EXPECT_EQ(sorted(polar_dual(pair.delta_dual)), sorted(integer_points({{-1, -1}, {2, -1}, {-1, 2}})));
    EXPECT_DOUBLE_EQ(boundary_degree(*pair.boundary), 9.0);
    EXPECT_DOUBLE_EQ(boundary_degree(*pair.boundary_dual), 3.0);
}

TEST(Toric, P1xP1Dual) {
    auto pair = reflexive_pair(integer_points({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}));
    EXPECT_EQ(sorted(pair.delta_dual), polygon_dual_oracle({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}));
    EXPECT_EQ(sorted(pair.delta_dual), sorted(integer_points({{1, 0}, {0, 1}, {-1, 0}, {0, -1}})));
    EXPECT_EQ(sorted(polar_dual(pair.delta_dual)), sorted(pair.delta));
}

TEST(Toric, CubeBoundaryDegree) {
    auto cube = integer_points({{-1, -1, -1}, {1, -1, -1}, {-1, 1, -1}, {1, 1, -1}, {-1, -1, 1}, {1, -1, 1}, {-1, 1, 1}, {1, 1, 1}});
    auto pair = reflexive_pair(cube);
    EXPECT_EQ(pair.delta_dual.size(), 6u);
    EXPECT_EQ(pair.boundary->top_faces().size(), 12u);
    EXPECT_DOUBLE_EQ(boundary_degree(*pair.boundary), 48.0);
    EXPECT_EQ(rational_points(*pair.boundary, 3).size(), 24u * 9 + 2);
}

TEST(Toric, NotReflexive) {
    for (auto verts : {integer_points({{-1, -1}, {3, -1}, {-1, 3}}), integer_points({{0, 0}, {1, 0}, {0, 1}}),
                       integer_points({{-1, 0}, {1, 0}, {0, 2}, {0, -2}})}) {
        try {
            reflexive_pair(verts);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NotReflexive);
        }
    }
}

TEST(Toric, ProblemIsNormalized) {
    auto inst = toric_pair(integer_points({{-1, -1}, {2, -1}, {-1, 2}}), Rational(1, 8));
    EXPECT_NEAR(inst.problem.mu0->total_mass(), 1.0, 1e-15);
    EXPECT_NEAR(inst.problem.nu0->total_mass(), 1.0, 1e-15);
    EXPECT_EQ(inst.problem.ln_norm, 9.0);
    EXPECT_TRUE(inst.problem.cost.bilinear);
    // vertex (1,0) of the dual against vertex (2,-1): pairing 2
    std::size_t i = 0, j = 0;
    while (inst.problem.mu0->points[i] != RationalPoint{Rational(1), Rational(0)}) ++i;
    while (inst.problem.nu0->points[j] != RationalPoint{Rational(2), Rational(-1)}) ++j;
    EXPECT_EQ((*inst.problem.matrix)(i, j), 2.0);
}

TEST(Intermediate, WeightAndTarget) {
    IntermediateData d;
    d.n = 3;
    d.d = {2, 2};
    d.hilbert_M = projective_hilbert(3, 10);
    EXPECT_EQ(d.weight({0.0, 0.0}), 1.0);
    EXPECT_EQ(d.weight({-0.5, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(d.weight({-0.25, 0.0}), 0.25);
    auto B = intermediate_target(d);
    EXPECT_EQ(B.top_faces().size(), 2u);
    EXPECT_EQ(B.dim, 1u);
    auto pr = intermediate_family(d, Rational(1, 16));
    EXPECT_NEAR(pairwise_sum(pr.target_mass), 1.0, 1e-12);
    EXPECT_NEAR(pr.mu0->total_mass(), 1.0, 1e-12);
    for (std::size_t j = 0; j < pr.nu0->size(); ++j) {
        const auto& p = pr.nu0->coords[j];
        EXPECT_TRUE(p[0] == 0.0 || p[1] == 0.0);
        EXPECT_LE(p[0], 0.0);
        EXPECT_GE(2 * p[0] + 2 * p[1], -1.0 - 1e-15);
    }
    d.n = 1;
    EXPECT_THROW(d.validate(), Error);
}

TEST(Intermediate, SectionCountMatchesSeries) {
    IntermediateData d;
    d.n = 3;
    d.d = {2, 2};
    d.hilbert_M = projective_hilbert(3, 12);
    auto ci = ci_hilbert_oracle({2, 2}, 12);
    EXPECT_EQ(ci[2], 8);
    EXPECT_EQ(section_count(d, 0).enumerated, 1);
    EXPECT_EQ(section_count(d, 1).enumerated, 4);
    EXPECT_EQ(section_count(d, 2).enumerated, 10);
    for (std::int64_t l = 0; l <= 8; ++l) {
        auto sc = section_count(d, l);
        EXPECT_EQ(sc.enumerated, sc.series) << l;
    }
    // l = 2 by hand from the oracle: tuples (0,0), (1,0), (0,1)
    EXPECT_EQ(ci[2] + ci[0] + ci[0], 10);
    d.d = {1, 2, 3};
    d.n = 4;
    for (std::int64_t l = 0; l <= 8; ++l) {
        auto sc = section_count(d, l);
        EXPECT_EQ(sc.enumerated, sc.series) << l;
    }
    try {
        section_count(d, 12);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SeriesDepthExceeded);
    }
}

TEST(Abelian, ThetaCountsAndIndependence) {
    auto inst = mumford_family(MumfordData::standard(), {1, 2, 3}, Rational(1, 16));
    auto seg = build_complex({FaceSpec{{RationalPoint{Rational(0)}, RationalPoint{Rational(1)}}, {}, 1.0}});
    const auto& face = seg.faces[seg.top_faces()[0]];
    for (std::int64_t l = 1; l <= 3; ++l) {
        auto ss = inst.family.sections(l);
        EXPECT_EQ(static_cast<std::int64_t>(ss.size()), l);
        EXPECT_TRUE(check_valuative_independence(ss, face, inst.family.presentation).independent) << l;
    }
    EXPECT_THROW((void)inst.family.val(4, {Rational(0)}, {0.5}), Error);
    Rank1Mumford r;
    for (std::int64_t k = -5; k <= 5; ++k) {
        EXPECT_EQ(r.slope(k), k + 1);
        EXPECT_EQ(r.phi_int(k), k * (k + 1) / 2);
        EXPECT_EQ(r.phi_int(k + 1) - r.phi_int(k), k + 1);
    }
}

TEST(Abelian, DependentFamilyGivesWitness) {
    // two sections whose dominant terms share an exponent with proportional coefficients
    auto make = [](std::vector<Rational> c) {
        return TropicalSection{{MonomialTerm{{1}, 0, std::move(c), ""}}, 1, std::nullopt, ""};
    };
    auto seg = build_complex({FaceSpec{{RationalPoint{Rational(0)}, RationalPoint{Rational(1)}}, {}, 1.0}});
    auto v = check_valuative_independence({make({Rational(1), Rational(2)}), make({Rational(-3), Rational(-6)})},
                                          seg.faces[seg.top_faces()[0]], Presentation{});
    EXPECT_FALSE(v.independent);
    EXPECT_EQ(v.witness_kernel, (std::vector<BigInt>{3, 1}));
}

TEST(Abelian, RankTwoProblem) {
    MumfordData d = MumfordData::standard(2);
    auto inst = mumford_family(d, {1, 2}, Rational(1, 4));
    EXPECT_EQ(inst.problem.ln_norm, 2.0);
    EXPECT_EQ(inst.problem.mu0->size(), 16u);
    EXPECT_NEAR(inst.problem.mu0->total_mass(), 1.0, 1e-15);
    EXPECT_EQ(inst.family.labels(2).size(), 4u);
}
