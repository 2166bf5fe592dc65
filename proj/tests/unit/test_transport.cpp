#include <gtest/gtest.h>

#include <random>

#include "kdual/lp_oracle.hpp"
#include "kdual/minimize.hpp"
#include "oracles/brute.hpp"

using namespace kdual;

namespace {

std::shared_ptr<const IntegralPolyhedralComplex> segment(int lo, int hi) {
    std::vector<FaceSpec> faces;
    for (int k = lo; k < hi; ++k) faces.push_back({{RationalPoint{Rational(k)}, RationalPoint{Rational(k + 1)}}, {}, 1.0});
    return std::make_shared<const IntegralPolyhedralComplex>(build_complex(faces));
}

TransportProblem bilinear_on_interval(std::int64_t steps) {
    auto cx = segment(-1, 1);
    auto mu = quadrature(*cx, Rational(1, steps)).normalized();
    return make_problem(pairing_cost(cx, cx), mu, mu);
}

CostFunction table_cost(std::vector<std::vector<double>> table) {
    CostFunction c;
    auto t = std::make_shared<std::vector<std::vector<double>>>(std::move(table));
    c.evaluator = [t](const Point& x, const Point& p) {
        return (*t)[static_cast<std::size_t>(x[0])][static_cast<std::size_t>(p[0])];
    };
    return c;
}

DiscreteMeasure indexed(const std::vector<double>& w) {
    DiscreteMeasure m;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m.points.push_back({Rational(static_cast<long long>(i))});
        m.coords.push_back({static_cast<double>(i)});
        m.weights.push_back(w[i]);
        m.face_tags.push_back(0);
    }
    return m;
}

std::vector<double> random_masses(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w(n);
    double s = 0;
    for (auto& x : w) s += (x = u(rng));
    for (auto& x : w) x /= s;
    return w;
}

TransportProblem random_table_problem(std::mt19937_64& rng, std::size_t n, std::size_t m, bool uniform) {
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<std::vector<double>> t(n, std::vector<double>(m));
    for (auto& r : t)
        for (auto& x : r) x = u(rng);
    auto a = uniform ? std::vector<double>(n, 1.0 / n) : random_masses(rng, n);
    auto b = uniform ? std::vector<double>(m, 1.0 / m) : random_masses(rng, m);
    return make_problem(table_cost(t), indexed(a), indexed(b));
}

double sup_diff_mod_const(const std::vector<double>& a, const std::vector<double>& b) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lo = std::min(lo, a[i] - b[i]);
        hi = std::max(hi, a[i] - b[i]);
    }
    return (hi - lo) / 2;
}

}  // namespace

TEST(CTransform, AbsoluteValueFromBilinearCost) {
    auto pr = bilinear_on_interval(16);
    auto psi = pr.target_field(std::vector<double>(pr.nu0->size(), 0.0));
    auto f = c_transform(psi, pr, Direction::TargetToSource);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.values[i], std::abs(pr.mu0->coords[i][0]));
    auto g = c_transform(f, pr, Direction::SourceToTarget);
    for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(CTransform, ConstantShiftAndTieBreak) {
    auto pr = bilinear_on_interval(8);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(pr.mu0->size());
    for (auto& x : v) x = snap_dyadic(u(rng));
    auto f = c_transform(pr.source_field(v), pr, Direction::SourceToTarget);
    for (auto& x : v) x += 0.375;
    auto g = c_transform(pr.source_field(v), pr, Direction::SourceToTarget);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(g.values[j], f.values[j] - 0.375);
    // p = 0 sees c = 0 everywhere, so with f = 0 the sup is attained first at index 0
    auto z = c_transform(pr.source_field(std::vector<double>(pr.mu0->size(), 0.0)), pr, Direction::SourceToTarget);
    std::size_t origin = 0;
    while (pr.nu0->coords[origin][0] != 0.0) ++origin;
    EXPECT_EQ(z.argmax[origin], 0u);
}

TEST(CTransform, MatchesDirectMaximization) {
    std::mt19937_64 rng(4);
    auto pr = random_table_problem(rng, 17, 23, false);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> f(17);
    for (auto& x : f) x = snap_dyadic(u(rng));
    auto g = c_transform(pr.source_field(f), pr, Direction::SourceToTarget);
    for (std::size_t j = 0; j < 23; ++j) {
        long double best = -1e300L;
        for (std::size_t i = 0; i < 17; ++i)
            best = std::max(best, static_cast<long double>(pr.cost({double(i)}, {double(j)})) - f[i]);
        EXPECT_NEAR(static_cast<double>(best), g.values[j], 1e-11);
    }
}

TEST(CTransform, PcPropertiesOnRandomPotentials) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto pr = random_table_problem(rng, 5 + trial * 7, 40 - trial * 3, false);
        std::uniform_real_distribution<double> u(-5, 5);
        std::vector<double> f(pr.mu0->size()), f2(f.size());
        for (auto& x : f) x = snap_dyadic(u(rng));
        for (auto& x : f2) x = snap_dyadic(u(rng));
        auto fc = c_transform(pr.source_field(f), pr, Direction::SourceToTarget);
        auto fcc = c_transform(fc, pr, Direction::TargetToSource);
        auto fccc = c_transform(fcc, pr, Direction::SourceToTarget);
        EXPECT_EQ(fccc.values, fc.values);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LE(fcc.values[i], f[i]);
        EXPECT_EQ(project_Pc(fcc, pr).values, fcc.values);
        auto f2c = c_transform(pr.source_field(f2), pr, Direction::SourceToTarget);
        double in = 0, out = 0;
        for (std::size_t i = 0; i < f.size(); ++i) in = std::max(in, std::abs(f[i] - f2[i]));
        for (std::size_t j = 0; j < fc.size(); ++j) out = std::max(out, std::abs(fc.values[j] - f2c.values[j]));
        EXPECT_LE(out, in);
        // feasibility, with equality on the argmax graph
        for (std::size_t j = 0; j < fc.size(); ++j) {
            for (std::size_t i = 0; i < f.size(); ++i) EXPECT_GE(f[i] + fc.values[j], (*pr.matrix)(i, j));
            EXPECT_EQ(f[fc.argmax[j]] + fc.values[j], (*pr.matrix)(fc.argmax[j], j));
        }
    }
}

TEST(CTransform, EmptyGrid) {
    CostMatrix c{0, 3, {}};
    try {
        c_transform_values(c, {}, Direction::SourceToTarget);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
    }
}

TEST(Functional, Examples) {
    auto zero = make_problem(table_cost({{0, 0}, {0, 0}}), indexed({0.5, 0.5}), indexed({0.25, 0.75}));
    EXPECT_EQ(kontorovich_value(zero, zero.source_field({0, 0})), 0.0);
    auto point = make_problem(table_cost({{1.25}}), indexed({1.0}), indexed({1.0}));
    EXPECT_EQ(kontorovich_value(point, point.source_field({0.5})), 1.25);
    auto pr = bilinear_on_interval(8);
    std::vector<double> v(pr.mu0->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = snap_dyadic(std::cos(3.0 * i));
    double f0 = kontorovich_value(pr, pr.source_field(v));
    for (auto& x : v) x -= 0.5;
    EXPECT_NEAR(kontorovich_value(pr, pr.source_field(v)), f0, 1e-15);
    try {
        kontorovich_value(pr, pr.source_field({1.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(LpOracle, TwoByTwo) {
    auto pr = make_problem(table_cost({{0, 1}, {1, 0}}), indexed({0.5, 0.5}), indexed({0.5, 0.5}));
    auto lp = lp_oracle(pr);
    EXPECT_DOUBLE_EQ(lp.primal_value, 1.0);
    ASSERT_EQ(lp.plan.size(), 2u);
    for (const auto& e : lp.plan) {
        EXPECT_NE(e.i, e.j);
        EXPECT_DOUBLE_EQ(e.mass, 0.5);
    }
    auto point = make_problem(table_cost({{-0.75}}), indexed({1.0}), indexed({1.0}));
    EXPECT_EQ(lp_oracle(point).primal_value, -0.75);
    EXPECT_EQ(minimize_kontorovich(point).value, -0.75);
}

TEST(LpOracle, Errors) {
    std::mt19937_64 rng(1);
    auto pr = random_table_problem(rng, 5, 6, true);
    try {
        lp_oracle(pr, {4});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SizeCapExceeded);
    }
    pr.target_mass[0] += 0.01;
    try {
        lp_oracle(pr);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InfeasibleMarginals);
    }
}

TEST(Solvers, AgreeWithPermutationOracle) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + trial % 6;
        auto pr = random_table_problem(rng, n, n, true);
        std::vector<std::vector<double>> C(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) C[i][j] = (*pr.matrix)(i, j);
        double truth = oracle::assignment_by_permutations(C);
        EXPECT_NEAR(lp_oracle(pr).primal_value, truth, 1e-12);
        auto r = minimize_kontorovich(pr);
        EXPECT_NEAR(r.value, truth, 1e-12);
        EXPECT_NEAR(plan_correlation(pr, *r.plan), truth, 1e-12);
    }
}

TEST(Solvers, FlowAndSimplexAgreeOnRandomMarginals) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 6; ++trial) {
        auto pr = random_table_problem(rng, 20 + 5 * trial, 30 + 3 * trial, false);
        auto lp = lp_oracle(pr);
        auto r = minimize_kontorovich(pr);
        EXPECT_NEAR(r.value, lp.primal_value, 1e-12);
        EXPECT_GE(r.gap, -1e-9);
        EXPECT_LE(sup_diff_mod_const(r.phi.values, lp.phi.values), 1e-12);
        // plan marginals
        std::vector<double> rows(pr.mu0->size(), 0.0), cols(pr.nu0->size(), 0.0);
        for (const auto& e : lp.plan) {
            rows[e.i] += e.mass;
            cols[e.j] += e.mass;
        }
        for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i], pr.source_mass[i], 1e-14);
        for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_NEAR(cols[j], pr.target_mass[j], 1e-14);
        // psi is the transform of phi and the mean over mu0 is zero
        EXPECT_EQ(r.psi.values, c_transform(r.phi, pr, Direction::SourceToTarget).values);
        EXPECT_NEAR(weighted_sum(pr.source_mass, r.phi.values), 0.0, 1e-12);
    }
}

TEST(Solvers, ZeroCostGivesZeroPotential) {
    auto pr = make_problem(table_cost({{0, 0, 0}, {0, 0, 0}}), indexed({0.5, 0.5}), indexed({0.2, 0.3, 0.5}));
    auto r = minimize_kontorovich(pr);
    EXPECT_EQ(r.value, 0.0);
    for (double v : r.phi.values) EXPECT_EQ(v, 0.0);
}

TEST(Solvers, InvariantUnderShiftOfInitialGuessForDualAscent) {
    std::mt19937_64 rng(9);
    auto pr = random_table_problem(rng, 8, 8, true);
    MinimizeConfig cfg;
    cfg.method = Method::DualAscent;
    auto r = minimize_kontorovich(pr, cfg);
    auto exact = minimize_kontorovich(pr);
    EXPECT_GE(r.value, exact.value - 1e-12);
    EXPECT_LE(r.value, exact.value + 0.05);
}

TEST(Energy, ShiftAndZeroPoint) {
    auto pr = bilinear_on_interval(8);
    pr.ln_norm = 3.0;
    std::vector<double> v(pr.mu0->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = snap_dyadic(0.1 * std::sin(1.0 * i));
    double e0 = ma_energy(pr, pr.source_field(v));
    for (auto& x : v) x += 0.25;
    EXPECT_NEAR(ma_energy(pr, pr.source_field(v)) - e0, 3.0 * 0.25, 1e-14);
    EXPECT_EQ(ma_energy(pr, pr.source_field(std::vector<double>(v.size(), 0.0))), 0.0);
}
