#include <gtest/gtest.h>

#include <random>

#include "kdual/series.hpp"

using namespace kdual;

namespace {

using S = LaurentSeries<Rational>;

S poly(std::vector<long long> c, std::int64_t prec = 16) {
    std::vector<Rational> r;
    for (auto x : c) r.emplace_back(x);
    return S::polynomial(r, prec);
}

// schoolbook product of dense coefficient lists, independent of LaurentSeries::operator*
std::vector<Rational> convolve(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> out(a.size() + b.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

void expect_transform_identity(const SeriesMatrix<Rational>& a, const RowReduction<Rational>& r) {
    auto prod = multiply(r.transform, a, 16);
    for (std::size_t i = 0; i < prod.size(); ++i)
        for (std::size_t j = 0; j < prod[i].size(); ++j) EXPECT_TRUE(prod[i][j].agrees_with(r.reduced[i][j]));
    // t^{shift} * transform has an invertible constant term
    SeriesMatrix<Rational> scaled = r.transform;
    for (std::size_t i = 0; i < scaled.size(); ++i)
        for (auto& x : scaled[i]) x = x.shifted(r.shift[i]);
    for (auto& row : scaled)
        for (auto& x : row) ASSERT_GE(x.valuation().value_or(0), 0);
    EXPECT_NE(linalg::determinant(constant_term(scaled)), Rational(0));
}

}  // namespace

TEST(Series, ProductMatchesConvolution) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Rational> a(5), b(4);
        for (auto& x : a) x = c(rng);
        for (auto& x : b) x = c(rng);
        auto p = S::polynomial(a, 100) * S::polynomial(b, 100);
        auto ref = convolve(a, b);
        for (std::size_t e = 0; e < ref.size(); ++e) EXPECT_EQ(p.coefficient(static_cast<std::int64_t>(e)), ref[e]);
    }
}

TEST(Series, PrecisionOfProduct) {
    auto p = poly({0, 1}, 10) * poly({1}, 10);
    EXPECT_EQ(p.precision, 10);
    auto shifted = poly({0, 0, 1}, 10).shifted(-2);
    EXPECT_EQ(shifted.valuation(), 0);
    EXPECT_EQ(shifted.precision, 8);
}

TEST(SeriesRowReduce, ProportionalRowEliminated) {
    SeriesMatrix<Rational> a{{poly({1}), poly({0, 1})}, {poly({0, 1}), poly({0, 0, 1})}};
    auto r = series_row_reduce(a, {0.0, 0.0});
    EXPECT_EQ(r.pivot_count, 1u);
    expect_transform_identity(a, r);
}

TEST(SeriesRowReduce, IdentityStaysIdentity) {
    SeriesMatrix<Rational> a{{poly({1}), poly({0})}, {poly({0}), poly({1})}};
    auto r = series_row_reduce(a, {1.0, 0.0});
    EXPECT_EQ(r.pivot_count, 2u);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            std::size_t src = r.source_row[i];
            EXPECT_TRUE(r.transform[i][j].agrees_with(src == j ? poly({1}) : poly({0})));
        }
    EXPECT_EQ(r.mu, (std::vector<double>{1.0, 0.0}));
    expect_transform_identity(a, r);
}

TEST(SeriesRowReduce, ReorderedProportionalRows) {
    SeriesMatrix<Rational> a{{poly({0, 1}), poly({0, 1})}, {poly({1}), poly({1})}};
    auto r = series_row_reduce(a, {0.0, 0.0});
    EXPECT_EQ(r.pivot_count, 1u);
    expect_transform_identity(a, r);
}

TEST(SeriesRowReduce, ShiftsExponentsByIntegers) {
    // second row agrees with the first to order t^2: leading vector vanishes twice
    SeriesMatrix<Rational> a{{poly({1}), poly({2})}, {poly({1, 0, 3}), poly({2, 0, 1})}};
    std::vector<double> mu{0.5, 0.25};
    auto r = series_row_reduce(a, mu);
    EXPECT_EQ(r.pivot_count, 2u);
    for (std::size_t i = 0; i < r.mu.size(); ++i) {
        double d = mu[r.source_row[i]] - r.mu[i];
        EXPECT_EQ(d, std::round(d));
        EXPECT_GE(d, 0.0);
    }
    expect_transform_identity(a, r);
    EXPECT_NE(linalg::determinant(constant_term(r.basis_change)), Rational(0));
}

TEST(SeriesRowReduce, RandomSystemsSatisfyIdentity) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> c(-2, 2), dim(1, 4);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t rows = static_cast<std::size_t>(dim(rng)), cols = static_cast<std::size_t>(dim(rng));
        SeriesMatrix<Rational> a(rows);
        std::vector<double> mu(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            mu[i] = c(rng) * 0.5;
            for (std::size_t j = 0; j < cols; ++j) a[i].push_back(poly({c(rng), c(rng), c(rng)}));
        }
        auto r = series_row_reduce(a, mu);
        EXPECT_LE(r.pivot_count, std::min(rows, cols));
        // pivot leading vectors are independent
        linalg::Matrix<Rational> lead;
        for (std::size_t i = 0; i < r.reduced.size(); ++i)
            if (r.pivot[i]) {
                std::vector<Rational> v;
                for (auto& x : r.reduced[i]) v.push_back(x.coefficient(0));
                lead.push_back(v);
            }
        EXPECT_EQ(linalg::rank(lead), r.pivot_count);
        SeriesMatrix<Rational> prod = multiply(r.transform, a, 16);
        for (std::size_t i = 0; i < prod.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j) EXPECT_TRUE(prod[i][j].agrees_with(r.reduced[i][j]));
        EXPECT_EQ(r.basis_change.size(), cols);
        EXPECT_NE(linalg::determinant(constant_term(r.basis_change)), Rational(0));
    }
}

TEST(SeriesRowReduce, TruncationExhausted) {
    // rows agree through the whole (short) precision
    SeriesMatrix<Rational> a{{poly({1}, 3), poly({1}, 3)}, {poly({1}, 3), poly({1}, 3)}};
    try {
        series_row_reduce(a, {0.0, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TruncationExhausted);
    }
}
