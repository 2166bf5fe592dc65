#pragma once

// Truncated Laurent series in t and the row reduction of series matrices used
// to produce sections with independent leading coefficients.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/linalg.hpp"
#include "kdual/core/rational.hpp"

namespace kdual {

/// sum_{i} coeffs[i] t^{low + i} + O(t^{precision}).
template <class Field = Rational>
struct LaurentSeries {
    std::int64_t low = 0;
    std::vector<Field> coeffs;
    std::int64_t precision = 16;

    static LaurentSeries zero(std::int64_t precision) { return {0, {}, precision}; }

    static LaurentSeries monomial(const Field& c, std::int64_t e, std::int64_t precision) {
        LaurentSeries s{e, {c}, precision};
        s.trim();
        return s;
    }

    static LaurentSeries polynomial(const std::vector<Field>& c, std::int64_t precision) {
        LaurentSeries s{0, c, precision};
        s.trim();
        return s;
    }

    [[nodiscard]] Field coefficient(std::int64_t e) const {
        if (e < low || e >= low + static_cast<std::int64_t>(coeffs.size())) return Field(0);
        return coeffs[static_cast<std::size_t>(e - low)];
    }

    /// Drops coefficients at or beyond the precision and leading/trailing zeros.
    void trim() {
        while (!coeffs.empty() && low + static_cast<std::int64_t>(coeffs.size()) > precision) coeffs.pop_back();
        while (!coeffs.empty() && coeffs.back() == Field(0)) coeffs.pop_back();
        std::size_t lead = 0;
        while (lead < coeffs.size() && coeffs[lead] == Field(0)) ++lead;
        coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
        low += static_cast<std::int64_t>(lead);
        if (coeffs.empty()) low = 0;
    }

    [[nodiscard]] bool is_zero() const { return coeffs.empty(); }

    /// Order of the first nonzero coefficient, if any is known.
    [[nodiscard]] std::optional<std::int64_t> valuation() const {
        if (coeffs.empty()) return std::nullopt;
        return low;
    }

    LaurentSeries shifted(std::int64_t n) const {
        LaurentSeries s = *this;
        if (!s.coeffs.empty()) s.low += n;
        s.precision += n;
        return s;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        LaurentSeries out;
        out.precision = std::min(a.precision, b.precision);
        if (a.is_zero() && b.is_zero()) return zero(out.precision);
        std::int64_t lo = a.is_zero() ? b.low : (b.is_zero() ? a.low : std::min(a.low, b.low));
        std::int64_t hi = out.precision;
        out.low = lo;
        out.coeffs.assign(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo)), Field(0));
        for (std::int64_t e = lo; e < hi; ++e) out.coeffs[static_cast<std::size_t>(e - lo)] = a.coefficient(e) + b.coefficient(e);
        out.trim();
        return out;
    }

    friend LaurentSeries operator-(const LaurentSeries& a) {
        LaurentSeries out = a;
        for (auto& c : out.coeffs) c = -c;
        return out;
    }

    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

    friend LaurentSeries operator*(const Field& c, const LaurentSeries& a) {
        LaurentSeries out = a;
        for (auto& x : out.coeffs) x *= c;
        out.trim();
        return out;
    }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        // known part of a*b: a = A + O(t^pa), b = B + O(t^pb) -> O(t^{min(pa + vb, pb + va)})
        std::int64_t va = a.is_zero() ? a.precision : a.low;
        std::int64_t vb = b.is_zero() ? b.precision : b.low;
        LaurentSeries out;
        out.precision = std::min(a.precision + vb, b.precision + va);
        if (a.is_zero() || b.is_zero()) return zero(out.precision);
        out.low = a.low + b.low;
        out.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, Field(0));
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs.size(); ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
        out.trim();
        return out;
    }

    /// Equality of known coefficients up to the smaller precision.
    [[nodiscard]] bool agrees_with(const LaurentSeries& other) const {
        std::int64_t p = std::min(precision, other.precision);
        std::int64_t lo = std::min(is_zero() ? p : low, other.is_zero() ? p : other.low);
        for (std::int64_t e = lo; e < p; ++e)
            if (coefficient(e) != other.coefficient(e)) return false;
        return true;
    }
};

template <class Field = Rational>
using SeriesMatrix = std::vector<std::vector<LaurentSeries<Field>>>;

template <class Field>
SeriesMatrix<Field> multiply(const SeriesMatrix<Field>& a, const SeriesMatrix<Field>& b, std::int64_t precision) {
    const std::size_t n = a.size(), m = b.empty() ? 0 : b.front().size(), inner = b.size();
    SeriesMatrix<Field> out(n, std::vector<LaurentSeries<Field>>(m, LaurentSeries<Field>::zero(precision)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            LaurentSeries<Field> acc = LaurentSeries<Field>::zero(1 << 30);
            for (std::size_t k = 0; k < inner; ++k) acc = acc + a[i][k] * b[k][j];
            out[i][j] = acc;
        }
    return out;
}

template <class Field>
SeriesMatrix<Field> identity_series(std::size_t n, std::int64_t precision) {
    SeriesMatrix<Field> id(n, std::vector<LaurentSeries<Field>>(n, LaurentSeries<Field>::zero(precision)));
    for (std::size_t i = 0; i < n; ++i) id[i][i] = LaurentSeries<Field>::monomial(Field(1), 0, precision);
    return id;
}

struct SeriesReduceConfig {
    std::int64_t truncation = 16;    ///< default precision for polynomial input
    std::int64_t working_depth = 8;  ///< a row vanishing through this depth counts as zero
};

template <class Field = Rational>
struct RowReduction {
    /// transform * original == reduced (exactly, up to truncation). Row i of the
    /// transform equals t^{-shift[i]} times a power-series row.
    SeriesMatrix<Field> transform;
    SeriesMatrix<Field> reduced;
    std::vector<std::int64_t> shift;
    std::vector<double> mu;                  ///< exponents after the shifts, in output row order
    std::vector<std::size_t> source_row;     ///< original index of each output row
    std::vector<bool> pivot;                 ///< output rows with independent leading vectors
    std::size_t pivot_count = 0;
    /// Pivot rows completed by unit rows to a J x J matrix with invertible constant term.
    SeriesMatrix<Field> basis_change;
};

/// Sorts rows by decreasing mu, eliminates leading coefficients against earlier rows,
/// divides rows with vanishing leading vector by t (mu decreases by 1), and repeats.
template <class Field = Rational>
RowReduction<Field> series_row_reduce(const SeriesMatrix<Field>& system, const std::vector<double>& mu,
                                      const SeriesReduceConfig& cfg = {}) {
    const std::size_t rows = system.size();
    require(mu.size() == rows, ErrorCode::DimensionMismatch, "one exponent per row expected");
    const std::size_t cols = rows ? system.front().size() : 0;
    for (const auto& r : system)
        require(r.size() == cols, ErrorCode::DimensionMismatch, "ragged series matrix");

    struct Row {
        std::vector<LaurentSeries<Field>> a;
        std::vector<LaurentSeries<Field>> t;
        double mu;
        std::int64_t shift = 0;
        std::size_t origin;
        bool zero = false;
        std::int64_t depth = 0;  ///< t-divisions since normalization
    };
    std::vector<Row> work;
    auto id = identity_series<Field>(rows, cfg.truncation);
    for (std::size_t i = 0; i < rows; ++i) work.push_back({system[i], id[i], mu[i], 0, i, false});

    auto divide = [&](Row& r, std::int64_t n) {
        for (auto& x : r.a) x = x.shifted(-n);
        for (auto& x : r.t) x = x.shifted(-n);
        r.shift += n;
        r.mu -= static_cast<double>(n);
    };
    auto row_valuation = [&](const Row& r) -> std::optional<std::int64_t> {
        std::optional<std::int64_t> v;
        for (const auto& x : r.a)
            if (auto xv = x.valuation()) v = v ? std::min(*v, *xv) : *xv;
        return v;
    };
    auto row_precision = [&](const Row& r) {
        std::int64_t p = std::numeric_limits<std::int64_t>::max();
        for (const auto& x : r.a) p = std::min(p, x.precision);
        return p;
    };
    // A row whose leading vector keeps vanishing through the working depth lies in
    // the span of the pivot rows to that order and is dropped.
    auto mark_if_zero = [&](Row& r) {
        auto v = row_valuation(r);
        std::int64_t reach = r.depth + (v ? *v : row_precision(r));
        if (v && reach < cfg.working_depth) return false;
        require(reach >= cfg.working_depth, ErrorCode::TruncationExhausted,
                "row reduction needs more t-depth than available");
        r.zero = true;
        return true;
    };

    // normalize: leading order 0 for every nonzero row
    for (auto& r : work) {
        auto v = row_valuation(r);
        if (!v) {
            mark_if_zero(r);
            continue;
        }
        divide(r, *v);
    }

    std::vector<std::size_t> order(rows);
    bool changed = true;
    std::size_t guard = 0;
    while (changed) {
        changed = false;
        require(++guard < 100000, ErrorCode::TruncationExhausted, "row reduction does not terminate");
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            if (work[x].zero != work[y].zero) return !work[x].zero;
            return work[x].mu > work[y].mu;
        });
        std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, column)
        for (std::size_t idx : order) {
            Row& r = work[idx];
            if (r.zero) continue;
            for (auto [p, col] : pivots) {
                Field c = r.a[col].coefficient(0);
                if (c == Field(0)) continue;
                Field f = c / work[p].a[col].coefficient(0);
                for (std::size_t j = 0; j < cols; ++j) r.a[j] = r.a[j] - f * work[p].a[j];
                for (std::size_t j = 0; j < rows; ++j) r.t[j] = r.t[j] - f * work[p].t[j];
            }
            std::optional<std::size_t> lead;
            for (std::size_t j = 0; j < cols && !lead; ++j)
                if (r.a[j].coefficient(0) != Field(0)) lead = j;
            if (lead) {
                pivots.emplace_back(idx, *lead);
                continue;
            }
            if (!mark_if_zero(r)) {
                auto v = row_valuation(r);
                require(*v > 0, ErrorCode::InvariantViolation, "negative order after elimination");
                divide(r, *v);
                r.depth += *v;
            }
            changed = true;
            break;
        }
    }

    RowReduction<Field> out;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (work[x].zero != work[y].zero) return !work[x].zero;
        return work[x].mu > work[y].mu;
    });
    std::vector<bool> col_used(cols, false);
    for (std::size_t idx : order) {
        const Row& r = work[idx];
        out.transform.push_back(r.t);
        out.reduced.push_back(r.a);
        out.shift.push_back(r.shift);
        out.mu.push_back(r.mu);
        out.source_row.push_back(r.origin);
        out.pivot.push_back(!r.zero);
        if (!r.zero) {
            ++out.pivot_count;
            out.basis_change.push_back(r.a);
            for (std::size_t j = 0; j < cols; ++j)
                if (r.a[j].coefficient(0) != Field(0)) {
                    col_used[j] = true;
                    break;
                }
        }
    }
    require(out.pivot_count <= std::min(rows, cols), ErrorCode::InvariantViolation, "too many pivots");
    for (std::size_t j = 0; j < cols; ++j) {
        if (out.basis_change.size() == cols) break;
        // complete with unit rows on columns keeping the constant term invertible
        std::vector<LaurentSeries<Field>> unit(cols, LaurentSeries<Field>::zero(cfg.truncation));
        unit[j] = LaurentSeries<Field>::monomial(Field(1), 0, cfg.truncation);
        linalg::Matrix<Field> lead;
        for (const auto& r : out.basis_change) {
            std::vector<Field> v;
            for (const auto& x : r) v.push_back(x.coefficient(0));
            lead.push_back(v);
        }
        std::vector<Field> u(cols, Field(0));
        u[j] = Field(1);
        lead.push_back(u);
        if (linalg::rank(lead) == lead.size()) out.basis_change.push_back(unit);
    }
    return out;
}

/// Constant-term matrix of a power-series matrix.
template <class Field>
linalg::Matrix<Field> constant_term(const SeriesMatrix<Field>& m) {
    linalg::Matrix<Field> out;
    for (const auto& r : m) {
        std::vector<Field> v;
        for (const auto& x : r) v.push_back(x.coefficient(0));
        out.push_back(v);
    }
    return out;
}

}  // namespace kdual
