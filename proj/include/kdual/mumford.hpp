#pragma once

// Mumford data for abelian degenerations: a strictly convex piecewise-linear
// function Phi with integral slopes and Gamma-periodicity, and the valuations of
// its theta functions. Rank 1 is explicit; higher rank is a product of rank-1 factors.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/rational.hpp"

namespace kdual {

/// Rank-1 data: Gamma = period * Z, slopes s_0 < ... < s_{period-1} < s_0 + shift on
/// [k, k+1] for k = 0..period-1, and s_{k+period} = s_k + shift. Phi(0) = 0.
struct Rank1Mumford {
    std::int64_t period = 1;
    std::vector<std::int64_t> slopes{1};
    std::int64_t shift = 1;

    void validate() const {
        require(period >= 1, ErrorCode::InvariantViolation, "period must be positive");
        require(static_cast<std::int64_t>(slopes.size()) == period, ErrorCode::InvariantViolation,
                "one slope per unit interval of the period expected");
        require(shift >= 1, ErrorCode::InvariantViolation, "shift must be positive for strict convexity");
        for (std::size_t i = 1; i < slopes.size(); ++i)
            require(slopes[i - 1] < slopes[i], ErrorCode::InvariantViolation, "slopes must increase strictly");
        require(slopes.back() < slopes.front() + shift, ErrorCode::InvariantViolation,
                "slope jump across the period boundary must be positive");
        for (std::int64_t m = -3 * period; m <= 3 * period; ++m)
            require(phi_int(m + period) - phi_int(m) == alpha(m), ErrorCode::InvariantViolation,
                    "periodicity Phi(m + gamma) = Phi(m) + alpha_gamma(m) fails");
    }

    /// Slope of Phi on [k, k+1].
    [[nodiscard]] std::int64_t slope(std::int64_t k) const {
        std::int64_t q = floor_div(k, period);
        std::int64_t r = k - q * period;
        return slopes[static_cast<std::size_t>(r)] + q * shift;
    }

    [[nodiscard]] std::int64_t phi_period() const {
        std::int64_t s = 0;
        for (auto v : slopes) s += v;
        return s;
    }

    /// alpha_gamma(m) for the generator gamma = period: Phi(m + period) - Phi(m).
    [[nodiscard]] std::int64_t alpha(std::int64_t m) const { return shift * m + phi_period(); }

    [[nodiscard]] std::int64_t phi_int(std::int64_t k) const {
        std::int64_t q = floor_div(k, period);
        std::int64_t r = k - q * period;
        std::int64_t base = 0;
        for (std::int64_t i = 0; i < r; ++i) base += slopes[static_cast<std::size_t>(i)];
        // sum_{i<q} alpha(r + i*period), valid for negative q as well
        return base + q * (shift * r + phi_period()) + shift * period * q * (q - 1) / 2;
    }

    [[nodiscard]] Rational phi(const Rational& m) const {
        Rational fl = floor(m);
        std::int64_t k = to_int64(fl);
        return Rational(phi_int(k)) + Rational(slope(k)) * (m - fl);
    }

    [[nodiscard]] double phi(double m) const {
        double fl = std::floor(m);
        auto k = static_cast<std::int64_t>(fl);
        return static_cast<double>(phi_int(k)) + static_cast<double>(slope(k)) * (m - fl);
    }

    /// x*m + Phi(m): the valuation of the monomial indexed by m at the skeleton point x (level 1).
    [[nodiscard]] double objective(double x, double m) const { return x * m + phi(m); }

    /// min over integers j of g(j) = objective(x, p + j*period); g is convex in j.
    /// Returns the minimum and the number of steps walked from the start.
    struct WindowMin {
        double value;
        std::int64_t argmin;
        std::int64_t radius;
    };

    [[nodiscard]] WindowMin min_over_gamma(double x, double p, std::int64_t max_radius = 1 << 20) const {
        auto g = [&](std::int64_t j) { return objective(x, p + static_cast<double>(j * period)); };
        // start near the continuous minimizer: slope(k) + x changes sign
        std::int64_t j = start_index(x, p);
        std::int64_t start = j;
        double cur = g(j);
        while (true) {
            double left = g(j - 1), right = g(j + 1);
            if (left < cur) {
                --j;
                cur = left;
            } else if (right < cur) {
                ++j;
                cur = right;
            } else {
                break;
            }
            require(std::llabs(j - start) <= max_radius, ErrorCode::WindowNotConverged,
                    "theta window did not reach the minimum");
        }
        return {cur, j, std::llabs(j - start) + 1};
    }

    /// Minimum over an explicit window [center - radius, center + radius]; certified when the
    /// minimum is attained strictly inside (convexity then makes it global).
    [[nodiscard]] double min_in_window(double x, double p, std::int64_t radius) const {
        std::int64_t c = start_index(x, p);
        double best = std::numeric_limits<double>::infinity();
        std::int64_t arg = c;
        for (std::int64_t j = c - radius; j <= c + radius; ++j) {
            double v = objective(x, p + static_cast<double>(j * period));
            if (v < best) {
                best = v;
                arg = j;
            }
        }
        require(arg > c - radius && arg < c + radius, ErrorCode::WindowNotConverged,
                "minimum on the window boundary; enlarge the window");
        return best;
    }

    /// min over all real m of x*m + Phi(m), attained at an integer breakpoint.
    [[nodiscard]] double frame(double x) const { return min_over_gamma_int(x); }

    [[nodiscard]] std::int64_t start_index(double x, double p) const {
        // breakpoint k where slope(k-1) <= -x <= slope(k); estimate via average slope growth
        double k = -(x + static_cast<double>(slopes.front())) * static_cast<double>(period) /
                   static_cast<double>(shift);
        return static_cast<std::int64_t>(std::floor((k - p) / static_cast<double>(period)));
    }

private:
    [[nodiscard]] double min_over_gamma_int(double x) const {
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 0; r < period; ++r)
            best = std::min(best, min_over_gamma(x, static_cast<double>(r)).value);
        return best;
    }
};

/// Mumford data of rank n as a product of rank-1 factors: Phi(m) = sum_i Phi_i(m_i).
struct MumfordData {
    std::vector<Rank1Mumford> factors;

    [[nodiscard]] std::size_t rank() const { return factors.size(); }

    void validate() const {
        require(!factors.empty(), ErrorCode::InvariantViolation, "Mumford data needs rank >= 1");
        for (const auto& f : factors) f.validate();
    }

    /// (L^n) for the polarization: n! * (covolume of Gamma) = n! * prod period_i.
    [[nodiscard]] double ln_norm() const {
        double v = 1.0;
        for (std::size_t i = 0; i < factors.size(); ++i) v *= static_cast<double>(factors[i].period) * static_cast<double>(i + 1);
        return v;
    }

    /// Level-1 normalized theta valuation: min_gamma [<x, p+gamma> + Phi(p+gamma)] - min_m [<x,m> + Phi(m)].
    [[nodiscard]] double normalized_valuation(const std::vector<double>& x, const std::vector<double>& p) const {
        require(x.size() == rank() && p.size() == rank(), ErrorCode::DimensionMismatch, "rank mismatch");
        double v = 0.0;
        for (std::size_t i = 0; i < rank(); ++i)
            v += factors[i].min_over_gamma(x[i], p[i]).value - factors[i].frame(x[i]);
        return v;
    }

    static MumfordData standard(std::size_t rank = 1) {
        MumfordData d;
        d.factors.assign(rank, Rank1Mumford{});
        return d;
    }
};

}  // namespace kdual
