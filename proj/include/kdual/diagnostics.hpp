#pragma once

// Post-solution checks: marginal residuals of plans and argmax maps, discrete real Monge-Ampere
// residuals on a face, Legendre mirror duality between a problem and its transpose, and the
// convergence of finite-t Fubini-Study potentials of theta functions to the NA potential.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/minimize.hpp"
#include "kdual/mumford.hpp"
#include "kdual/transport.hpp"

namespace kdual {

struct Residual {
    double linf = 0.0;
    double l1 = 0.0;
};

/// Target marginal of the plan (or, without a plan or when forced, of the argmax map of mu0)
/// against W nu0.
inline Residual pushforward_residual(const TransportResult& result, const TransportProblem& pr, bool use_plan = true) {
    std::vector<double> pushed(pr.nu0->size(), 0.0);
    if (use_plan && result.plan) {
        for (const auto& e : *result.plan) pushed[e.j] += e.mass;
    } else {
        require(result.psi.size() == pr.nu0->size(), ErrorCode::NoPlanAvailable, "result has neither a plan nor psi");
        std::vector<std::size_t> arg;
        c_transform_values(*pr.matrix, result.psi.values, Direction::TargetToSource, &arg);
        for (std::size_t i = 0; i < arg.size(); ++i) pushed[arg[i]] += pr.source_mass[i];
    }
    Residual r;
    std::vector<double> diff(pushed.size());
    for (std::size_t j = 0; j < pushed.size(); ++j) {
        diff[j] = std::abs(pushed[j] - pr.target_mass[j]);
        r.linf = std::max(r.linf, diff[j]);
    }
    r.l1 = pairwise_sum(diff);
    return r;
}

struct MaResidual {
    std::vector<double> density;   ///< discrete Monge-Ampere density per interior cell
    std::vector<double> residual;  ///< density / mean density - 1; NaN where flagged
    std::vector<char> degenerate;  ///< non-positive Hessian determinant
    double max_abs = 0.0;          ///< over non-degenerate cells
    std::size_t flagged = 0;
};

namespace detail {

inline MaResidual finish_ma(std::vector<double> density, double cell_volume, double degenerate_tol) {
    MaResidual r;
    r.density = std::move(density);
    r.degenerate.assign(r.density.size(), 0);
    r.residual.assign(r.density.size(), std::numeric_limits<double>::quiet_NaN());
    double scale = 0.0;
    for (double d : r.density) scale = std::max(scale, std::abs(d));
    const double mean = pairwise_sum(r.density) * cell_volume / (cell_volume * static_cast<double>(r.density.size()));
    for (std::size_t k = 0; k < r.density.size(); ++k) {
        if (r.density[k] <= degenerate_tol * std::max(1.0, scale) || mean <= 0.0) {
            r.degenerate[k] = 1;
            ++r.flagged;
            continue;
        }
        r.residual[k] = r.density[k] / mean - 1.0;
        r.max_abs = std::max(r.max_abs, std::abs(r.residual[k]));
    }
    return r;
}

}  // namespace detail

/// 1D: u_0..u_N at spacing h along a face; the density at interior node k is the second difference.
inline MaResidual ma_residual_1d(const std::vector<double>& u, double h, double degenerate_tol = 1e-9) {
    require(u.size() >= 3 && h > 0.0, ErrorCode::InvariantViolation, "need at least one interior node");
    std::vector<double> d(u.size() - 2);
    for (std::size_t k = 1; k + 1 < u.size(); ++k) d[k - 1] = (u[k - 1] - 2.0 * u[k] + u[k + 1]) / (h * h);
    return detail::finish_ma(std::move(d), h, degenerate_tol);
}

/// 2D on the triangle grid {(a,b): a + b <= N} of a face with edge vectors e1, e2 of unit lattice
/// volume: naive determinant of the mixed second differences at interior nodes.
inline MaResidual ma_residual_2d(const std::vector<std::vector<double>>& u, double h, double degenerate_tol = 1e-9) {
    const std::size_t N = u.size() - 1;
    std::vector<double> d;
    for (std::size_t a = 1; a < N; ++a)
        for (std::size_t b = 1; a + b < N; ++b) {
            double uaa = (u[a - 1][b] - 2.0 * u[a][b] + u[a + 1][b]) / (h * h);
            double ubb = (u[a][b - 1] - 2.0 * u[a][b] + u[a][b + 1]) / (h * h);
            double uab = (u[a + 1][b + 1] - u[a + 1][b - 1] - u[a - 1][b + 1] + u[a - 1][b - 1]) / (4.0 * h * h);
            d.push_back(uaa * ubb - uab * uab);
        }
    require(!d.empty(), ErrorCode::InvariantViolation, "face grid has no interior node");
    return detail::finish_ma(std::move(d), h * h, degenerate_tol);
}

/// Values of a potential along one top face of its grid, ordered by the barycentric grid.
/// For 1D faces this is u_0..u_N from the first to the second vertex.
inline std::vector<double> face_values_1d(const PotentialField& phi, std::size_t top_face_slot = 0) {
    require(phi.support && top_face_slot < phi.support->face_grids.size(), ErrorCode::GridMismatch,
            "potential has no grid on that face");
    const auto& fg = phi.support->face_grids[top_face_slot];
    std::vector<double> out(static_cast<std::size_t>(fg.steps) + 1);
    for (std::size_t k = 0; k < fg.barycentric.size(); ++k) {
        require(fg.barycentric[k].size() == 2, ErrorCode::DimensionMismatch, "face is not one-dimensional");
        out[static_cast<std::size_t>(fg.barycentric[k][1])] = phi.values[fg.point_index[k]];
    }
    return out;
}

inline MaResidual ma_residual(const PotentialField& phi, std::size_t top_face_slot = 0) {
    const auto& fg = phi.support->face_grids.at(top_face_slot);
    const double h = 1.0 / static_cast<double>(fg.steps);
    if (!fg.barycentric.empty() && fg.barycentric[0].size() == 2) return ma_residual_1d(face_values_1d(phi, top_face_slot), h);
    require(!fg.barycentric.empty() && fg.barycentric[0].size() == 3, ErrorCode::DimensionMismatch,
            "discrete Monge-Ampere is shipped for faces of dimension <= 2");
    std::vector<std::vector<double>> u(static_cast<std::size_t>(fg.steps) + 1,
                                       std::vector<double>(static_cast<std::size_t>(fg.steps) + 1, 0.0));
    for (std::size_t k = 0; k < fg.barycentric.size(); ++k)
        u[static_cast<std::size_t>(fg.barycentric[k][1])][static_cast<std::size_t>(fg.barycentric[k][2])] =
            phi.values[fg.point_index[k]];
    return ma_residual_2d(u, h);
}

struct DualityReport {
    double functional_gap = 0.0;
    double potential_gap = 0.0;
    double precondition_residual = 0.0;  ///< max |c(x,p) - c_dual(p,x)| over the grid pairs
};

/// F(phi0) against F_dual(phi0^c), and psi0 against phi0^c up to the best constant.
inline DualityReport duality_check(const TransportProblem& pr, const TransportProblem& dual, const TransportResult& res,
                                   const TransportResult& dual_res) {
    const auto& c = *pr.matrix;
    const auto& cd = *dual.matrix;
    require(c.rows == cd.cols && c.cols == cd.rows, ErrorCode::GridMismatch, "dual problem must transpose the grids");
    DualityReport rep;
    for (std::size_t i = 0; i < c.rows; ++i)
        for (std::size_t j = 0; j < c.cols; ++j)
            rep.precondition_residual = std::max(rep.precondition_residual, std::abs(c(i, j) - cd(j, i)));
    auto phic = c_transform_values(c, res.phi.values, Direction::SourceToTarget);
    double f = kontorovich_value(pr, res.phi);
    double fd = kontorovich_value(dual, dual.source_field(phic));
    rep.functional_gap = std::abs(f - fd);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t j = 0; j < phic.size(); ++j) {
        double d = dual_res.phi.values[j] - phic[j];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    rep.potential_gap = (hi - lo) / 2.0;
    return rep;
}

/// Transpose of a problem: source and target swapped and c_dual(p, x) = c(x, p). Requires W = 1.
inline TransportProblem mirror_problem(const TransportProblem& pr) {
    for (double w : pr.target_weight)
        require(w == 1.0, ErrorCode::InvariantViolation, "mirror problem needs a unit weight");
    return make_problem(swapped(pr.cost), *pr.nu0, *pr.mu0, pr.ln_norm);
}

// ---------------------------------------------------------------------------
// Hybrid convergence of theta-function Fubini-Study potentials

struct HybridConfig {
    /// Terms outside the window must be below this fraction of the leading term.
    double tail_tol = 1e-12;
    /// Extra gamma steps beyond the certified window (for window-doubling checks).
    std::int64_t extra_window = 0;
    /// c_p per label index (empty: all zero).
    std::vector<double> offsets;
};

struct HybridSample {
    double t = 0.0;
    double log_inv_t = 0.0;  ///< |log |t||
    double sup_error = 0.0;
    double argmax_x = 0.0;
    std::int64_t window = 0;  ///< largest window radius used
};

namespace detail {

/// log sum_{gamma} |t|^{l(Phi(m) + x m)} over m = p + period*gamma for a rank-1 factor, summed around
/// the minimizing gamma with max-subtraction. Returns the log and the radius used.
inline std::pair<double, std::int64_t> log_theta_rank1(const Rank1Mumford& f, std::int64_t l, double p, double x, double L,
                                                       const HybridConfig& cfg) {
    auto a = [&](std::int64_t g) {
        double m = p + static_cast<double>(g * f.period);
        return static_cast<double>(l) * (f.phi(m) + x * m);
    };
    auto w = f.min_over_gamma(x, p);
    const std::int64_t g0 = w.argmin;
    const double amin = a(g0);
    const double cut = -std::log(cfg.tail_tol);
    // exponent growth is convex in gamma, so once a term is below the cut every further one is too
    std::int64_t r = 1;
    while (L * (a(g0 - r) - amin) <= cut || L * (a(g0 + r) - amin) <= cut) {
        ++r;
        require(r < (1 << 20), ErrorCode::TruncationInsufficient, "theta window failed to reach the tail bound");
    }
    r += cfg.extra_window;
    std::vector<double> terms;
    for (std::int64_t g = g0 - r; g <= g0 + r; ++g) terms.push_back(std::exp(-L * (a(g) - amin)));
    return {-L * amin + std::log(pairwise_sum(terms)), r};
}

}  // namespace detail

/// NA potential max_p (-val_x(theta_p^l) - c_p) / l at a skeleton point x.
inline double na_fs_potential(const MumfordData& data, std::int64_t l, const Point& x, const std::vector<double>& offsets = {}) {
    const std::size_t n = data.rank();
    std::vector<std::int64_t> idx(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t label = 0;
    while (true) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = static_cast<double>(idx[i]) / static_cast<double>(l);
            v += static_cast<double>(l) * data.factors[i].min_over_gamma(x[i], p).value;
        }
        double cp = offsets.empty() ? 0.0 : offsets.at(label);
        best = std::max(best, (-v - cp) / static_cast<double>(l));
        ++label;
        std::size_t i = 0;
        while (i < n && ++idx[i] == l * data.factors[i].period) idx[i++] = 0;
        if (i == n) break;
    }
    return best;
}

/// (1/(l |log t|)) max_p (log|theta_p(z; t)| - c_p |log t|) along |z| = |t|^x.
inline std::pair<double, std::int64_t> finite_t_fs_potential(const MumfordData& data, std::int64_t l, const Point& x, double t,
                                                             const HybridConfig& cfg = {}) {
    require(t > 0.0 && t < 1.0, ErrorCode::InvariantViolation, "need 0 < |t| < 1");
    const double L = -std::log(t);
    const std::size_t n = data.rank();
    std::vector<std::int64_t> idx(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t radius = 0;
    std::size_t label = 0;
    while (true) {
        double lg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = static_cast<double>(idx[i]) / static_cast<double>(l);
            auto [v, r] = detail::log_theta_rank1(data.factors[i], l, p, x[i], L, cfg);
            lg += v;
            radius = std::max(radius, r);
        }
        double cp = cfg.offsets.empty() ? 0.0 : cfg.offsets.at(label);
        best = std::max(best, (lg - cp * L) / (static_cast<double>(l) * L));
        ++label;
        std::size_t i = 0;
        while (i < n && ++idx[i] == l * data.factors[i].period) idx[i++] = 0;
        if (i == n) break;
    }
    return {best, radius};
}

inline std::vector<HybridSample> hybrid_potential_curve(const MumfordData& data, std::int64_t l, const std::vector<double>& ts,
                                                        const std::vector<Point>& grid, const HybridConfig& cfg = {}) {
    data.validate();
    require(l >= 1, ErrorCode::MissingLevel, "level must be positive");
    require(!grid.empty(), ErrorCode::EmptyGrid, "empty skeleton grid");
    std::vector<HybridSample> out;
    for (double t : ts) {
        HybridSample s;
        s.t = t;
        s.log_inv_t = -std::log(t);
        std::vector<double> err(grid.size());
        std::vector<std::int64_t> rad(grid.size());
        parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                auto [v, r] = finite_t_fs_potential(data, l, grid[k], t, cfg);
                err[k] = std::abs(v - na_fs_potential(data, l, grid[k], cfg.offsets));
                rad[k] = r;
            }
        }, 64);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (err[k] > s.sup_error) {
                s.sup_error = err[k];
                s.argmax_x = grid[k][0];
            }
            s.window = std::max(s.window, rad[k]);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace kdual
