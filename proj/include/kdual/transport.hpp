#pragma once

// Discrete Kontorovich dual problem on quadrature grids: c-transforms, the class P_c,
// the functional F, the Monge-Ampere energy and relative-volume Riemann sums.
//
// Costs and potentials are kept on the dyadic lattice 2^-40 (see core/numeric.hpp) so that
// c - f is computed exactly and the transform identities hold bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/cost.hpp"
#include "kdual/polyhedral.hpp"

namespace kdual {

/// Dense row-major cost matrix c(x_i, p_j), snapped to the dyadic lattice.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline CostMatrix make_cost_matrix(const CostFunction& cost, const DiscreteMeasure& source, const DiscreteMeasure& target) {
    require(source.size() > 0 && target.size() > 0, ErrorCode::EmptyGrid, "cost matrix needs non-empty grids");
    CostMatrix m{source.size(), target.size(), std::vector<double>(source.size() * target.size())};
    parallel_for(m.rows, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = 0; j < m.cols; ++j)
                m.data[i * m.cols + j] = snap_dyadic(cost(source.coords[i], target.coords[j]));
    }, 16);
    return m;
}

struct PotentialField {
    std::shared_ptr<const IntegralPolyhedralComplex> complex;
    std::shared_ptr<const DiscreteMeasure> support;
    std::vector<double> values;
    /// Index of the opposite-side grid point attaining the sup, when produced by a transform.
    std::vector<std::size_t> argmax;

    [[nodiscard]] std::size_t size() const { return values.size(); }

    [[nodiscard]] double sup_norm() const {
        double s = 0.0;
        for (double v : values) {
            require(std::isfinite(v), ErrorCode::InvariantViolation, "potential has a non-finite value");
            s = std::max(s, std::abs(v));
        }
        return s;
    }

    [[nodiscard]] double mean(const std::vector<double>& weights) const {
        return weighted_sum(weights, values) / pairwise_sum(weights);
    }
};

struct TransportProblem {
    CostFunction cost;
    std::shared_ptr<const DiscreteMeasure> mu0;
    std::shared_ptr<const DiscreteMeasure> nu0;
    /// W(p); empty means W = 1.
    std::function<double(const Point&)> weight;
    double ln_norm = 1.0;

    std::shared_ptr<const CostMatrix> matrix;
    std::vector<double> source_mass;      ///< mu0 weights
    std::vector<double> target_mass;      ///< W(p_j) nu0_j
    std::vector<double> target_weight;    ///< W(p_j)

    void validate() const {
        require(mu0 && nu0 && matrix, ErrorCode::InvariantViolation, "problem not built; use make_problem");
        require(std::abs(pairwise_sum(source_mass) - 1.0) <= 1e-9, ErrorCode::InvariantViolation, "mu0 must have mass 1");
        require(std::abs(pairwise_sum(target_mass) - 1.0) <= 1e-9, ErrorCode::InvariantViolation,
                "integral of W against nu0 must be 1");
        require(ln_norm > 0.0, ErrorCode::InvariantViolation, "(L^n) must be positive");
        for (double w : target_weight) require(w >= 0.0, ErrorCode::InvariantViolation, "weight must be non-negative");
    }

    [[nodiscard]] PotentialField source_field(std::vector<double> values) const {
        require(values.size() == mu0->size(), ErrorCode::GridMismatch, "values do not match the source grid");
        return {cost.source, mu0, std::move(values), {}};
    }

    [[nodiscard]] PotentialField target_field(std::vector<double> values) const {
        require(values.size() == nu0->size(), ErrorCode::GridMismatch, "values do not match the target grid");
        return {cost.target, nu0, std::move(values), {}};
    }
};

inline TransportProblem make_problem(CostFunction cost, DiscreteMeasure mu0, DiscreteMeasure nu0, double ln_norm = 1.0,
                                     std::function<double(const Point&)> weight = {}) {
    TransportProblem pr;
    pr.cost = std::move(cost);
    pr.ln_norm = ln_norm;
    pr.weight = std::move(weight);
    pr.mu0 = std::make_shared<const DiscreteMeasure>(std::move(mu0));
    pr.nu0 = std::make_shared<const DiscreteMeasure>(std::move(nu0));
    pr.matrix = std::make_shared<const CostMatrix>(make_cost_matrix(pr.cost, *pr.mu0, *pr.nu0));
    pr.source_mass = pr.mu0->weights;
    pr.target_weight.resize(pr.nu0->size(), 1.0);
    pr.target_mass.resize(pr.nu0->size());
    for (std::size_t j = 0; j < pr.nu0->size(); ++j) {
        if (pr.weight) pr.target_weight[j] = pr.weight(pr.nu0->coords[j]);
        pr.target_mass[j] = pr.target_weight[j] * pr.nu0->weights[j];
    }
    pr.validate();
    return pr;
}

enum class Direction { SourceToTarget, TargetToSource };

inline Direction opposite(Direction d) {
    return d == Direction::SourceToTarget ? Direction::TargetToSource : Direction::SourceToTarget;
}

/// Raw transform on a cost matrix. SourceToTarget: g(p_j) = max_i c_ij - f_i; TargetToSource:
/// g(x_i) = max_j c_ij - f_j. Inputs are snapped to the dyadic lattice; ties go to the lowest index.
inline std::vector<double> c_transform_values(const CostMatrix& c, const std::vector<double>& f, Direction dir,
                                              std::vector<std::size_t>* argmax = nullptr) {
    const bool forward = dir == Direction::SourceToTarget;
    const std::size_t in_n = forward ? c.rows : c.cols;
    const std::size_t out_n = forward ? c.cols : c.rows;
    require(in_n > 0 && out_n > 0, ErrorCode::EmptyGrid, "c-transform over an empty grid");
    require(f.size() == in_n, ErrorCode::GridMismatch, "potential does not match the grid");
    std::vector<double> fs(in_n);
    for (std::size_t k = 0; k < in_n; ++k) fs[k] = snap_dyadic(f[k]);
    std::vector<double> out(out_n);
    if (argmax) argmax->assign(out_n, 0);
    parallel_for(out_n, [&](std::size_t b, std::size_t e) {
        for (std::size_t o = b; o < e; ++o) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t k = 0; k < in_n; ++k) {
                double v = (forward ? c(k, o) : c(o, k)) - fs[k];
                if (v > best) {
                    best = v;
                    arg = k;
                }
            }
            out[o] = best;
            if (argmax) (*argmax)[o] = arg;
        }
    }, 64);
    return out;
}

inline PotentialField c_transform(const PotentialField& f, const TransportProblem& pr, Direction dir) {
    const bool forward = dir == Direction::SourceToTarget;
    require(f.size() == (forward ? pr.mu0->size() : pr.nu0->size()), ErrorCode::GridMismatch,
            "potential lives on a different grid");
    PotentialField g;
    g.complex = forward ? pr.cost.target : pr.cost.source;
    g.support = forward ? pr.nu0 : pr.mu0;
    g.values = c_transform_values(*pr.matrix, f.values, dir, &g.argmax);
    return g;
}

/// (f^c)^c on the same side as f.
inline PotentialField project_Pc(const PotentialField& f, const TransportProblem& pr, Direction side = Direction::SourceToTarget) {
    return c_transform(c_transform(f, pr, side), pr, opposite(side));
}

/// F(phi) = int phi dmu0 + int W phi^c dnu0.
inline double kontorovich_value(const TransportProblem& pr, const PotentialField& phi) {
    require(phi.size() == pr.mu0->size(), ErrorCode::GridMismatch, "phi must live on the source grid");
    auto pc = c_transform_values(*pr.matrix, phi.values, Direction::SourceToTarget);
    return weighted_sum(pr.source_mass, phi.values) + weighted_sum(pr.target_mass, pc);
}

/// -(L^n) int W phi^c dnu0 with the additive constant fixed by E(0) = 0.
inline double ma_energy(const TransportProblem& pr, const PotentialField& phi) {
    require(phi.size() == pr.mu0->size(), ErrorCode::GridMismatch, "phi must live on the source grid");
    auto pc = c_transform_values(*pr.matrix, phi.values, Direction::SourceToTarget);
    auto zc = c_transform_values(*pr.matrix, std::vector<double>(phi.size(), 0.0), Direction::SourceToTarget);
    std::vector<double> diff(pc.size());
    for (std::size_t j = 0; j < pc.size(); ++j) diff[j] = pc[j] - zc[j];
    return -pr.ln_norm * weighted_sum(pr.target_mass, diff);
}

struct PlanEntry {
    std::size_t i = 0;  ///< source index
    std::size_t j = 0;  ///< target index
    double mass = 0.0;
};

inline double plan_correlation(const TransportProblem& pr, const std::vector<PlanEntry>& plan) {
    std::vector<double> terms;
    terms.reserve(plan.size());
    for (const auto& e : plan) terms.push_back((*pr.matrix)(e.i, e.j) * e.mass);
    return pairwise_sum(terms);
}

/// Canonical optimal potential from the support of an optimal plan.
///
/// Drops entries whose mass is at round-off level relative to the largest entry.
inline std::vector<PlanEntry> prune_plan(std::vector<PlanEntry> plan, double rel = 1e-12) {
    double scale = 0.0;
    for (const auto& e : plan) scale = std::max(scale, e.mass);
    std::erase_if(plan, [&](const PlanEntry& e) { return e.mass <= rel * scale; });
    return plan;
}

/// Optimal duals are exactly the feasible duals tight on the support of any one optimal plan, so
/// they form the solutions of u_i - u_k >= max_{j in supp(k)} (c_ij - c_kj). The least non-negative
/// solution (max-plus closure) is plan-independent; it is then projected into P_c and centred.
inline std::vector<double> canonical_dual(const TransportProblem& pr, const std::vector<PlanEntry>& plan) {
    const auto& c = *pr.matrix;
    const std::size_t n = c.rows;
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> L(n * n, ninf);
    std::vector<char> has_support(n, 0);
    // masses at round-off level are residue of the pivoting, not support
    double scale = 0.0;
    for (const auto& e : plan) scale = std::max(scale, e.mass);
    const double floor = 1e-12 * scale;
    for (const auto& e : plan) {
        if (e.mass <= floor) continue;
        has_support[e.i] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            double& d = L[e.i * n + i];
            d = std::max(d, c(i, e.j) - c(e.i, e.j));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        require(has_support[i] || pr.source_mass[i] == 0.0, ErrorCode::InvariantViolation,
                "plan leaves a charged source point unused");
        L[i * n + i] = std::max(L[i * n + i], 0.0);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a) {
            double lak = L[a * n + k];
            if (lak == ninf) continue;
            const double* row = &L[k * n];
            double* out = &L[a * n];
            for (std::size_t b = 0; b < n; ++b)
                if (lak + row[b] > out[b]) out[b] = lak + row[b];
        }
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) u[i] = std::max(u[i], L[k * n + i]);
    return u;
}

/// P_c projection followed by the mean-zero normalization over mu0 (shift snapped to the dyadic lattice).
inline PotentialField normalize_potential(const TransportProblem& pr, std::vector<double> values) {
    auto phi = project_Pc(pr.source_field(std::move(values)), pr);
    double shift = snap_dyadic(weighted_sum(pr.source_mass, phi.values));
    for (auto& v : phi.values) v -= shift;
    phi.argmax.clear();
    return phi;
}

struct RelativeVolume {
    double vol = 0.0;
    double scaled = 0.0;
    std::size_t labels = 0;
};

/// vol = l sum_p mult(p) (psi^c_l(p) - phi^c_l(p)) with phi^c_l(p) = max_x (-val_x(theta_p^l)/l - phi(x));
/// scaled = n!/l^{n+1} vol, which tends to E(phi) - E(psi).
inline RelativeVolume relative_volume_sum(const PotentialField& phi, const PotentialField& psi, const ThetaFamily& family,
                                          std::int64_t l) {
    family.require_level(l);
    require(phi.support && psi.support && phi.size() == psi.size() && phi.size() == phi.support->size(),
            ErrorCode::GridMismatch, "phi and psi must share a source grid");
    const auto& grid = *phi.support;
    auto labels = family.labels(l);
    const double inv_l = 1.0 / static_cast<double>(l);
    std::vector<double> terms(labels.size());
    parallel_for(labels.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            double a = -std::numeric_limits<double>::infinity(), c = a;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double w = -family.val(l, labels[k], grid.coords[i]) * inv_l;
                a = std::max(a, w - phi.values[i]);
                c = std::max(c, w - psi.values[i]);
            }
            terms[k] = static_cast<double>(family.mult(l, labels[k])) * (c - a);
        }
    }, 8);
    RelativeVolume r;
    r.labels = labels.size();
    r.vol = static_cast<double>(l) * pairwise_sum(terms);
    double fact = 1.0;
    for (std::size_t i = 2; i <= family.target_dim; ++i) fact *= static_cast<double>(i);
    r.scaled = fact / std::pow(static_cast<double>(l), static_cast<double>(family.target_dim + 1)) * r.vol;
    return r;
}

}  // namespace kdual
