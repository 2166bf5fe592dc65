#pragma once

// Exact reference solver: transportation simplex (MODI pricing) on the dense cost matrix,
// maximizing sum c_ij pi_ij subject to both marginals. Independent of the network-flow code
// in minimize.hpp so that the two can cross-check each other.

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/transport.hpp"

namespace kdual {

struct LpConfig {
    std::size_t size_cap = 400;
    double pricing_tol = 1e-12;
};

struct LpResult {
    std::vector<PlanEntry> plan;
    double primal_value = 0.0;
    std::vector<double> u;  ///< simplex multipliers of the source rows
    std::vector<double> v;  ///< simplex multipliers of the target columns
    PotentialField phi;     ///< canonical optimal potential (same normalization as minimize_kontorovich)
    std::size_t pivots = 0;
};

inline LpResult lp_oracle(const TransportProblem& pr, const LpConfig& cfg = {}) {
    const auto& c = *pr.matrix;
    const std::size_t n = c.rows, m = c.cols, N = n + m;
    require(n <= cfg.size_cap && m <= cfg.size_cap, ErrorCode::SizeCapExceeded,
            "grid exceeds the LP oracle size cap of " + std::to_string(cfg.size_cap));
    double sa = pairwise_sum(pr.source_mass), sb = pairwise_sum(pr.target_mass);
    require(std::abs(sa - sb) <= 1e-9, ErrorCode::InfeasibleMarginals, "source and weighted target masses differ");
    std::vector<double> a = pr.source_mass, b = pr.target_mass;
    for (auto& x : b) x *= sa / sb;

    // basis: n + m - 1 cells forming a spanning tree of the row/column graph
    struct Cell {
        std::size_t i, j;
        double x;
    };
    std::vector<Cell> basis;
    {
        std::size_t i = 0, j = 0;
        double ra = a[0], rb = b[0];
        while (true) {
            double x = std::max(0.0, std::min(ra, rb));
            basis.push_back({i, j, x});
            if (i == n - 1 && j == m - 1) break;
            ra -= x;
            rb -= x;
            if (j == m - 1 || (i < n - 1 && ra <= rb)) {
                ++i;
                ra = a[i];
            } else {
                ++j;
                rb = b[j];
            }
        }
    }

    std::vector<std::vector<std::size_t>> adj(N);  // node -> basis cell ids
    auto rebuild = [&] {
        for (auto& l : adj) l.clear();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            adj[basis[k].i].push_back(k);
            adj[n + basis[k].j].push_back(k);
        }
    };
    auto other = [&](std::size_t k, std::size_t node) { return node < n ? n + basis[k].j : basis[k].i; };

    std::vector<double> pot(N);
    std::vector<std::size_t> via(N);
    std::vector<char> seen(N);
    LpResult res;
    const std::size_t max_pivots = 50 * n * m + 1000;
    while (true) {
        rebuild();
        // multipliers: u_i + v_j = c_ij on the basis, u_0 = 0
        std::fill(seen.begin(), seen.end(), 0);
        std::deque<std::size_t> q{0};
        pot[0] = 0.0;
        seen[0] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            for (auto k : adj[u]) {
                std::size_t w = other(k, u);
                if (seen[w]) continue;
                seen[w] = 1;
                pot[w] = c(basis[k].i, basis[k].j) - pot[u];
                q.push_back(w);
            }
        }
        double best = cfg.pricing_tol;
        std::size_t ei = n, ej = m;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double r = c(i, j) - pot[i] - pot[n + j];
                if (r > best) {
                    best = r;
                    ei = i;
                    ej = j;
                }
            }
        if (ei == n) break;
        require(res.pivots < max_pivots, ErrorCode::NotConverged, "transportation simplex exceeded its pivot budget");
        ++res.pivots;

        // tree path from column ej back to row ei
        std::fill(seen.begin(), seen.end(), 0);
        q = {ei};
        seen[ei] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            if (u == n + ej) break;
            for (auto k : adj[u]) {
                std::size_t w = other(k, u);
                if (seen[w]) continue;
                seen[w] = 1;
                via[w] = k;
                q.push_back(w);
            }
        }
        std::vector<std::size_t> path;  // cells from column ej towards row ei; alternate -, +, -, ...
        for (std::size_t node = n + ej; node != ei;) {
            std::size_t k = via[node];
            path.push_back(k);
            node = other(k, node);
        }
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = path.size();
        for (std::size_t t = 0; t < path.size(); t += 2)
            if (basis[path[t]].x < theta) {
                theta = basis[path[t]].x;
                leave = t;
            }
        for (std::size_t t = 0; t < path.size(); ++t) basis[path[t]].x += (t % 2 == 0 ? -theta : theta);
        basis[path[leave]] = {ei, ej, theta};
    }

    res.u.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(n));
    res.v.assign(pot.begin() + static_cast<std::ptrdiff_t>(n), pot.end());
    for (const auto& cell : basis)
        if (cell.x > 0.0) res.plan.push_back({cell.i, cell.j, cell.x});
    res.plan = prune_plan(std::move(res.plan));
    std::sort(res.plan.begin(), res.plan.end(),
              [](const PlanEntry& x, const PlanEntry& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
    res.primal_value = plan_correlation(pr, res.plan);
    res.phi = normalize_potential(pr, canonical_dual(pr, res.plan));
    return res;
}

}  // namespace kdual
