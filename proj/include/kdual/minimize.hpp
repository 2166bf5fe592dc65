#pragma once

// Minimization of the Kontorovich functional over P_c.
//
// ShortestPath (default) solves the discrete dual exactly by successive shortest paths on the
// bipartite transport network and reads the potential off the optimal plan. DualAscent is the
// damped subgradient iteration on phi with a P_c projection after every step; it stalls at kinks of
// F and is kept for comparison and as a fallback for problems without a plan.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/transport.hpp"

namespace kdual {

enum class Method { ShortestPath, DualAscent };

inline Method parse_method(const std::string& s) {
    if (s == "shortest-path" || s == "exact") return Method::ShortestPath;
    if (s == "dual-ascent") return Method::DualAscent;
    fail(ErrorCode::ConfigError, "unknown solver method '" + s + "'");
}

inline std::string to_string(Method m) { return m == Method::ShortestPath ? "shortest-path" : "dual-ascent"; }

struct MinimizeConfig {
    std::size_t max_iter = 20000;
    double tol = 1e-12;
    Method method = Method::ShortestPath;
    double damping = 0.5;
    /// Dual-ascent stops once the best value has not improved by tol over this many steps.
    std::size_t patience = 200;
};

struct TransportResult {
    PotentialField phi;
    PotentialField psi;
    double value = 0.0;
    std::optional<std::vector<PlanEntry>> plan;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
    Method method = Method::ShortestPath;
};

namespace detail {

/// Min-cost flow of the supplies a onto the demands b with arc costs -c (i.e. maximal correlation),
/// by successive shortest paths with node potentials. Returns the plan and the number of augmentations.
inline std::vector<PlanEntry> successive_shortest_paths(const CostMatrix& c, std::vector<double> a, std::vector<double> b,
                                                        std::size_t& augmentations) {
    const std::size_t n = c.rows, m = c.cols, N = n + m;
    const double inf = std::numeric_limits<double>::infinity();
    const double eps = 1e-15;
    std::vector<double> flow(n * m, 0.0);
    std::vector<double> pot(N, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double lo = inf;
        for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, -c(i, j));
        pot[n + j] = lo;
    }
    std::vector<double> dist(N);
    std::vector<std::size_t> parent(N);
    std::vector<char> done(N);
    augmentations = 0;
    auto remaining = [&](const std::vector<double>& v) {
        for (double x : v)
            if (x > eps) return true;
        return false;
    };
    while (remaining(a) && remaining(b)) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > eps) {
                dist[i] = 0.0;
                parent[i] = i;
            }
        std::size_t sink = N;
        while (true) {
            std::size_t u = N;
            double best = inf;
            for (std::size_t v = 0; v < N; ++v)
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            require(u != N, ErrorCode::InfeasibleMarginals, "no augmenting path; marginals are inconsistent");
            done[u] = 1;
            if (u >= n && b[u - n] > eps) {
                sink = u;
                break;
            }
            if (u < n) {
                for (std::size_t j = 0; j < m; ++j) {
                    std::size_t v = n + j;
                    if (done[v]) continue;
                    double nd = dist[u] + std::max(0.0, -c(u, j) + pot[u] - pot[v]);
                    if (nd < dist[v]) {
                        dist[v] = nd;
                        parent[v] = u;
                    }
                }
            } else {
                std::size_t j = u - n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (done[i] || flow[i * m + j] <= 0.0) continue;
                    double nd = dist[u] + std::max(0.0, c(i, j) + pot[u] - pot[i]);
                    if (nd < dist[i]) {
                        dist[i] = nd;
                        parent[i] = u;
                    }
                }
            }
        }
        const double dt = dist[sink];
        for (std::size_t v = 0; v < N; ++v) pot[v] += std::min(dist[v], dt);
        // bottleneck along the path
        double delta = b[sink - n];
        std::size_t v = sink;
        while (true) {
            std::size_t u = parent[v];
            if (u == v) break;
            if (u >= n) delta = std::min(delta, flow[v * m + (u - n)]);  // reverse arc u=col -> v=row
            v = u;
        }
        const std::size_t src = v;
        delta = std::min(delta, a[src]);
        v = sink;
        while (true) {
            std::size_t u = parent[v];
            if (u == v) break;
            if (u < n) {
                flow[u * m + (v - n)] += delta;
            } else {
                double& f = flow[v * m + (u - n)];
                f = f - delta <= eps * 1e-3 ? 0.0 : f - delta;
            }
            v = u;
        }
        a[src] -= delta;
        b[sink - n] -= delta;
        ++augmentations;
    }
    std::vector<PlanEntry> plan;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (flow[i * m + j] > 0.0) plan.push_back({i, j, flow[i * m + j]});
    return prune_plan(std::move(plan));
}

}  // namespace detail

/// Target-side masses rescaled to the exact source total so the flow problem is balanced.
inline std::vector<double> balanced_target(const TransportProblem& pr) {
    double sa = pairwise_sum(pr.source_mass), sb = pairwise_sum(pr.target_mass);
    require(std::abs(sa - sb) <= 1e-9, ErrorCode::InfeasibleMarginals, "source and weighted target masses differ");
    std::vector<double> b = pr.target_mass;
    for (auto& x : b) x *= sa / sb;
    return b;
}

inline TransportResult finish_result(const TransportProblem& pr, std::vector<double> raw, Method method) {
    TransportResult r;
    r.method = method;
    r.phi = normalize_potential(pr, std::move(raw));
    r.psi = c_transform(r.phi, pr, Direction::SourceToTarget);
    r.value = kontorovich_value(pr, r.phi);
    return r;
}

inline TransportResult minimize_kontorovich(const TransportProblem& pr, const MinimizeConfig& cfg = {}) {
    require(cfg.tol > 0.0 && cfg.max_iter > 0, ErrorCode::ConfigError, "solver tolerances must be positive");
    pr.validate();
    if (cfg.method == Method::ShortestPath) {
        std::size_t aug = 0;
        auto plan = detail::successive_shortest_paths(*pr.matrix, pr.source_mass, balanced_target(pr), aug);
        auto r = finish_result(pr, canonical_dual(pr, plan), Method::ShortestPath);
        r.iterations = aug;
        r.gap = r.value - plan_correlation(pr, plan);
        r.plan = std::move(plan);
        return r;
    }

    // damped subgradient steps on phi, each followed by the P_c projection
    const auto& c = *pr.matrix;
    double spread = *std::max_element(c.data.begin(), c.data.end()) - *std::min_element(c.data.begin(), c.data.end());
    std::vector<double> phi(c.rows, 0.0);
    std::vector<double> best = phi;
    double best_value = kontorovich_value(pr, pr.source_field(phi));
    std::size_t since = 0, it = 0;
    bool converged = false;
    for (; it < cfg.max_iter; ++it) {
        std::vector<std::size_t> arg;
        c_transform_values(c, phi, Direction::SourceToTarget, &arg);
        std::vector<double> pushed(c.rows, 0.0);
        for (std::size_t j = 0; j < c.cols; ++j) pushed[arg[j]] += pr.target_mass[j];
        double step = cfg.damping * spread / std::sqrt(static_cast<double>(it + 1));
        for (std::size_t i = 0; i < c.rows; ++i) phi[i] -= step * (pr.source_mass[i] - pushed[i]);
        phi = project_Pc(pr.source_field(phi), pr).values;
        double v = kontorovich_value(pr, pr.source_field(phi));
        if (v < best_value - cfg.tol) {
            best_value = v;
            best = phi;
            since = 0;
        } else if (++since >= cfg.patience) {
            converged = true;
            break;
        }
    }
    auto r = finish_result(pr, best, Method::DualAscent);
    r.iterations = it;
    r.converged = converged;
    return r;
}

}  // namespace kdual
