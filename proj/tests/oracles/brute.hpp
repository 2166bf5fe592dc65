#pragma once

// Brute-force reference computations used to derive expected values in tests.
// Deliberately independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <optional>
#include <utility>
#include <vector>

#include "kdual/core/rational.hpp"

namespace oracle {

/// Points of (1/l)Z^2 lying on the boundary of the polygon with the given vertices (in order).
inline std::set<std::pair<std::int64_t, std::int64_t>> boundary_points_2d(const std::vector<kdual::RationalPoint>& v,
                                                                          std::int64_t l) {
    std::set<std::pair<std::int64_t, std::int64_t>> out;
    double lo = 1e300, hi = -1e300;
    for (const auto& p : v)
        for (const auto& c : p) {
            lo = std::min(lo, kdual::to_double(c));
            hi = std::max(hi, kdual::to_double(c));
        }
    auto a0 = static_cast<std::int64_t>(lo * l) - 1;
    auto a1 = static_cast<std::int64_t>(hi * l) + 1;
    for (std::int64_t x = a0; x <= a1; ++x)
        for (std::int64_t y = a0; y <= a1; ++y) {
            kdual::Rational px(x, l), py(y, l);
            for (std::size_t e = 0; e < v.size(); ++e) {
                const auto& p = v[e];
                const auto& q = v[(e + 1) % v.size()];
                kdual::Rational cross = (q[0] - p[0]) * (py - p[1]) - (q[1] - p[1]) * (px - p[0]);
                kdual::Rational dot = (q[0] - p[0]) * (px - p[0]) + (q[1] - p[1]) * (py - p[1]);
                kdual::Rational len = (q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]);
                if (cross == 0 && dot >= 0 && dot <= len) {
                    out.emplace(x, y);
                    break;
                }
            }
        }
    return out;
}

}  // namespace oracle

#include <map>

namespace oracle {

/// A monomial t^k z^alpha with coefficient vector, as plain data.
struct Mono {
    std::vector<std::int64_t> alpha;
    std::int64_t k;
    std::vector<kdual::Rational> coeff;
};

/// Valuation at x of sum_i a_i t^{o_i} s_i computed by dense accumulation over full exponents
/// (simplex presentation with multiplicities b; empty b means t is an extra coordinate).
inline std::optional<kdual::Rational> combination_valuation(const std::vector<std::vector<Mono>>& sections,
                                                            const std::vector<std::int64_t>& a,
                                                            const std::vector<std::int64_t>& o,
                                                            const std::vector<std::int64_t>& b,
                                                            const kdual::RationalPoint& x) {
    std::map<std::vector<std::int64_t>, std::vector<kdual::Rational>> acc;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (a[i] == 0) continue;
        for (const auto& m : sections[i]) {
            std::vector<std::int64_t> key = m.alpha;
            std::int64_t k = m.k + o[i];
            if (b.empty()) key.push_back(k);
            else
                for (std::size_t c = 0; c < key.size(); ++c) key[c] += k * b[c];
            auto& v = acc[key];
            if (v.empty()) v.assign(m.coeff.size(), kdual::Rational(0));
            for (std::size_t c = 0; c < m.coeff.size(); ++c) v[c] += kdual::Rational(a[i]) * m.coeff[c];
        }
    }
    std::optional<kdual::Rational> best;
    for (const auto& [key, v] : acc) {
        bool nonzero = false;
        for (const auto& c : v) nonzero = nonzero || c != 0;
        if (!nonzero) continue;
        kdual::Rational val = 0;
        std::size_t n = x.size();
        if (b.empty()) val += kdual::Rational(key[n]);
        for (std::size_t c = 0; c < n; ++c) val += kdual::Rational(key[c]) * x[c];
        if (!best || val < *best) best = val;
    }
    return best;
}

/// Brute-force independence: every small integer combination satisfies the min formula at x.
inline bool independent_by_sampling(const std::vector<std::vector<Mono>>& sections, const std::vector<std::int64_t>& b,
                                    const kdual::RationalPoint& x, int coeff_range = 2, int order_range = 2) {
    const std::size_t n = sections.size();
    std::vector<kdual::Rational> vals;
    for (const auto& s : sections) {
        std::optional<kdual::Rational> best;
        for (const auto& m : s) {
            kdual::Rational v(m.k);
            for (std::size_t c = 0; c < x.size(); ++c) v += kdual::Rational(m.alpha[c]) * x[c];
            if (!best || v < *best) best = v;
        }
        vals.push_back(*best);
    }
    std::vector<std::int64_t> a(n, -coeff_range), o(n, 0);
    while (true) {
        bool any = false;
        for (auto v : a) any = any || v != 0;
        if (any) {
            std::vector<std::int64_t> oo(n, 0);
            while (true) {
                std::optional<kdual::Rational> expect;
                for (std::size_t i = 0; i < n; ++i) {
                    if (a[i] == 0) continue;
                    kdual::Rational v = vals[i] + kdual::Rational(oo[i]);
                    if (!expect || v < *expect) expect = v;
                }
                auto got = combination_valuation(sections, a, oo, b, x);
                if (!got || *got != *expect) return false;
                std::size_t i = 0;
                while (i < n && ++oo[i] > order_range) oo[i++] = 0;
                if (i == n) break;
            }
        }
        std::size_t i = 0;
        while (i < n && ++a[i] > coeff_range) a[i++] = -coeff_range;
        if (i == n) break;
    }
    return true;
}

}  // namespace oracle

namespace oracle {

/// Phi for rank-1 Mumford data by summing slopes step by step from 0 (no closed form).
inline double mumford_phi(std::int64_t period, const std::vector<std::int64_t>& slopes, std::int64_t shift, double m) {
    auto slope = [&](std::int64_t k) {
        std::int64_t q = k >= 0 ? k / period : -((-k + period - 1) / period);
        return slopes[static_cast<std::size_t>(k - q * period)] + q * shift;
    };
    auto k = static_cast<std::int64_t>(std::floor(m));
    double phi = 0.0;
    if (k >= 0)
        for (std::int64_t i = 0; i < k; ++i) phi += static_cast<double>(slope(i));
    else
        for (std::int64_t i = -1; i >= k; --i) phi -= static_cast<double>(slope(i));
    return phi + static_cast<double>(slope(k)) * (m - static_cast<double>(k));
}

/// Normalized abelian cost by direct minimization over gamma in [-R, R] and m in [-R, R].
inline double abelian_cost_brute(std::int64_t period, const std::vector<std::int64_t>& slopes, std::int64_t shift,
                                 double x, double p, std::int64_t radius = 50) {
    double theta = 1e300, frame = 1e300;
    for (std::int64_t j = -radius; j <= radius; ++j) {
        double m = p + static_cast<double>(j * period);
        theta = std::min(theta, x * m + mumford_phi(period, slopes, shift, m));
        double mi = static_cast<double>(j);
        frame = std::min(frame, x * mi + mumford_phi(period, slopes, shift, mi));
    }
    return -theta + frame;
}

}  // namespace oracle

namespace oracle {

/// max over permutations of (1/n) sum_i C[i][sigma(i)]: the optimal value of the uniform
/// n x n transport problem (Birkhoff-von Neumann).
inline double assignment_by_permutations(const std::vector<std::vector<double>>& C) {
    std::vector<std::size_t> s(C.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
    double best = -1e300;
    do {
        double v = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) v += C[i][s[i]];
        best = std::max(best, v);
    } while (std::next_permutation(s.begin(), s.end()));
    return best / static_cast<double>(C.size());
}

}  // namespace oracle
