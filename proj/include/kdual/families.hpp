#pragma once

// Worked example families: toric hypersurfaces from reflexive polytopes, intermediate
// complex-structure limits, and Mumford abelian degenerations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/linalg.hpp"
#include "kdual/core/rational.hpp"
#include "kdual/cost.hpp"
#include "kdual/mumford.hpp"
#include "kdual/polyhedral.hpp"
#include "kdual/transport.hpp"

namespace kdual {

// ---------------------------------------------------------------------------
// Toric

/// A facet as {y : <a, y> >= -1} together with the polytope vertices lying on it.
struct Facet {
    RationalPoint normal;
    std::vector<std::size_t> vertices;
};

/// Facets of a full-dimensional conv(vertices) with the origin in its interior, normalized to
/// {y : <a, y> >= -1}; brute force over d-subsets of vertices. NotReflexive if the origin is not interior.
inline std::vector<Facet> facets_through_origin_polar(const std::vector<RationalPoint>& verts) {
    require(!verts.empty(), ErrorCode::InvariantViolation, "polytope needs vertices");
    const std::size_t d = verts[0].size();
    require(verts.size() > d, ErrorCode::InvariantViolation, "polytope is not full-dimensional");
    std::map<RationalPoint, Facet> found;
    std::vector<std::size_t> pick(d);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
        if (depth == d) {
            linalg::Matrix<Rational> A;
            for (std::size_t r = 1; r < d; ++r) {
                std::vector<Rational> row(d);
                for (std::size_t c = 0; c < d; ++c) row[c] = verts[pick[r]][c] - verts[pick[0]][c];
                A.push_back(std::move(row));
            }
            auto ker = linalg::kernel(A, d);
            if (ker.size() != 1) return;
            auto a = ker[0];
            Rational off = 0;
            for (std::size_t c = 0; c < d; ++c) off += a[c] * verts[pick[0]][c];
            // orient so that the polytope lies in <a, y> >= off
            int side = 0;
            for (const auto& v : verts) {
                Rational s = -off;
                for (std::size_t c = 0; c < d; ++c) s += a[c] * v[c];
                int sg = s > 0 ? 1 : (s < 0 ? -1 : 0);
                if (sg == 0) continue;
                if (side == 0) side = sg;
                if (sg != side) return;
            }
            require(side != 0, ErrorCode::InvariantViolation, "polytope is not full-dimensional");
            if (side < 0) {
                for (auto& x : a) x = -x;
                off = -off;
            }
            require(off < 0, ErrorCode::NotReflexive, "origin is not in the interior of the polytope");
            Facet f;
            for (auto& x : a) f.normal.push_back(x / -off);
            for (std::size_t k = 0; k < verts.size(); ++k) {
                Rational s = 0;
                for (std::size_t c = 0; c < d; ++c) s += f.normal[c] * verts[k][c];
                if (s == -1) f.vertices.push_back(k);
            }
            found.emplace(f.normal, std::move(f));
            return;
        }
        for (std::size_t k = start; k < verts.size(); ++k) {
            pick[depth] = k;
            rec(depth + 1, k + 1);
        }
    };
    rec(0, 0);
    std::vector<Facet> out;
    for (auto& [k, f] : found) out.push_back(std::move(f));
    return out;
}

/// Vertices of the polar dual {y : <x, y> >= -1 for x in P}.
inline std::vector<RationalPoint> polar_dual(const std::vector<RationalPoint>& verts) {
    std::vector<RationalPoint> out;
    for (auto& f : facets_through_origin_polar(verts)) out.push_back(f.normal);
    return out;
}

/// Lattice points strictly inside conv(vertices) (origin assumed interior).
inline std::vector<RationalPoint> interior_lattice_points(const std::vector<RationalPoint>& verts) {
    const std::size_t d = verts[0].size();
    auto facets = facets_through_origin_polar(verts);
    std::vector<std::int64_t> lo(d, 0), hi(d, 0);
    for (const auto& v : verts)
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], to_int64(floor(v[c])));
            hi[c] = std::max(hi[c], to_int64(-floor(-v[c])));
        }
    std::vector<RationalPoint> out;
    std::vector<std::int64_t> x = lo;
    while (true) {
        bool inside = true;
        for (const auto& f : facets) {
            Rational s = 0;
            for (std::size_t c = 0; c < d; ++c) s += f.normal[c] * Rational(x[c]);
            if (s <= -1) inside = false;
        }
        if (inside) {
            RationalPoint p;
            for (auto v : x) p.emplace_back(v);
            out.push_back(std::move(p));
        }
        std::size_t c = 0;
        for (; c < d; ++c) {
            if (++x[c] <= hi[c]) break;
            x[c] = lo[c];
        }
        if (c == d) break;
    }
    return out;
}

inline bool is_lattice_polytope(const std::vector<RationalPoint>& verts) {
    for (const auto& v : verts)
        for (const auto& x : v)
            if (!is_integer(x)) return false;
    return true;
}

/// Boundary of conv(vertices) as a simplicial complex: edges in 2D, fan-triangulated facets in 3D.
inline IntegralPolyhedralComplex boundary_complex(const std::vector<RationalPoint>& verts) {
    const std::size_t d = verts[0].size();
    require(d == 2 || d == 3, ErrorCode::DimensionMismatch, "boundary complexes are shipped for dimension 2 and 3");
    std::vector<FaceSpec> faces;
    for (const auto& f : facets_through_origin_polar(verts)) {
        std::vector<RationalPoint> pts;
        for (auto k : f.vertices) pts.push_back(verts[k]);
        if (d == 2) {
            require(pts.size() == 2, ErrorCode::InvariantViolation, "edge with collinear extra vertices");
            faces.push_back({pts, {}, 1.0});
            continue;
        }
        // order the facet polygon by angle around its centroid, in the plane orthogonal to the normal
        std::vector<double> cen(3, 0.0);
        for (const auto& p : pts)
            for (std::size_t c = 0; c < 3; ++c) cen[c] += to_double(p[c]) / static_cast<double>(pts.size());
        auto nrm = to_double(f.normal);
        std::vector<double> e1(3), e2(3);
        for (std::size_t c = 0; c < 3; ++c) e1[c] = to_double(pts[0][c]) - cen[c];
        e2 = {nrm[1] * e1[2] - nrm[2] * e1[1], nrm[2] * e1[0] - nrm[0] * e1[2], nrm[0] * e1[1] - nrm[1] * e1[0]};
        auto angle = [&](const RationalPoint& p) {
            double a = 0, b = 0;
            for (std::size_t c = 0; c < 3; ++c) {
                a += (to_double(p[c]) - cen[c]) * e1[c];
                b += (to_double(p[c]) - cen[c]) * e2[c];
            }
            return std::atan2(b, a);
        };
        std::sort(pts.begin(), pts.end(), [&](const auto& x, const auto& y) { return angle(x) < angle(y); });
        for (std::size_t k = 1; k + 1 < pts.size(); ++k) faces.push_back({{pts[0], pts[k], pts[k + 1]}, {}, 1.0});
    }
    return build_complex(faces);
}

struct ReflexivePolytopePair {
    std::vector<RationalPoint> delta;
    std::vector<RationalPoint> delta_dual;
    std::shared_ptr<const IntegralPolyhedralComplex> boundary;       ///< boundary of delta (target)
    std::shared_ptr<const IntegralPolyhedralComplex> boundary_dual;  ///< boundary of delta_dual (source)
};

inline ReflexivePolytopePair reflexive_pair(const std::vector<RationalPoint>& delta_vertices) {
    ReflexivePolytopePair pair;
    require(is_lattice_polytope(delta_vertices), ErrorCode::NotReflexive, "delta must be a lattice polytope");
    auto interior = interior_lattice_points(delta_vertices);
    require(interior.size() == 1 && std::all_of(interior[0].begin(), interior[0].end(), [](const Rational& x) { return x == 0; }),
            ErrorCode::NotReflexive, "origin must be the unique interior lattice point");
    auto dual = polar_dual(delta_vertices);
    require(is_lattice_polytope(dual), ErrorCode::NotReflexive, "polar dual is not a lattice polytope");
    // keep only the vertices of delta itself (inputs may list redundant points)
    auto back = polar_dual(dual);
    std::sort(back.begin(), back.end());
    pair.delta = back;
    pair.delta_dual = dual;
    pair.boundary = std::make_shared<const IntegralPolyhedralComplex>(boundary_complex(pair.delta));
    pair.boundary_dual = std::make_shared<const IntegralPolyhedralComplex>(boundary_complex(pair.delta_dual));
    return pair;
}

/// n! times the lattice volume of the boundary of delta, n = dim delta - 1.
inline double boundary_degree(const IntegralPolyhedralComplex& boundary) {
    double vol = 0.0;
    for (auto f : boundary.top_faces()) vol += to_double(boundary.faces[f].lattice_volume);
    double fact = 1.0;
    for (std::size_t k = 2; k <= boundary.dim; ++k) fact *= static_cast<double>(k);
    return fact * vol;
}

struct ToricInstance {
    ReflexivePolytopePair pair;
    TransportProblem problem;
};

/// Source: boundary of the dual with normalized lattice Lebesgue measure; target: boundary of
/// delta likewise; cost <x, p>; W = 1. ln_norm defaults to n! vol(boundary of delta).
inline ToricInstance toric_pair(const std::vector<RationalPoint>& delta_vertices, const Rational& h,
                                double ln_norm = 0.0) {
    ToricInstance inst{reflexive_pair(delta_vertices), {}};
    auto mu = quadrature(*inst.pair.boundary_dual, h).normalized();
    auto nu = quadrature(*inst.pair.boundary, h).normalized();
    double ln = ln_norm > 0.0 ? ln_norm : boundary_degree(*inst.pair.boundary);
    inst.problem = make_problem(pairing_cost(inst.pair.boundary_dual, inst.pair.boundary), mu, nu, ln);
    return inst;
}

inline std::vector<RationalPoint> integer_points(std::initializer_list<std::initializer_list<int>> pts) {
    std::vector<RationalPoint> out;
    for (const auto& p : pts) {
        RationalPoint q;
        for (int x : p) q.emplace_back(x);
        out.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Intermediate complex-structure limits

struct IntermediateData {
    std::int64_t n = 2;                ///< fiber dimension
    std::vector<std::int64_t> d{2, 2}; ///< d_0..d_m, so m = d.size() - 1
    std::vector<std::int64_t> hilbert_M;
    double ln_norm = 1.0;

    [[nodiscard]] std::int64_t m() const { return static_cast<std::int64_t>(d.size()) - 1; }

    void validate() const {
        require(d.size() >= 2, ErrorCode::InvariantViolation, "need m >= 1");
        require(m() <= n - 1, ErrorCode::InvariantViolation, "need m <= n - 1");
        for (auto x : d) require(x >= 1, ErrorCode::InvariantViolation, "degrees d_i must be positive");
        require(ln_norm > 0.0, ErrorCode::InvariantViolation, "(L^n) must be positive");
    }

    /// W(p) = (1 + sum d_i p_i)^{n-m}.
    [[nodiscard]] double weight(const Point& p) const {
        double s = 1.0;
        for (std::size_t i = 0; i < d.size(); ++i) s += static_cast<double>(d[i]) * p[i];
        return std::pow(std::max(0.0, s), static_cast<double>(n - m()));
    }
};

/// Hilbert-Poincare coefficients of P^N: C(k + N, N) for k < depth.
inline std::vector<std::int64_t> projective_hilbert(std::int64_t N, std::size_t depth) {
    std::vector<std::int64_t> h(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        std::int64_t c = 1;
        for (std::int64_t i = 1; i <= N; ++i) c = c * (static_cast<std::int64_t>(k) + i) / i;
        h[k] = c;
    }
    return h;
}

/// Target complex B = union over k of {p <= 0, p_k = 0, sum d_i p_i >= -1}: each piece is the
/// simplex on 0 and -e_i/d_i for i != k.
inline IntegralPolyhedralComplex intermediate_target(const IntermediateData& data) {
    const std::size_t m1 = data.d.size();
    std::vector<FaceSpec> faces;
    for (std::size_t k = 0; k < m1; ++k) {
        FaceSpec f;
        f.vertices.push_back(RationalPoint(m1, Rational(0)));
        for (std::size_t i = 0; i < m1; ++i) {
            if (i == k) continue;
            RationalPoint v(m1, Rational(0));
            v[i] = Rational(-1, data.d[i]);
            f.vertices.push_back(std::move(v));
        }
        faces.push_back(std::move(f));
    }
    return build_complex(faces);
}

inline TransportProblem intermediate_family(const IntermediateData& data, const Rational& h) {
    data.validate();
    const std::size_t m1 = data.d.size();
    auto source = std::make_shared<const IntegralPolyhedralComplex>(
        build_complex({simplex_face(std::vector<std::int64_t>(m1, 1))}));
    auto target = std::make_shared<const IntegralPolyhedralComplex>(intermediate_target(data));
    auto mu = quadrature(*source, h).normalized();
    auto nu = quadrature(*target, h);
    std::vector<double> w(nu.size());
    for (std::size_t j = 0; j < nu.size(); ++j) w[j] = data.weight(nu.coords[j]) * nu.weights[j];
    double total = pairwise_sum(w);
    require(total > 0.0, ErrorCode::InvariantViolation, "weight vanishes on the target grid");
    for (auto& x : nu.weights) x /= total;
    return make_problem(pairing_cost(source, target), mu, nu, data.ln_norm,
                        [data](const Point& p) { return data.weight(p); });
}

struct SectionCount {
    std::int64_t enumerated = 0;
    std::int64_t series = 0;
};

/// Enumerates exponent tuples (l_0..l_m) with min l_i = 0 and sum d_i l_i <= l, each contributing
/// dim V_{l - sum d_i l_i} = [y^k] prod(1 - y^{d_i}) P_M(y); compares with [y^l] (1 - y^{sum d_i}) P_M(y).
inline SectionCount section_count(const IntermediateData& data, std::int64_t l) {
    require(l >= 0, ErrorCode::InvariantViolation, "level must be non-negative");
    require(static_cast<std::int64_t>(data.hilbert_M.size()) > l, ErrorCode::SeriesDepthExceeded,
            "Hilbert series of M not known to degree " + std::to_string(l));
    const auto& P = data.hilbert_M;
    std::vector<std::int64_t> pe(P.begin(), P.begin() + l + 1);
    for (auto di : data.d)
        for (std::int64_t k = l; k >= di; --k) pe[static_cast<std::size_t>(k)] -= pe[static_cast<std::size_t>(k - di)];
    SectionCount sc;
    std::int64_t dsum = 0;
    for (auto di : data.d) dsum += di;
    sc.series = P[static_cast<std::size_t>(l)] - (l >= dsum ? P[static_cast<std::size_t>(l - dsum)] : 0);

    std::vector<std::int64_t> e(data.d.size(), 0);
    while (true) {
        std::int64_t used = 0;
        for (std::size_t i = 0; i < e.size(); ++i) used += data.d[i] * e[i];
        if (used <= l && *std::min_element(e.begin(), e.end()) == 0) sc.enumerated += pe[static_cast<std::size_t>(l - used)];
        std::size_t i = 0;
        while (i < e.size()) {
            ++e[i];
            std::int64_t u = 0;
            for (std::size_t k = 0; k < e.size(); ++k) u += data.d[k] * e[k];
            if (u <= l) break;
            e[i++] = 0;
        }
        if (i == e.size()) break;
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Abelian

struct AbelianInstance {
    ThetaFamily family;
    TransportProblem problem;
};

/// Skeleton complex R^n / (shift Z^n) carrying x, and target R^n / Gamma carrying p.
inline std::shared_ptr<const IntegralPolyhedralComplex> abelian_skeleton(const MumfordData& d) {
    if (d.rank() == 1) return std::make_shared<const IntegralPolyhedralComplex>(circle_complex(d.factors[0].shift));
    require(d.rank() == 2, ErrorCode::DimensionMismatch, "abelian instances ship for rank 1 and 2");
    return std::make_shared<const IntegralPolyhedralComplex>(torus_complex(d.factors[0].shift, d.factors[1].shift));
}

inline std::shared_ptr<const IntegralPolyhedralComplex> abelian_base(const MumfordData& d) {
    if (d.rank() == 1) return std::make_shared<const IntegralPolyhedralComplex>(circle_complex(d.factors[0].period));
    require(d.rank() == 2, ErrorCode::DimensionMismatch, "abelian instances ship for rank 1 and 2");
    return std::make_shared<const IntegralPolyhedralComplex>(torus_complex(d.factors[0].period, d.factors[1].period));
}

inline AbelianInstance mumford_family(const MumfordData& data, const std::vector<std::int64_t>& levels, const Rational& h) {
    data.validate();
    AbelianInstance inst;
    inst.family = theta_family(data);
    inst.family.levels = levels;
    auto src = abelian_skeleton(data);
    auto tgt = abelian_base(data);
    auto mu = quadrature(*src, h).normalized();
    auto nu = quadrature(*tgt, h).normalized();
    inst.problem = make_problem(abelian_cost(data, src, tgt), mu, nu, data.ln_norm());
    return inst;
}

}  // namespace kdual
