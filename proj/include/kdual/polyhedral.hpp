#pragma once

// Integral polyhedral complexes: simplicial faces with rational vertices, the
// integral-affine structure of each face, gluings by affine-integral maps,
// rational points at level l, face measures and lumped quadrature.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/linalg.hpp"
#include "kdual/core/numeric.hpp"
#include "kdual/core/rational.hpp"

namespace kdual {

/// A simplex with rational vertices in the ambient space.
struct Face {
    std::vector<RationalPoint> vertices;
    /// Multiplicities b_i of the simplex presentation {x >= 0, sum b_i x_i = 1}; empty if none.
    std::vector<std::int64_t> multiplicities;
    double weight = 1.0;
    /// Integral basis (rows) of the lattice of the face's affine span.
    linalg::Matrix<BigInt> lattice_basis;
    Rational lattice_volume = 0;

    [[nodiscard]] std::size_t dim() const { return vertices.size() - 1; }
    [[nodiscard]] std::size_t ambient_dim() const { return vertices.front().size(); }
};

/// Input description of a face.
struct FaceSpec {
    std::vector<RationalPoint> vertices;
    std::vector<std::int64_t> multiplicities;
    double weight = 1.0;
};

/// Affine-integral identification y = A x + t of face `from` onto face `to`.
struct Gluing {
    std::size_t from = 0;
    std::size_t to = 0;
    linalg::Matrix<BigInt> matrix;
    std::vector<BigInt> translation;

    [[nodiscard]] RationalPoint apply(const RationalPoint& x) const {
        RationalPoint y(matrix.size());
        for (std::size_t i = 0; i < matrix.size(); ++i) {
            Rational acc(translation[i]);
            for (std::size_t j = 0; j < x.size(); ++j) acc += Rational(matrix[i][j]) * x[j];
            y[i] = acc;
        }
        return y;
    }
};

struct GluingSpec {
    std::vector<RationalPoint> from_vertices;
    linalg::Matrix<Rational> matrix;
    RationalPoint translation;
};

class IntegralPolyhedralComplex {
public:
    std::size_t ambient_dim = 0;
    std::size_t dim = 0;
    /// Every face of the closure, including sub-faces of declared faces.
    std::vector<Face> faces;
    /// Indices of the faces given as input (maximal faces of the description).
    std::vector<std::size_t> declared;
    std::vector<Gluing> gluings;

    [[nodiscard]] std::vector<std::size_t> top_faces() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < faces.size(); ++i)
            if (faces[i].dim() == dim) out.push_back(i);
        return out;
    }

    [[nodiscard]] std::size_t count_faces(std::size_t k) const {
        return static_cast<std::size_t>(
            std::count_if(faces.begin(), faces.end(), [k](const Face& f) { return f.dim() == k; }));
    }

    [[nodiscard]] std::optional<std::size_t> find_face(std::vector<RationalPoint> vertices) const {
        std::sort(vertices.begin(), vertices.end());
        for (std::size_t i = 0; i < faces.size(); ++i) {
            auto v = faces[i].vertices;
            std::sort(v.begin(), v.end());
            if (v == vertices) return i;
        }
        return std::nullopt;
    }
};

namespace detail {

inline linalg::Matrix<Rational> edge_matrix(const std::vector<RationalPoint>& vertices) {
    linalg::Matrix<Rational> edges;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        RationalPoint e(vertices[i].size());
        for (std::size_t c = 0; c < e.size(); ++c) e[c] = vertices[i][c] - vertices[0][c];
        edges.push_back(std::move(e));
    }
    return edges;
}

/// Integral basis of span(edges) intersected with Z^d.
inline linalg::Matrix<BigInt> saturated_lattice(const linalg::Matrix<Rational>& edges, std::size_t d) {
    linalg::Matrix<BigInt> rows;
    for (const auto& e : edges) rows.push_back(linalg::primitive_integer(e));
    auto normals = linalg::integer_kernel(rows, d);
    return linalg::integer_kernel(normals, d);
}

inline Rational factorial(std::size_t k) {
    Rational f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= Rational(static_cast<long long>(i));
    return f;
}

inline void finish_face(Face& face) {
    const std::size_t d = face.ambient_dim();
    const std::size_t k = face.dim();
    auto edges = edge_matrix(face.vertices);
    if (k == 0) {
        face.lattice_volume = 1;
        return;
    }
    face.lattice_basis = saturated_lattice(edges, d);
    // coordinates of the edges in the lattice basis
    linalg::Matrix<Rational> basis_t(d, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t c = 0; c < d; ++c) basis_t[c][i] = Rational(face.lattice_basis[i][c]);
    linalg::Matrix<Rational> coords;
    for (const auto& e : edges) {
        auto sol = linalg::solve(basis_t, e);
        require(sol.has_value(), ErrorCode::InvariantViolation, "edge outside its lattice span");
        coords.push_back(*sol);
    }
    Rational det = linalg::determinant(coords);
    if (det < 0) det = -det;
    face.lattice_volume = det / factorial(k);
}

}  // namespace detail

/// Validates faces and gluings and closes the face list under taking sub-faces.
inline IntegralPolyhedralComplex build_complex(const std::vector<FaceSpec>& specs,
                                               const std::vector<GluingSpec>& gluings = {}) {
    require(!specs.empty(), ErrorCode::InvariantViolation, "complex needs at least one face");
    IntegralPolyhedralComplex cx;
    cx.ambient_dim = specs.front().vertices.front().size();
    std::map<std::vector<RationalPoint>, std::size_t> index;

    auto add_face = [&](std::vector<RationalPoint> vertices, const FaceSpec* spec) -> std::size_t {
        std::sort(vertices.begin(), vertices.end());
        auto it = index.find(vertices);
        if (it != index.end()) {
            if (spec) {
                cx.faces[it->second].weight = spec->weight;
                cx.faces[it->second].multiplicities = spec->multiplicities;
            }
            return it->second;
        }
        Face f;
        f.vertices = vertices;
        if (spec) {
            f.weight = spec->weight;
            f.multiplicities = spec->multiplicities;
        }
        detail::finish_face(f);
        cx.faces.push_back(std::move(f));
        index.emplace(std::move(vertices), cx.faces.size() - 1);
        return cx.faces.size() - 1;
    };

    for (const auto& spec : specs) {
        require(!spec.vertices.empty(), ErrorCode::InvariantViolation, "face without vertices");
        for (const auto& v : spec.vertices)
            require(v.size() == cx.ambient_dim, ErrorCode::DimensionMismatch, "vertex dimension mismatch");
        auto edges = detail::edge_matrix(spec.vertices);
        require(linalg::rank(edges) == edges.size(), ErrorCode::InvariantViolation,
                "face vertices are not affinely independent");
        if (!spec.multiplicities.empty()) {
            require(spec.multiplicities.size() == cx.ambient_dim, ErrorCode::DimensionMismatch,
                    "multiplicity vector must match the ambient dimension");
            for (const auto& v : spec.vertices) {
                Rational s = 0;
                for (std::size_t c = 0; c < v.size(); ++c) {
                    require(v[c] >= 0, ErrorCode::InvariantViolation, "simplex presentation needs x >= 0");
                    s += Rational(spec.multiplicities[c]) * v[c];
                }
                require(s == 1, ErrorCode::InvariantViolation, "vertex violates sum b_i x_i = 1");
            }
        }
        const std::size_t n = spec.vertices.size();
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<RationalPoint> sub;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::uint64_t{1} << i)) sub.push_back(spec.vertices[i]);
            add_face(std::move(sub), sub.size() == n ? &spec : nullptr);
        }
        cx.declared.push_back(*cx.find_face(spec.vertices));
        cx.dim = std::max(cx.dim, spec.vertices.size() - 1);
    }
    std::sort(cx.declared.begin(), cx.declared.end());
    cx.declared.erase(std::unique(cx.declared.begin(), cx.declared.end()), cx.declared.end());

    for (const auto& g : gluings) {
        Gluing out;
        auto from = cx.find_face(g.from_vertices);
        require(from.has_value(), ErrorCode::InconsistentGluing, "gluing source is not a face");
        require(g.matrix.size() == cx.ambient_dim && g.translation.size() == cx.ambient_dim,
                ErrorCode::InconsistentGluing, "gluing map has wrong shape");
        for (const auto& row : g.matrix) {
            require(row.size() == cx.ambient_dim, ErrorCode::InconsistentGluing, "gluing map has wrong shape");
            std::vector<BigInt> irow;
            for (const auto& x : row) {
                require(is_integer(x), ErrorCode::InconsistentGluing, "gluing matrix is not integral");
                irow.push_back(boost::multiprecision::numerator(x));
            }
            out.matrix.push_back(std::move(irow));
        }
        for (const auto& x : g.translation) {
            require(is_integer(x), ErrorCode::InconsistentGluing, "gluing translation is not integral");
            out.translation.push_back(boost::multiprecision::numerator(x));
        }
        std::vector<RationalPoint> image;
        for (const auto& v : g.from_vertices) image.push_back(out.apply(v));
        auto to = cx.find_face(image);
        require(to.has_value(), ErrorCode::InconsistentGluing, "gluing image is not a face");
        out.from = *from;
        out.to = *to;
        cx.gluings.push_back(std::move(out));
    }
    return cx;
}

// ---------------------------------------------------------------------------
// Rational points

/// Points z / level with integer numerators z.
struct LatticePointSet {
    std::int64_t level = 1;
    std::vector<std::vector<std::int64_t>> numerators;

    [[nodiscard]] std::size_t size() const { return numerators.size(); }

    [[nodiscard]] RationalPoint point(std::size_t i) const {
        RationalPoint p;
        for (auto z : numerators[i]) p.emplace_back(Rational(z, level));
        return p;
    }

    [[nodiscard]] std::vector<double> coords(std::size_t i) const {
        std::vector<double> p;
        for (auto z : numerators[i]) p.push_back(static_cast<double>(z) / static_cast<double>(level));
        return p;
    }

    [[nodiscard]] bool contains(const RationalPoint& p) const {
        std::vector<std::int64_t> z;
        for (const auto& x : p) {
            Rational s = x * Rational(level);
            if (!is_integer(s)) return false;
            z.push_back(to_int64(s));
        }
        return std::binary_search(numerators.begin(), numerators.end(), z);
    }
};

namespace detail {

/// Affine functionals in integer form used to enumerate lattice points of a face.
struct FaceIndexer {
    std::size_t d = 0;
    std::size_t k = 0;
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> others;
    // barycentric: D * lambda_i(x) = sum_p A[i][p] x_p + C[i]   (i = 1..k)
    std::vector<std::vector<BigInt>> bary_coeff;
    std::vector<BigInt> bary_const;
    // non-pivot coordinates: D * x_q = sum_p R[q][p] x_p + r[q]
    std::vector<std::vector<BigInt>> dep_coeff;
    std::vector<BigInt> dep_const;
    BigInt denom = 1;
    std::vector<Rational> lo, hi;

    explicit FaceIndexer(const Face& face) {
        d = face.ambient_dim();
        k = face.dim();
        const auto& v0 = face.vertices.front();
        auto edges = edge_matrix(face.vertices);
        lo = hi = v0;
        for (const auto& v : face.vertices)
            for (std::size_t c = 0; c < d; ++c) {
                lo[c] = std::min(lo[c], v[c]);
                hi[c] = std::max(hi[c], v[c]);
            }
        if (k == 0) {
            others.resize(d);
            std::iota(others.begin(), others.end(), std::size_t{0});
            return;
        }
        auto reduced = edges;
        pivots = linalg::rref(reduced);
        std::vector<bool> is_pivot(d, false);
        for (auto p : pivots) is_pivot[p] = true;
        for (std::size_t c = 0; c < d; ++c)
            if (!is_pivot[c]) others.push_back(c);
        // (x - v0)_P = Ep^T lambda
        linalg::Matrix<Rational> ept(k, std::vector<Rational>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t i = 0; i < k; ++i) ept[r][i] = edges[i][pivots[r]];
        linalg::Matrix<Rational> inv(k, std::vector<Rational>(k));
        for (std::size_t col = 0; col < k; ++col) {
            std::vector<Rational> e(k, Rational(0));
            e[col] = 1;
            auto sol = linalg::solve(ept, e);
            for (std::size_t r = 0; r < k; ++r) inv[r][col] = (*sol)[r];
        }
        std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k));
        std::vector<Rational> c(k);
        for (std::size_t i = 0; i < k; ++i) {
            Rational acc = 0;
            for (std::size_t p = 0; p < k; ++p) {
                a[i][p] = inv[i][p];
                acc -= inv[i][p] * v0[pivots[p]];
            }
            c[i] = acc;
        }
        std::vector<std::vector<Rational>> r(others.size(), std::vector<Rational>(k));
        std::vector<Rational> rc(others.size());
        for (std::size_t qi = 0; qi < others.size(); ++qi) {
            std::size_t q = others[qi];
            Rational acc = v0[q];
            for (std::size_t p = 0; p < k; ++p) {
                Rational coeff = 0;
                for (std::size_t i = 0; i < k; ++i) coeff += edges[i][q] * inv[i][p];
                r[qi][p] = coeff;
                acc -= coeff * v0[pivots[p]];
            }
            rc[qi] = acc;
        }
        RationalPoint all;
        for (auto& row : a) all.insert(all.end(), row.begin(), row.end());
        all.insert(all.end(), c.begin(), c.end());
        for (auto& row : r) all.insert(all.end(), row.begin(), row.end());
        all.insert(all.end(), rc.begin(), rc.end());
        denom = common_denominator(all);
        Rational dr(denom);
        auto to_int = [&](const Rational& x) { return BigInt(boost::multiprecision::numerator(Rational(x * dr))); };
        bary_coeff.assign(k, std::vector<BigInt>(k));
        bary_const.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t p = 0; p < k; ++p) bary_coeff[i][p] = to_int(a[i][p]);
            bary_const[i] = to_int(c[i]);
        }
        dep_coeff.assign(others.size(), std::vector<BigInt>(k));
        dep_const.resize(others.size());
        for (std::size_t qi = 0; qi < others.size(); ++qi) {
            for (std::size_t p = 0; p < k; ++p) dep_coeff[qi][p] = to_int(r[qi][p]);
            dep_const[qi] = to_int(rc[qi]);
        }
    }

    template <class Visit>
    void enumerate(std::int64_t level, Visit&& visit) const {
        using I = __int128;
        if (k == 0) {
            std::vector<std::int64_t> z(d);
            for (std::size_t c = 0; c < d; ++c) {
                Rational s = lo[c] * Rational(level);
                if (!is_integer(s)) return;
                z[c] = to_int64(s);
            }
            visit(z);
            return;
        }
        std::vector<std::int64_t> zlo(k), zhi(k);
        for (std::size_t p = 0; p < k; ++p) {
            zlo[p] = to_int64(-floor(-lo[pivots[p]] * Rational(level)));
            zhi[p] = to_int64(floor(hi[pivots[p]] * Rational(level)));
        }
        const I D = static_cast<I>(denom.convert_to<long long>());
        std::vector<std::vector<I>> bc(k, std::vector<I>(k));
        std::vector<I> bk(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t p = 0; p < k; ++p) bc[i][p] = static_cast<I>(bary_coeff[i][p].convert_to<long long>());
            bk[i] = static_cast<I>(bary_const[i].convert_to<long long>()) * level;
        }
        std::vector<std::vector<I>> dc(others.size(), std::vector<I>(k));
        std::vector<I> dk(others.size());
        for (std::size_t qi = 0; qi < others.size(); ++qi) {
            for (std::size_t p = 0; p < k; ++p) dc[qi][p] = static_cast<I>(dep_coeff[qi][p].convert_to<long long>());
            dk[qi] = static_cast<I>(dep_const[qi].convert_to<long long>()) * level;
        }
        std::vector<std::int64_t> zp(zlo);
        std::vector<std::int64_t> z(d);
        if (zlo.empty()) return;
        for (std::size_t p = 0; p < k; ++p)
            if (zlo[p] > zhi[p]) return;
        while (true) {
            I sum = 0;
            bool inside = true;
            for (std::size_t i = 0; i < k && inside; ++i) {
                I val = bk[i];
                for (std::size_t p = 0; p < k; ++p) val += bc[i][p] * zp[p];
                if (val < 0) inside = false;
                sum += val;
            }
            // lambda_0 = 1 - sum lambda_i  ->  D*level - sum >= 0
            if (inside && D * level - sum < 0) inside = false;
            if (inside) {
                for (std::size_t p = 0; p < k; ++p) z[pivots[p]] = zp[p];
                for (std::size_t qi = 0; qi < others.size() && inside; ++qi) {
                    I val = dk[qi];
                    for (std::size_t p = 0; p < k; ++p) val += dc[qi][p] * zp[p];
                    if (val % D != 0) inside = false;
                    else z[others[qi]] = static_cast<std::int64_t>(val / D);
                }
                if (inside) visit(z);
            }
            std::size_t p = 0;
            while (p < k) {
                if (++zp[p] <= zhi[p]) break;
                zp[p] = zlo[p];
                ++p;
            }
            if (p == k) break;
        }
    }
};

/// Union-find used to merge glued points.
struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

inline bool face_contains(const Face& face, const RationalPoint& x) {
    const std::size_t k = face.dim();
    const auto& v0 = face.vertices.front();
    auto edges = edge_matrix(face.vertices);
    RationalPoint rhs(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) rhs[c] = x[c] - v0[c];
    if (k == 0) return std::all_of(rhs.begin(), rhs.end(), [](const Rational& r) { return r == 0; });
    linalg::Matrix<Rational> et(x.size(), std::vector<Rational>(k));
    for (std::size_t c = 0; c < x.size(); ++c)
        for (std::size_t i = 0; i < k; ++i) et[c][i] = edges[i][c];
    auto sol = linalg::solve(et, rhs);
    if (!sol) return false;
    Rational s = 0;
    for (const auto& l : *sol) {
        if (l < 0) return false;
        s += l;
    }
    return s <= 1;
}

}  // namespace detail

inline bool face_contains(const Face& face, const RationalPoint& x) { return detail::face_contains(face, x); }

/// All points of the complex with coordinates in (1/l) Z, deduplicated across faces and gluings.
inline LatticePointSet rational_points(const IntegralPolyhedralComplex& cx, std::int64_t level) {
    require(level >= 1, ErrorCode::InvariantViolation, "level must be positive");
    std::set<std::vector<std::int64_t>> found;
    for (auto fi : cx.declared) {
        detail::FaceIndexer indexer(cx.faces[fi]);
        indexer.enumerate(level, [&](const std::vector<std::int64_t>& z) { found.insert(z); });
    }
    LatticePointSet out;
    out.level = level;
    out.numerators.assign(found.begin(), found.end());
    if (cx.gluings.empty()) return out;

    std::map<std::vector<std::int64_t>, std::size_t> index;
    for (std::size_t i = 0; i < out.numerators.size(); ++i) index.emplace(out.numerators[i], i);
    detail::DisjointSets sets(out.numerators.size());
    for (const auto& g : cx.gluings) {
        detail::FaceIndexer indexer(cx.faces[g.from]);
        indexer.enumerate(level, [&](const std::vector<std::int64_t>& z) {
            std::vector<std::int64_t> image(z.size());
            for (std::size_t r = 0; r < z.size(); ++r) {
                BigInt acc = g.translation[r] * level;
                for (std::size_t c = 0; c < z.size(); ++c) acc += g.matrix[r][c] * z[c];
                image[r] = acc.convert_to<std::int64_t>();
            }
            auto a = index.find(z);
            auto b = index.find(image);
            require(a != index.end() && b != index.end(), ErrorCode::InconsistentGluing,
                    "gluing maps a lattice point outside the complex");
            sets.unite(a->second, b->second);
        });
    }
    LatticePointSet merged;
    merged.level = level;
    for (std::size_t i = 0; i < out.numerators.size(); ++i)
        if (sets.find(i) == i) merged.numerators.push_back(out.numerators[i]);
    return merged;
}

// ---------------------------------------------------------------------------
// Measures

struct FaceMeasure {
    double density = 0.0;     ///< mass per unit integral-Lebesgue volume
    double total_mass = 0.0;  ///< density times lattice volume
};

/// Lebesgue measure in lattice coordinates of the face, scaled by face_weight.
inline FaceMeasure face_measure(const Face& face, double face_weight, bool allow_point_mass = false) {
    require(face_weight > 0.0, ErrorCode::InvariantViolation, "face weight must be positive");
    if (face.dim() == 0) {
        require(allow_point_mass, ErrorCode::ZeroDimensionalFace, "vertex carries no Lebesgue measure");
        return {face_weight, face_weight};
    }
    return {face_weight, face_weight * to_double(face.lattice_volume)};
}

/// Grid structure of one top face inside a DiscreteMeasure.
struct FaceGrid {
    std::size_t face = 0;
    std::int64_t steps = 1;
    std::vector<std::vector<std::int64_t>> barycentric;  ///< integer coordinates summing to steps
    std::vector<std::size_t> point_index;
};

struct DiscreteMeasure {
    std::vector<RationalPoint> points;
    std::vector<std::vector<double>> coords;
    std::vector<double> weights;
    std::vector<std::size_t> face_tags;
    std::vector<FaceGrid> face_grids;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
    [[nodiscard]] double total_mass() const { return pairwise_sum(weights); }

    [[nodiscard]] DiscreteMeasure normalized(double total = 1.0) const {
        DiscreteMeasure m = *this;
        double mass = total_mass();
        require(mass > 0.0, ErrorCode::InvariantViolation, "cannot normalize a zero measure");
        for (auto& w : m.weights) w *= total / mass;
        return m;
    }

    static DiscreteMeasure point_mass(const RationalPoint& p, double mass = 1.0) {
        DiscreteMeasure m;
        m.points.push_back(p);
        m.coords.push_back(to_double(p));
        m.weights.push_back(mass);
        m.face_tags.push_back(0);
        return m;
    }
};

namespace detail {

/// Freudenthal subdivision of the standard k-simplex with `steps` divisions:
/// returns the number of small simplices incident to each barycentric grid point.
inline std::map<std::vector<std::int64_t>, std::int64_t> freudenthal_incidence(std::size_t k, std::int64_t steps) {
    std::map<std::vector<std::int64_t>, std::int64_t> count;
    auto to_bary = [&](const std::vector<std::int64_t>& y) {
        std::vector<std::int64_t> a(k + 1);
        a[0] = steps - y[0];
        for (std::size_t i = 1; i < k; ++i) a[i] = y[i - 1] - y[i];
        a[k] = y[k - 1];
        return a;
    };
    auto in_region = [&](const std::vector<std::int64_t>& y) {
        if (y[0] > steps || y[k - 1] < 0) return false;
        for (std::size_t i = 1; i < k; ++i)
            if (y[i] > y[i - 1]) return false;
        return true;
    };
    std::vector<std::size_t> perm(k);
    std::vector<std::int64_t> c(k, 0);
    while (true) {
        if (in_region(c)) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            do {
                std::vector<std::vector<std::int64_t>> verts{c};
                auto y = c;
                for (auto axis : perm) {
                    ++y[axis];
                    verts.push_back(y);
                }
                if (std::all_of(verts.begin(), verts.end(), in_region))
                    for (const auto& v : verts) ++count[to_bary(v)];
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        std::size_t i = 0;
        while (i < k) {
            if (++c[i] < steps) break;
            c[i] = 0;
            ++i;
        }
        if (i == k) break;
    }
    return count;
}

}  // namespace detail

/// Lumped (vertex) quadrature on the barycentric grid of spacing h on every top face.
/// face_weights overrides the per-face weights (indexed like top_faces()).
inline DiscreteMeasure quadrature(const IntegralPolyhedralComplex& cx, const Rational& h,
                                  const std::vector<double>& face_weights = {}) {
    require(h > 0, ErrorCode::InvariantViolation, "resolution must be positive");
    require(h <= 1, ErrorCode::ResolutionTooCoarse, "resolution coarser than the face scale");
    const std::int64_t steps = to_int64(-floor(-Rational(1) / h));
    require(steps >= 1, ErrorCode::ResolutionTooCoarse, "fewer than two grid points on a face");
    auto tops = cx.top_faces();
    require(face_weights.empty() || face_weights.size() == tops.size(), ErrorCode::DimensionMismatch,
            "one weight per top face expected");
    require(cx.dim >= 1, ErrorCode::ZeroDimensionalFace, "quadrature needs positive-dimensional faces");

    std::map<RationalPoint, std::size_t> index;
    DiscreteMeasure m;
    const std::size_t k = cx.dim;
    auto incidence = detail::freudenthal_incidence(k, steps);
    Rational small_count = 1;
    for (std::size_t i = 0; i < k; ++i) small_count *= Rational(steps);

    for (std::size_t t = 0; t < tops.size(); ++t) {
        const Face& face = cx.faces[tops[t]];
        double weight = face_weights.empty() ? face.weight : face_weights[t];
        FaceMeasure fm = face_measure(face, weight);
        double per_vertex = fm.total_mass / to_double(small_count) / static_cast<double>(k + 1);
        FaceGrid grid;
        grid.face = tops[t];
        grid.steps = steps;
        for (const auto& [bary, n] : incidence) {
            RationalPoint x(face.ambient_dim(), Rational(0));
            for (std::size_t i = 0; i <= k; ++i)
                for (std::size_t c = 0; c < x.size(); ++c)
                    x[c] += Rational(bary[i], steps) * face.vertices[i][c];
            auto [it, inserted] = index.emplace(x, m.points.size());
            if (inserted) {
                m.points.push_back(x);
                m.coords.push_back(to_double(x));
                m.weights.push_back(0.0);
                m.face_tags.push_back(tops[t]);
            }
            m.weights[it->second] += per_vertex * static_cast<double>(n);
            grid.barycentric.push_back(bary);
            grid.point_index.push_back(it->second);
        }
        m.face_grids.push_back(std::move(grid));
    }

    if (!cx.gluings.empty()) {
        detail::DisjointSets sets(m.points.size());
        for (const auto& g : cx.gluings) {
            const Face& from = cx.faces[g.from];
            for (std::size_t i = 0; i < m.points.size(); ++i) {
                if (!face_contains(from, m.points[i])) continue;
                auto it = index.find(g.apply(m.points[i]));
                require(it != index.end(), ErrorCode::InconsistentGluing, "grid incompatible with gluing");
                sets.unite(i, it->second);
            }
        }
        // representative: lexicographically smallest point of the class
        std::vector<std::size_t> rep(m.points.size());
        for (std::size_t i = 0; i < m.points.size(); ++i) rep[i] = sets.find(i);
        std::map<std::size_t, std::size_t> best;
        for (std::size_t i = 0; i < m.points.size(); ++i) {
            auto [it, inserted] = best.emplace(rep[i], i);
            if (!inserted && m.points[i] < m.points[it->second]) it->second = i;
        }
        std::map<RationalPoint, std::size_t> order;
        for (auto& [root, idx] : best) order.emplace(m.points[idx], root);
        std::map<std::size_t, std::size_t> new_index;
        DiscreteMeasure merged;
        for (auto& [point, root] : order) {
            new_index[root] = merged.points.size();
            merged.points.push_back(point);
            merged.coords.push_back(to_double(point));
            merged.weights.push_back(0.0);
            merged.face_tags.push_back(m.face_tags[best[root]]);
        }
        for (std::size_t i = 0; i < m.points.size(); ++i) merged.weights[new_index[rep[i]]] += m.weights[i];
        for (auto grid : m.face_grids) {
            for (auto& idx : grid.point_index) idx = new_index[rep[idx]];
            merged.face_grids.push_back(std::move(grid));
        }
        return merged;
    }

    // order points lexicographically for deterministic output
    std::vector<std::size_t> perm(m.points.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return m.points[a] < m.points[b]; });
    std::vector<std::size_t> inverse(perm.size());
    DiscreteMeasure sorted;
    for (std::size_t n = 0; n < perm.size(); ++n) {
        inverse[perm[n]] = n;
        sorted.points.push_back(m.points[perm[n]]);
        sorted.coords.push_back(m.coords[perm[n]]);
        sorted.weights.push_back(m.weights[perm[n]]);
        sorted.face_tags.push_back(m.face_tags[perm[n]]);
    }
    for (auto grid : m.face_grids) {
        for (auto& idx : grid.point_index) idx = inverse[idx];
        sorted.face_grids.push_back(std::move(grid));
    }
    return sorted;
}

// ---------------------------------------------------------------------------
// Common complexes

inline RationalPoint rational_point(std::initializer_list<Rational> values) { return RationalPoint(values); }

/// Standard simplex {x >= 0, sum b_i x_i = 1} in R^{|b|}.
inline FaceSpec simplex_face(const std::vector<std::int64_t>& b, double weight = 1.0) {
    FaceSpec spec;
    spec.multiplicities = b;
    spec.weight = weight;
    for (std::size_t i = 0; i < b.size(); ++i) {
        RationalPoint v(b.size(), Rational(0));
        v[i] = Rational(1, b[i]);
        spec.vertices.push_back(std::move(v));
    }
    return spec;
}

/// R / (length Z) as `length` unit segments with the endpoint glued to the origin.
inline IntegralPolyhedralComplex circle_complex(std::int64_t length = 1) {
    std::vector<FaceSpec> faces;
    for (std::int64_t k = 0; k < length; ++k)
        faces.push_back({{RationalPoint{Rational(k)}, RationalPoint{Rational(k + 1)}}, {}, 1.0});
    GluingSpec glue{{RationalPoint{Rational(length)}}, {{Rational(1)}}, {Rational(-length)}};
    return build_complex(faces, {glue});
}

/// R^2 / (p0 Z x p1 Z) as unit squares, each split into two triangles along the (1,1) diagonal.
inline IntegralPolyhedralComplex torus_complex(std::int64_t p0, std::int64_t p1) {
    std::vector<FaceSpec> faces;
    auto pt = [](std::int64_t a, std::int64_t b) { return RationalPoint{Rational(a), Rational(b)}; };
    for (std::int64_t i = 0; i < p0; ++i)
        for (std::int64_t j = 0; j < p1; ++j) {
            faces.push_back({{pt(i, j), pt(i + 1, j), pt(i + 1, j + 1)}, {}, 1.0});
            faces.push_back({{pt(i, j), pt(i, j + 1), pt(i + 1, j + 1)}, {}, 1.0});
        }
    std::vector<GluingSpec> glue;
    linalg::Matrix<Rational> id{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
    for (std::int64_t j = 0; j < p1; ++j)
        glue.push_back({{pt(p0, j), pt(p0, j + 1)}, id, {Rational(-p0), Rational(0)}});
    for (std::int64_t i = 0; i < p0; ++i)
        glue.push_back({{pt(i, p1), pt(i + 1, p1)}, id, {Rational(0), Rational(-p1)}});
    return build_complex(faces, glue);
}

}  // namespace kdual
