#pragma once

// Min-plus valuations of sections given by their leading monomial data, the
// decomposition of a face into regions with a unique dominant term, exponent
// classes and the valuative-independence test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/linalg.hpp"
#include "kdual/core/rational.hpp"
#include "kdual/polyhedral.hpp"

namespace kdual {

struct MonomialTerm {
    std::vector<std::int64_t> exponent;
    std::int64_t t_order = 0;
    /// Leading coefficient vector f_alpha in some fixed basis of local functions.
    std::vector<Rational> coeff;
    std::string coeff_id;
};

struct TropicalSection {
    std::vector<MonomialTerm> terms;
    std::int64_t level = 1;
    std::optional<RationalPoint> label;
    std::string tag;
};

/// How the uniformizer t appears among the monomials: either t = prod z_i^{b_i}
/// (simplex presentation) or as an independent coordinate.
struct Presentation {
    std::vector<std::int64_t> b;  ///< empty means t is its own coordinate

    [[nodiscard]] bool t_is_coordinate() const { return b.empty(); }

    /// Full exponent identifying the monomial t^k z^alpha.
    [[nodiscard]] std::vector<std::int64_t> full_exponent(const MonomialTerm& term) const {
        std::vector<std::int64_t> e = term.exponent;
        if (t_is_coordinate()) {
            e.push_back(term.t_order);
        } else {
            require(b.size() == e.size(), ErrorCode::DimensionMismatch, "exponent length differs from b");
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += term.t_order * b[i];
        }
        return e;
    }
};

inline void validate_section(const TropicalSection& s) {
    require(!s.terms.empty(), ErrorCode::InvariantViolation, "section without terms");
    require(s.level >= 1, ErrorCode::InvariantViolation, "section level must be positive");
    const auto n = s.terms.front().exponent.size();
    std::set<std::pair<std::vector<std::int64_t>, std::int64_t>> seen;
    for (const auto& t : s.terms) {
        require(t.exponent.size() == n, ErrorCode::DimensionMismatch, "terms of different exponent length");
        require(seen.emplace(t.exponent, t.t_order).second, ErrorCode::InvariantViolation,
                "two terms share (exponent, t_order)");
    }
}

// ---------------------------------------------------------------------------
// Evaluation

inline Rational term_value(const MonomialTerm& t, const RationalPoint& x) {
    require(x.size() == t.exponent.size(), ErrorCode::DimensionMismatch, "point and exponent differ in length");
    Rational v(t.t_order);
    for (std::size_t i = 0; i < x.size(); ++i) v += Rational(t.exponent[i]) * x[i];
    return v;
}

inline double term_value(const MonomialTerm& t, const std::vector<double>& x) {
    require(x.size() == t.exponent.size(), ErrorCode::DimensionMismatch, "point and exponent differ in length");
    double v = static_cast<double>(t.t_order);
    for (std::size_t i = 0; i < x.size(); ++i) v += static_cast<double>(t.exponent[i]) * x[i];
    return v;
}

/// Exact valuation min_terms <x, alpha> + k.
inline Rational val_at(const TropicalSection& s, const RationalPoint& x) {
    Rational best = term_value(s.terms.front(), x);
    for (std::size_t i = 1; i < s.terms.size(); ++i) best = std::min(best, term_value(s.terms[i], x));
    return best;
}

inline double val_at(const TropicalSection& s, const std::vector<double>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : s.terms) best = std::min(best, term_value(t, x));
    return best;
}

/// Barycentric coordinates of x on a face, or nullopt if x is off the face by more than tol.
inline std::optional<std::vector<double>> barycentric(const Face& face, const std::vector<double>& x,
                                                      double tol = 1e-12) {
    const std::size_t k = face.dim();
    const std::size_t d = face.ambient_dim();
    if (x.size() != d) return std::nullopt;
    auto v0 = to_double(face.vertices[0]);
    std::vector<std::vector<double>> e(k, std::vector<double>(d));
    for (std::size_t i = 0; i < k; ++i) {
        auto vi = to_double(face.vertices[i + 1]);
        for (std::size_t c = 0; c < d; ++c) e[i][c] = vi[c] - v0[c];
    }
    // normal equations (E E^T) lambda = E (x - v0)
    std::vector<std::vector<double>> g(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t c = 0; c < d; ++c) g[i][j] += e[i][c] * e[j][c];
        for (std::size_t c = 0; c < d; ++c) g[i][k] += e[i][c] * (x[c] - v0[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
        std::swap(g[c], g[piv]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            double f = g[r][c] / g[c][c];
            for (std::size_t j = c; j <= k; ++j) g[r][j] -= f * g[c][j];
        }
    }
    std::vector<double> lambda(k + 1);
    double rest = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        lambda[i + 1] = g[i][k] / g[i][i];
        rest -= lambda[i + 1];
    }
    lambda[0] = rest;
    for (std::size_t c = 0; c < d; ++c) {
        double y = v0[c];
        for (std::size_t i = 0; i < k; ++i) y += lambda[i + 1] * e[i][c];
        if (std::abs(y - x[c]) > tol) return std::nullopt;
    }
    for (double l : lambda)
        if (l < -tol) return std::nullopt;
    return lambda;
}

/// Valuation at a point required to lie on the face (within 1e-12).
inline double val_at(const TropicalSection& s, const Face& face, const std::vector<double>& x) {
    if (!face.multiplicities.empty()) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            require(x[i] >= -1e-12, ErrorCode::PointOffFace, "negative simplex coordinate");
            sum += static_cast<double>(face.multiplicities[i]) * x[i];
        }
        require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::PointOffFace, "point violates sum b_i x_i = 1");
    } else {
        require(barycentric(face, x).has_value(), ErrorCode::PointOffFace, "point is not on the face");
    }
    return val_at(s, x);
}

// ---------------------------------------------------------------------------
// Strict linear systems, solved exactly by Fourier-Motzkin elimination

/// The open half-space sum a_i y_i + c > 0.
struct StrictInequality {
    std::vector<Rational> a;
    Rational c;
};

namespace detail {

inline bool trivially_false(const StrictInequality& q) {
    return std::all_of(q.a.begin(), q.a.end(), [](const Rational& v) { return v == 0; }) && q.c <= 0;
}

/// Returns a point satisfying every inequality strictly, or nullopt if none exists.
inline std::optional<std::vector<Rational>> strict_feasible_point(std::vector<StrictInequality> system,
                                                                  std::size_t vars) {
    std::vector<std::vector<StrictInequality>> stages;
    for (std::size_t v = vars; v-- > 0;) {
        std::vector<StrictInequality> pos, neg, keep;
        for (auto& q : system) {
            if (q.a[v] > 0) pos.push_back(q);
            else if (q.a[v] < 0) neg.push_back(q);
            else keep.push_back(q);
        }
        stages.push_back(system);
        for (const auto& p : pos)
            for (const auto& n : neg) {
                // combine to cancel variable v
                Rational wp = -n.a[v], wn = p.a[v];
                StrictInequality q;
                q.a.resize(vars);
                for (std::size_t i = 0; i < vars; ++i) q.a[i] = wp * p.a[i] + wn * n.a[i];
                q.a[v] = 0;
                q.c = wp * p.c + wn * n.c;
                keep.push_back(std::move(q));
            }
        // drop duplicates to limit growth
        std::sort(keep.begin(), keep.end(), [](const auto& x, const auto& y) {
            return std::tie(x.a, x.c) < std::tie(y.a, y.c);
        });
        keep.erase(std::unique(keep.begin(), keep.end(),
                               [](const auto& x, const auto& y) { return x.a == y.a && x.c == y.c; }),
                   keep.end());
        for (const auto& q : keep)
            if (trivially_false(q)) return std::nullopt;
        system = std::move(keep);
    }
    for (const auto& q : system)
        if (q.c <= 0) return std::nullopt;
    // back-substitution: stages[j] is the system before eliminating variable vars-1-j
    std::vector<Rational> y(vars, Rational(0));
    for (std::size_t j = stages.size(); j-- > 0;) {
        std::size_t v = vars - 1 - j;
        std::optional<Rational> lo, hi;
        for (const auto& q : stages[j]) {
            if (q.a[v] == 0) continue;
            Rational rest = q.c;
            for (std::size_t i = 0; i < vars; ++i)
                if (i != v) rest += q.a[i] * y[i];
            Rational bound = -rest / q.a[v];
            if (q.a[v] > 0) lo = lo ? std::max(*lo, bound) : bound;
            else hi = hi ? std::min(*hi, bound) : bound;
        }
        if (lo && hi) y[v] = (*lo + *hi) / 2;
        else if (lo) y[v] = *lo + 1;
        else if (hi) y[v] = *hi - 1;
        else y[v] = 0;
    }
    return y;
}

/// Term value as an affine function of the reduced barycentric coordinates (lambda_1..lambda_k).
struct AffineForm {
    std::vector<Rational> a;
    Rational c;
};

inline AffineForm term_on_face(const MonomialTerm& t, const Face& face) {
    const std::size_t k = face.dim();
    AffineForm f;
    f.c = term_value(t, face.vertices[0]);
    f.a.resize(k);
    for (std::size_t i = 0; i < k; ++i) f.a[i] = term_value(t, face.vertices[i + 1]) - f.c;
    return f;
}

inline std::vector<StrictInequality> face_interior(std::size_t k) {
    std::vector<StrictInequality> out;
    for (std::size_t i = 0; i < k; ++i) {
        StrictInequality q{std::vector<Rational>(k, Rational(0)), 0};
        q.a[i] = 1;
        out.push_back(q);
    }
    StrictInequality last{std::vector<Rational>(k, Rational(-1)), 1};
    if (k > 0) out.push_back(last);
    return out;
}

inline RationalPoint face_point(const Face& face, const std::vector<Rational>& lambda) {
    RationalPoint x = face.vertices[0];
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (std::size_t c = 0; c < x.size(); ++c) x[c] += lambda[i] * (face.vertices[i + 1][c] - face.vertices[0][c]);
    return x;
}

}  // namespace detail

/// Open region of a face on which every section has a fixed dominant term.
struct Domain {
    std::vector<std::size_t> dominant;  ///< per section, index of the dominant term
    std::vector<bool> tied;             ///< per section, true if several terms agree on the whole region
    RationalPoint witness;              ///< an interior point of the region
};

/// Part of the corner locus: where terms i and j of one section tie and dominate the rest.
struct Wall {
    std::size_t section = 0;
    std::size_t term_i = 0;
    std::size_t term_j = 0;
    RationalPoint witness;  ///< a point on the wall (exact wall point when the face is 1-dimensional)
};

struct RegionPartition {
    std::vector<Domain> domains;
    std::vector<Wall> walls;
    bool tie_flag = false;
};

/// Decomposes the interior of a face into domains with a unique dominant term per section.
inline RegionPartition dominant_regions(const std::vector<TropicalSection>& sections, const Face& face) {
    require(!sections.empty(), ErrorCode::InvariantViolation, "no sections");
    const std::size_t k = face.dim();
    RegionPartition out;

    // Terms that coincide as functions on the face cannot be separated; keep the
    // lowest index of each group and flag the tie.
    std::vector<std::vector<std::size_t>> reps(sections.size());
    std::vector<std::vector<detail::AffineForm>> forms(sections.size());
    std::vector<bool> tied(sections.size(), false);
    for (std::size_t s = 0; s < sections.size(); ++s) {
        for (std::size_t t = 0; t < sections[s].terms.size(); ++t) {
            auto f = detail::term_on_face(sections[s].terms[t], face);
            bool dup = false;
            for (std::size_t r : reps[s]) {
                auto& g = forms[s][r];
                if (g.a == f.a && g.c == f.c) dup = true;
            }
            forms[s].push_back(f);
            if (dup) tied[s] = true;
            else reps[s].push_back(t);
        }
    }
    // ties on the whole face: a duplicated representative that is dominant is tied
    auto coincides = [&](std::size_t s, std::size_t i, std::size_t j) {
        return forms[s][i].a == forms[s][j].a && forms[s][i].c == forms[s][j].c;
    };

    auto less_than = [&](std::size_t s, std::size_t i, std::size_t j) {
        // term i strictly below term j:  f_j - f_i > 0
        StrictInequality q;
        q.a.resize(k);
        for (std::size_t v = 0; v < k; ++v) q.a[v] = forms[s][j].a[v] - forms[s][i].a[v];
        q.c = forms[s][j].c - forms[s][i].c;
        return q;
    };

    std::vector<std::size_t> choice(sections.size());
    std::function<void(std::size_t, std::vector<StrictInequality>&)> dfs = [&](std::size_t s,
                                                                               std::vector<StrictInequality>& sys) {
        if (s == sections.size()) {
            auto y = detail::strict_feasible_point(sys, k);
            if (!y) return;
            Domain d;
            d.dominant = choice;
            d.witness = detail::face_point(face, *y);
            d.tied.resize(sections.size());
            for (std::size_t q = 0; q < sections.size(); ++q) {
                bool t = false;
                for (std::size_t j = 0; j < forms[q].size(); ++j)
                    if (j != choice[q] && coincides(q, choice[q], j)) t = true;
                d.tied[q] = t;
                if (t) out.tie_flag = true;
            }
            out.domains.push_back(std::move(d));
            return;
        }
        for (std::size_t i : reps[s]) {
            std::size_t before = sys.size();
            for (std::size_t j : reps[s])
                if (j != i) sys.push_back(less_than(s, i, j));
            if (detail::strict_feasible_point(sys, k)) {
                choice[s] = i;
                dfs(s + 1, sys);
            }
            sys.resize(before);
        }
    };
    auto sys = detail::face_interior(k);
    dfs(0, sys);

    // walls: tie of two representatives that are below every other term, restricted to the interior
    for (std::size_t s = 0; s < sections.size(); ++s) {
        for (std::size_t a = 0; a < reps[s].size(); ++a)
            for (std::size_t b = a + 1; b < reps[s].size(); ++b) {
                std::size_t i = reps[s][a], j = reps[s][b];
                auto diff = less_than(s, i, j);  // f_j - f_i
                // eliminate one variable using f_i = f_j
                std::size_t pv = k;
                for (std::size_t v = 0; v < k; ++v)
                    if (diff.a[v] != 0) {
                        pv = v;
                        break;
                    }
                if (pv == k) continue;
                auto substitute = [&](const StrictInequality& q) {
                    // replace y_pv by -(sum_{v != pv} diff.a[v] y_v + diff.c) / diff.a[pv]
                    StrictInequality r;
                    r.a.assign(k > 0 ? k - 1 : 0, Rational(0));
                    Rational f = q.a[pv] / diff.a[pv];
                    r.c = q.c - f * diff.c;
                    std::size_t w = 0;
                    for (std::size_t v = 0; v < k; ++v) {
                        if (v == pv) continue;
                        r.a[w++] = q.a[v] - f * diff.a[v];
                    }
                    return r;
                };
                std::vector<StrictInequality> wall_sys;
                for (const auto& q : detail::face_interior(k)) wall_sys.push_back(substitute(q));
                for (std::size_t m : reps[s])
                    if (m != i && m != j) wall_sys.push_back(substitute(less_than(s, i, m)));
                bool bad = false;
                for (const auto& q : wall_sys)
                    if (detail::trivially_false(q)) bad = true;
                if (bad) continue;
                auto y = detail::strict_feasible_point(wall_sys, k - 1);
                if (!y) continue;
                std::vector<Rational> lambda(k);
                std::size_t w = 0;
                Rational acc = diff.c;
                for (std::size_t v = 0; v < k; ++v) {
                    if (v == pv) continue;
                    lambda[v] = (*y)[w++];
                    acc += diff.a[v] * lambda[v];
                }
                lambda[pv] = -acc / diff.a[pv];
                out.walls.push_back({s, i, j, detail::face_point(face, lambda)});
            }
    }
    if (std::any_of(tied.begin(), tied.end(), [](bool b) { return b; }) && out.domains.empty()) out.tie_flag = true;
    return out;
}

/// Indices of dominant terms at a point; several indices mean a tie there.
inline std::vector<std::size_t> dominant_terms_at(const TropicalSection& s, const RationalPoint& x) {
    Rational best = val_at(s, x);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.terms.size(); ++i)
        if (term_value(s.terms[i], x) == best) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// Exponent classes and valuative independence

/// Partition of exponents into classes modulo Z*b (b empty: exact equality), in order of first appearance.
inline std::vector<std::vector<std::size_t>> exponent_classes(const std::vector<std::vector<std::int64_t>>& exps,
                                                              const std::vector<std::int64_t>& b) {
    auto same_class = [&](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
        require(x.size() == y.size(), ErrorCode::DimensionMismatch, "exponents of different length");
        if (b.empty()) return x == y;
        require(b.size() == x.size(), ErrorCode::DimensionMismatch, "exponent length differs from b");
        std::optional<std::int64_t> n;
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::int64_t diff = x[i] - y[i];
            if (b[i] == 0) {
                if (diff != 0) return false;
                continue;
            }
            if (diff % b[i] != 0) return false;
            std::int64_t q = diff / b[i];
            if (n && *n != q) return false;
            n = q;
        }
        return true;
    };
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        bool placed = false;
        for (auto& cls : classes)
            if (same_class(exps[cls.front()], exps[i])) {
                cls.push_back(i);
                placed = true;
                break;
            }
        if (!placed) classes.push_back({i});
    }
    return classes;
}

struct IndependenceVerdict {
    bool independent = true;
    /// On failure: the sections whose dominant terms share a class, and integer
    /// coefficients of a vanishing combination of their coefficient vectors.
    std::vector<std::size_t> witness_sections;
    std::vector<BigInt> witness_kernel;
    std::vector<std::vector<std::size_t>> classes;  ///< section indices grouped by class
};

/// Independence test given the dominant term of each section on the region.
inline IndependenceVerdict independence_from_dominant(const std::vector<TropicalSection>& sections,
                                                      const std::vector<std::size_t>& dominant,
                                                      const Presentation& pres) {
    IndependenceVerdict v;
    std::vector<std::vector<std::int64_t>> exps;
    for (std::size_t s = 0; s < sections.size(); ++s) exps.push_back(sections[s].terms[dominant[s]].exponent);
    v.classes = exponent_classes(exps, pres.b);
    for (const auto& cls : v.classes) {
        if (cls.size() < 2) {
            const auto& c = sections[cls.front()].terms[dominant[cls.front()]].coeff;
            if (std::all_of(c.begin(), c.end(), [](const Rational& r) { return r == 0; })) {
                v.independent = false;
                v.witness_sections = cls;
                v.witness_kernel = {1};
                return v;
            }
            continue;
        }
        const std::size_t dim = sections[cls.front()].terms[dominant[cls.front()]].coeff.size();
        linalg::Matrix<Rational> m(dim, std::vector<Rational>(cls.size()));
        for (std::size_t j = 0; j < cls.size(); ++j) {
            const auto& c = sections[cls[j]].terms[dominant[cls[j]]].coeff;
            require(c.size() == dim, ErrorCode::DimensionMismatch, "coefficient vectors of different length");
            for (std::size_t r = 0; r < dim; ++r) m[r][j] = c[r];
        }
        auto ker = linalg::kernel(m, cls.size());
        if (!ker.empty()) {
            v.independent = false;
            v.witness_sections = cls;
            v.witness_kernel = linalg::primitive_integer(ker.front());
            return v;
        }
    }
    return v;
}

/// Independence on the region containing `point`; TieOnRegion if a dominant term is not unique there.
inline IndependenceVerdict check_valuative_independence(const std::vector<TropicalSection>& sections,
                                                        const RationalPoint& point, const Presentation& pres) {
    std::vector<std::size_t> dominant;
    for (const auto& s : sections) {
        auto d = dominant_terms_at(s, point);
        require(d.size() == 1, ErrorCode::TieOnRegion, "dominant term is not unique; refine the region");
        dominant.push_back(d.front());
    }
    return independence_from_dominant(sections, dominant, pres);
}

inline IndependenceVerdict check_valuative_independence(const std::vector<TropicalSection>& sections,
                                                        const Domain& domain, const Presentation& pres) {
    for (bool t : domain.tied) require(!t, ErrorCode::TieOnRegion, "dominant term is not unique on the region");
    return independence_from_dominant(sections, domain.dominant, pres);
}

/// Checks every domain of the face; returns the first failure or an overall pass.
inline IndependenceVerdict check_valuative_independence(const std::vector<TropicalSection>& sections,
                                                        const Face& face, const Presentation& pres) {
    auto parts = dominant_regions(sections, face);
    IndependenceVerdict last;
    for (const auto& d : parts.domains) {
        last = check_valuative_independence(sections, d, pres);
        if (!last.independent) return last;
    }
    return last;
}

/// Symbolic K-linear combination sum a_i t^{k_i} s_i; monomials are merged by full exponent.
inline TropicalSection combine(const std::vector<TropicalSection>& sections, const std::vector<Rational>& coeffs,
                               const std::vector<std::int64_t>& orders, const Presentation& pres) {
    std::map<std::vector<std::int64_t>, MonomialTerm> merged;
    for (std::size_t s = 0; s < sections.size(); ++s) {
        if (coeffs[s] == 0) continue;
        for (const auto& t : sections[s].terms) {
            MonomialTerm shifted = t;
            shifted.t_order += orders[s];
            for (auto& c : shifted.coeff) c *= coeffs[s];
            auto key = pres.full_exponent(shifted);
            auto it = merged.find(key);
            if (it == merged.end()) {
                merged.emplace(key, shifted);
            } else {
                for (std::size_t i = 0; i < shifted.coeff.size(); ++i) it->second.coeff[i] += shifted.coeff[i];
            }
        }
    }
    TropicalSection out;
    out.level = sections.front().level;
    for (auto& [key, term] : merged)
        if (std::any_of(term.coeff.begin(), term.coeff.end(), [](const Rational& r) { return r != 0; }))
            out.terms.push_back(term);
    return out;
}

// ---------------------------------------------------------------------------
// Lipschitz bound

struct LipschitzBound {
    double bound = 0.0;
    std::string chart = "euclidean-ambient";  ///< norm used: Euclidean norm of the ambient coordinates
};

/// max over terms of |projection of alpha onto the face tangent space| / level.
inline LipschitzBound lipschitz_bound(const TropicalSection& s, const Face& face) {
    LipschitzBound out;
    const std::size_t k = face.dim();
    if (k == 0) return out;
    auto edges = detail::edge_matrix(face.vertices);
    // orthonormalize the edge directions (Gram-Schmidt in double)
    std::vector<std::vector<double>> basis;
    for (const auto& e : edges) {
        auto v = to_double(e);
        for (const auto& q : basis) {
            double dot = 0.0;
            for (std::size_t c = 0; c < v.size(); ++c) dot += v[c] * q[c];
            for (std::size_t c = 0; c < v.size(); ++c) v[c] -= dot * q[c];
        }
        double n = 0.0;
        for (double c : v) n += c * c;
        n = std::sqrt(n);
        for (double& c : v) c /= n;
        basis.push_back(v);
    }
    for (const auto& t : s.terms) {
        double sq = 0.0;
        for (const auto& q : basis) {
            double dot = 0.0;
            for (std::size_t c = 0; c < q.size(); ++c) dot += static_cast<double>(t.exponent[c]) * q[c];
            sq += dot * dot;
        }
        out.bound = std::max(out.bound, std::sqrt(sq) / static_cast<double>(s.level));
    }
    return out;
}

}  // namespace kdual
