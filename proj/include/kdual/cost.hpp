#pragma once

// Cost functions c(x, p) on Sk x B: bilinear pairings, Fekete limits of theta
// valuations, the closed-form abelian theta cost, and the checks of
// subadditivity and of the bound -val/l >= c.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdual/core/error.hpp"
#include "kdual/core/rational.hpp"
#include "kdual/mumford.hpp"
#include "kdual/polyhedral.hpp"
#include "kdual/tropical.hpp"

namespace kdual {

using Point = std::vector<double>;

struct CostFunction {
    std::shared_ptr<const IntegralPolyhedralComplex> source;
    std::shared_ptr<const IntegralPolyhedralComplex> target;
    std::function<double(const Point& x, const Point& p)> evaluator;
    double lipschitz_x = std::numeric_limits<double>::infinity();
    bool convex_in_p = false;
    bool bilinear = false;
    std::string provenance;

    double operator()(const Point& x, const Point& p) const { return evaluator(x, p); }
};

inline double dot(const Point& a, const Point& b) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "dimension mismatch in pairing");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// c(x, p) = <x, p>.
inline CostFunction pairing_cost(std::shared_ptr<const IntegralPolyhedralComplex> source,
                                 std::shared_ptr<const IntegralPolyhedralComplex> target) {
    require(source && target, ErrorCode::InvariantViolation, "pairing needs both complexes");
    require(source->ambient_dim == target->ambient_dim, ErrorCode::DimensionMismatch,
            "pairing needs dual spaces of equal dimension");
    CostFunction c;
    c.source = std::move(source);
    c.target = std::move(target);
    c.evaluator = [](const Point& x, const Point& p) { return dot(x, p); };
    double rad = 0.0;
    for (const auto& f : c.target->faces)
        for (const auto& v : f.vertices) rad = std::max(rad, std::sqrt(dot(to_double(v), to_double(v))));
    c.lipschitz_x = rad;
    c.convex_in_p = true;
    c.bilinear = true;
    c.provenance = "pairing";
    return c;
}

/// The role-swapped cost c^v(p, x) = c(x, p), with source and target exchanged.
inline CostFunction swapped(const CostFunction& c) {
    CostFunction d;
    d.source = c.target;
    d.target = c.source;
    auto eval = c.evaluator;
    d.evaluator = [eval](const Point& p, const Point& x) { return eval(x, p); };
    d.bilinear = c.bilinear;
    d.convex_in_p = c.bilinear;
    if (c.bilinear && c.source) {
        double rad = 0.0;
        for (const auto& f : c.source->faces)
            for (const auto& v : f.vertices) rad = std::max(rad, std::sqrt(dot(to_double(v), to_double(v))));
        d.lipschitz_x = rad;
    }
    d.provenance = c.provenance + "-swapped";
    return d;
}

// ---------------------------------------------------------------------------
// Theta families

/// Per-level bases of sections labeled by rational points of B, with their valuations.
struct ThetaFamily {
    std::string name;
    std::size_t target_dim = 1;
    Presentation presentation;
    /// Levels for which data exists; empty means every level.
    std::vector<std::int64_t> levels;
    std::function<std::vector<RationalPoint>(std::int64_t)> labels;
    /// val_x(theta_p^l) in the model's local trivialization.
    std::function<double(std::int64_t, const RationalPoint&, const Point&)> valuation;
    /// Optional explicit sections (e.g. for independence checks) at level l.
    std::function<std::vector<TropicalSection>(std::int64_t)> sections;
    /// Number of basis sections attached to a label (1 unless stated otherwise).
    std::function<std::int64_t(std::int64_t, const RationalPoint&)> multiplicity;

    [[nodiscard]] bool has_level(std::int64_t l) const {
        return l >= 1 && (levels.empty() || std::find(levels.begin(), levels.end(), l) != levels.end());
    }

    void require_level(std::int64_t l) const {
        require(has_level(l), ErrorCode::MissingLevel, "family '" + name + "' has no level " + std::to_string(l));
    }

    [[nodiscard]] double val(std::int64_t l, const RationalPoint& p, const Point& x) const {
        require_level(l);
        return valuation(l, p, x);
    }

    [[nodiscard]] std::int64_t mult(std::int64_t l, const RationalPoint& p) const {
        return multiplicity ? multiplicity(l, p) : 1;
    }
};

/// Family from explicit sections per level; labels are taken from the sections.
inline ThetaFamily explicit_family(std::string name, std::map<std::int64_t, std::vector<TropicalSection>> by_level,
                                   Presentation pres = {}) {
    ThetaFamily f;
    f.name = std::move(name);
    f.presentation = std::move(pres);
    auto data = std::make_shared<std::map<std::int64_t, std::vector<TropicalSection>>>(std::move(by_level));
    for (const auto& [l, s] : *data) {
        f.levels.push_back(l);
        for (const auto& sec : s) {
            require(sec.label.has_value(), ErrorCode::InvariantViolation, "family sections need labels");
            f.target_dim = sec.label->size();
        }
    }
    f.labels = [data](std::int64_t l) {
        std::vector<RationalPoint> out;
        for (const auto& s : data->at(l)) out.push_back(*s.label);
        return out;
    };
    f.valuation = [data](std::int64_t l, const RationalPoint& p, const Point& x) {
        for (const auto& s : data->at(l))
            if (*s.label == p) return val_at(s, x);
        fail(ErrorCode::InvariantViolation, "label is not a basis index at this level");
    };
    f.sections = [data](std::int64_t l) { return data->at(l); };
    return f;
}

/// Label at level l nearest to p (Euclidean), ties to the lexicographically smallest.
inline RationalPoint nearest_label(const ThetaFamily& family, std::int64_t l, const Point& p) {
    family.require_level(l);
    auto labels = family.labels(l);
    require(!labels.empty(), ErrorCode::MissingLevel, "no labels at level");
    std::optional<RationalPoint> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& q : labels) {
        double d = 0.0;
        auto qd = to_double(q);
        for (std::size_t i = 0; i < qd.size(); ++i) d += (qd[i] - p[i]) * (qd[i] - p[i]);
        if (d < best_d || (d == best_d && q < *best)) {
            best_d = d;
            best = q;
        }
    }
    return *best;
}

struct FeketeEstimate {
    double estimate = 0.0;
    /// -val/l >= c at every level, so the smallest per-level value is the best upper bound on c.
    double inf = std::numeric_limits<double>::infinity();
    double sup = -std::numeric_limits<double>::infinity();
    std::vector<double> per_level;
    std::vector<RationalPoint> labels;
};

/// -val_x(theta_{p_l}^l) / l along an increasing level schedule.
inline FeketeEstimate fekete_cost_estimate(const ThetaFamily& family, const Point& x, const Point& p,
                                           const std::vector<std::int64_t>& schedule) {
    require(!schedule.empty(), ErrorCode::MissingLevel, "empty level schedule");
    FeketeEstimate out;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        std::int64_t l = schedule[i];
        if (i) require(l > schedule[i - 1], ErrorCode::InvariantViolation, "level schedule must increase");
        auto label = nearest_label(family, l, p);
        double v = -family.val(l, label, x) / static_cast<double>(l);
        out.per_level.push_back(v);
        out.labels.push_back(label);
        out.sup = std::max(out.sup, v);
        out.inf = std::min(out.inf, v);
    }
    out.estimate = out.per_level.back();
    return out;
}

// ---------------------------------------------------------------------------
// Abelian theta cost

/// c(x, p) = -min_gamma [<x, p+gamma> + Phi(p+gamma)] + min_m [<x, m> + Phi(m)].
/// window_radius 0 walks the convex objective to its minimum; a positive radius scans a
/// fixed window and fails with WindowNotConverged if the minimum sits on its boundary.
inline double abelian_theta_cost(const MumfordData& data, const Point& x, const Point& p,
                                 std::int64_t window_radius = 0) {
    require(x.size() == data.rank() && p.size() == data.rank(), ErrorCode::DimensionMismatch, "rank mismatch");
    double c = 0.0;
    for (std::size_t i = 0; i < data.rank(); ++i) {
        const auto& f = data.factors[i];
        double m = window_radius > 0 ? f.min_in_window(x[i], p[i], window_radius) : f.min_over_gamma(x[i], p[i]).value;
        c += -m + f.frame(x[i]);
    }
    return c;
}

inline CostFunction abelian_cost(const MumfordData& data, std::shared_ptr<const IntegralPolyhedralComplex> source,
                                 std::shared_ptr<const IntegralPolyhedralComplex> target) {
    data.validate();
    CostFunction c;
    c.source = std::move(source);
    c.target = std::move(target);
    c.evaluator = [data](const Point& x, const Point& p) { return abelian_theta_cost(data, x, p); };
    // |d/dx| of each factor is bounded by the period of Gamma (|p + gamma - m| over the minimizers)
    double lip = 0.0;
    for (const auto& f : data.factors) lip += static_cast<double>(f.period);
    c.lipschitz_x = lip;
    c.convex_in_p = true;
    c.provenance = "abelian";
    return c;
}

/// Theta family of Mumford data: labels k/l in [0, period) per factor, normalized valuations
/// l * (min_gamma [<x, p+gamma> + Phi(p+gamma)] - min_m [<x, m> + Phi(m)]), and explicit
/// sections with exponents l(p+gamma), t-orders l*Phi(p+gamma) over a window covering the
/// minimizers for x in one period of the skeleton.
inline ThetaFamily theta_family(const MumfordData& data) {
    data.validate();
    ThetaFamily f;
    f.name = "abelian";
    f.target_dim = data.rank();
    f.presentation = Presentation{};
    f.labels = [data](std::int64_t l) {
        std::vector<RationalPoint> out{RationalPoint{}};
        for (const auto& fac : data.factors) {
            std::vector<RationalPoint> next;
            for (const auto& prefix : out)
                for (std::int64_t k = 0; k < l * fac.period; ++k) {
                    auto q = prefix;
                    q.emplace_back(k, l);
                    next.push_back(std::move(q));
                }
            out = std::move(next);
        }
        return out;
    };
    f.valuation = [data](std::int64_t l, const RationalPoint& p, const Point& x) {
        return static_cast<double>(l) * data.normalized_valuation(x, to_double(p));
    };
    f.sections = [data, labels = f.labels](std::int64_t l) {
        // window of gamma indices per factor covering minimizers for x in [0, shift]
        std::vector<std::pair<std::int64_t, std::int64_t>> window;
        for (const auto& fac : data.factors) {
            std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
            for (double x : {0.0, static_cast<double>(fac.shift)})
                for (double p : {0.0, static_cast<double>(fac.period)}) {
                    auto j = fac.min_over_gamma(x, p).argmin;
                    lo = std::min(lo, j);
                    hi = std::max(hi, j);
                }
            window.emplace_back(lo - 2, hi + 2);
        }
        std::vector<TropicalSection> out;
        for (const auto& p : labels(l)) {
            TropicalSection s;
            s.level = l;
            s.label = p;
            std::vector<std::int64_t> j(data.rank());
            for (std::size_t i = 0; i < j.size(); ++i) j[i] = window[i].first;
            while (true) {
                MonomialTerm t;
                Rational phi = 0;
                for (std::size_t i = 0; i < j.size(); ++i) {
                    Rational m = p[i] + Rational(j[i] * data.factors[i].period);
                    t.exponent.push_back(to_int64(Rational(l) * m));
                    phi += data.factors[i].phi(m);
                }
                t.t_order = to_int64(Rational(l) * phi);
                t.coeff = {Rational(1)};
                s.terms.push_back(std::move(t));
                std::size_t i = 0;
                while (i < j.size() && ++j[i] > window[i].second) {
                    j[i] = window[i].first;
                    ++i;
                }
                if (i == j.size()) break;
            }
            out.push_back(std::move(s));
        }
        return out;
    };
    return f;
}

// ---------------------------------------------------------------------------
// Bound verification

struct CostSample {
    Point x;
    RationalPoint p;
    std::int64_t l = 1;
    /// Optional second label and level for the subadditivity check.
    std::optional<RationalPoint> p2;
    std::int64_t l2 = 1;
};

struct CostViolation {
    std::string kind;  ///< "subadditivity" or "bound"
    std::size_t sample = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct CostBoundReport {
    std::size_t bound_checks = 0;
    std::size_t subadditivity_checks = 0;
    std::size_t skipped = 0;  ///< pairs not on a common top face of B
    std::vector<CostViolation> violations;
};

/// Checks val(p,l) + val(p2,l2) <= val((l p + l2 p2)/(l+l2), l+l2) and -val(p,l)/l >= c(x,p) - tol.
inline CostBoundReport verify_cost_bounds(const ThetaFamily& family, const CostFunction& cost,
                                          const std::vector<CostSample>& samples, double tol = 1e-9) {
    CostBoundReport rep;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        double v = family.val(s.l, s.p, s.x);
        double lhs = -v / static_cast<double>(s.l);
        double rhs = cost(s.x, to_double(s.p));
        ++rep.bound_checks;
        if (lhs < rhs - tol) rep.violations.push_back({"bound", i, lhs, rhs});
        if (!s.p2) continue;
        bool common = false;
        if (cost.target) {
            for (auto fi : cost.target->top_faces())
                if (face_contains(cost.target->faces[fi], s.p) && face_contains(cost.target->faces[fi], *s.p2))
                    common = true;
        } else {
            common = true;
        }
        if (!common) {
            ++rep.skipped;
            continue;
        }
        RationalPoint r(s.p.size());
        for (std::size_t c = 0; c < r.size(); ++c)
            r[c] = (Rational(s.l) * s.p[c] + Rational(s.l2) * (*s.p2)[c]) / Rational(s.l + s.l2);
        double left = v + family.val(s.l2, *s.p2, s.x);
        double right = family.val(s.l + s.l2, r, s.x);
        ++rep.subadditivity_checks;
        if (left > right + tol) rep.violations.push_back({"subadditivity", i, left, right});
    }
    return rep;
}

}  // namespace kdual
