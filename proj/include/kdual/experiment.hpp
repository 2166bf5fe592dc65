#pragma once

// Config-driven runs: family block -> discretization -> solve -> oracle cross-check -> diagnostics,
// with JSON/CSV artifacts in a run directory. Column layouts are documented in docs/csv_schema.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdual/core/error.hpp"
#include "kdual/diagnostics.hpp"
#include "kdual/families.hpp"
#include "kdual/lp_oracle.hpp"
#include "kdual/minimize.hpp"

namespace kdual {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Small IO helpers

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json read_json(const fs::path& p, ErrorCode missing = ErrorCode::ConfigError) {
    std::ifstream in(p);
    require(in.good(), missing, "cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, p.string() + ": " + e.what());
    }
}

inline void write_text(const fs::path& p, const std::string& s) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    require(out.good(), ErrorCode::ConfigError, "cannot write " + p.string());
    out << s;
}

inline void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

/// Rejects keys outside `allowed`.
inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    require(j.is_object(), ErrorCode::ConfigError, where + " must be an object");
    for (const auto& [k, v] : j.items())
        require(allowed.count(k) > 0, ErrorCode::ConfigError, "unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, "bad value for '" + key + "': " + e.what());
    }
}

inline Rational json_rational(const json& v, const std::string& what) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>());
    } catch (const Error&) {
    }
    fail(ErrorCode::ConfigError, what + " must be an integer or a rational string like \"1/32\"");
}

inline double positive(const json& j, const std::string& key, double fallback, const std::string& where) {
    double v = get_or<double>(j, key, fallback);
    require(v > 0.0, ErrorCode::ConfigError, where + "." + key + " must be positive");
    return v;
}

// ---------------------------------------------------------------------------
// Config

struct Tolerances {
    double lp_relative = 1e-6;
    double dual_sup = 1e-4;
    double functional_gap = 1e-6;
    double marginal = 1e-9;
    double cost_bounds = 1e-9;
};

struct ExperimentConfig {
    json family;
    Rational h{1, 32};
    std::size_t grid_cap = 400;
    MinimizeConfig solver;
    bool lp_oracle = true;
    bool pushforward = true;
    bool ma = true;
    bool duality = false;
    std::size_t cost_bound_samples = 0;
    Tolerances tol;
    std::string output = "run";
    std::uint64_t seed = 1;
    json raw;
};

inline ExperimentConfig parse_config(const json& j) {
    check_keys(j, {"family", "discretization", "solver", "diagnostics", "tolerances", "output", "seed"}, "config");
    ExperimentConfig c;
    c.raw = j;
    require(j.contains("family"), ErrorCode::ConfigError, "config needs a family block");
    c.family = j.at("family");
    check_keys(c.family, {"family", "factors", "rank", "levels", "delta", "ln_norm", "n", "d", "ambient_dim", "hilbert_M"},
               "family");
    require(c.family.contains("family"), ErrorCode::ConfigError, "family block needs \"family\"");
    if (j.contains("discretization")) {
        const auto& d = j.at("discretization");
        check_keys(d, {"h", "grid_cap"}, "discretization");
        if (d.contains("h")) c.h = json_rational(d.at("h"), "discretization.h");
        require(c.h > 0 && c.h <= 1, ErrorCode::ConfigError, "discretization.h must lie in (0, 1]");
        c.grid_cap = get_or<std::size_t>(d, "grid_cap", c.grid_cap);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, {"method", "tol", "max_iter", "damping", "patience"}, "solver");
        c.solver.method = parse_method(get_or<std::string>(s, "method", "shortest-path"));
        c.solver.tol = positive(s, "tol", c.solver.tol, "solver");
        c.solver.damping = positive(s, "damping", c.solver.damping, "solver");
        c.solver.max_iter = get_or<std::size_t>(s, "max_iter", c.solver.max_iter);
        c.solver.patience = get_or<std::size_t>(s, "patience", c.solver.patience);
        require(c.solver.max_iter > 0, ErrorCode::ConfigError, "solver.max_iter must be positive");
    }
    if (j.contains("diagnostics")) {
        const auto& d = j.at("diagnostics");
        check_keys(d, {"lp_oracle", "pushforward", "ma_residual", "duality", "cost_bound_samples"}, "diagnostics");
        c.lp_oracle = get_or<bool>(d, "lp_oracle", c.lp_oracle);
        c.pushforward = get_or<bool>(d, "pushforward", c.pushforward);
        c.ma = get_or<bool>(d, "ma_residual", c.ma);
        c.duality = get_or<bool>(d, "duality", c.duality);
        c.cost_bound_samples = get_or<std::size_t>(d, "cost_bound_samples", 0);
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, {"lp_relative", "dual_sup", "functional_gap", "marginal", "cost_bounds"}, "tolerances");
        c.tol.lp_relative = positive(t, "lp_relative", c.tol.lp_relative, "tolerances");
        c.tol.dual_sup = positive(t, "dual_sup", c.tol.dual_sup, "tolerances");
        c.tol.functional_gap = positive(t, "functional_gap", c.tol.functional_gap, "tolerances");
        c.tol.marginal = positive(t, "marginal", c.tol.marginal, "tolerances");
        c.tol.cost_bounds = positive(t, "cost_bounds", c.tol.cost_bounds, "tolerances");
    }
    c.output = get_or<std::string>(j, "output", c.output);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    return c;
}

// ---------------------------------------------------------------------------
// Family blocks

inline MumfordData parse_mumford(const json& f) {
    MumfordData d;
    if (f.contains("factors")) {
        for (const auto& fj : f.at("factors")) {
            check_keys(fj, {"period", "slopes", "shift"}, "family.factors[]");
            Rank1Mumford r;
            r.period = get_or<std::int64_t>(fj, "period", 1);
            r.slopes = get_or<std::vector<std::int64_t>>(fj, "slopes", {1});
            r.shift = get_or<std::int64_t>(fj, "shift", 1);
            d.factors.push_back(r);
        }
    } else {
        d = MumfordData::standard(get_or<std::size_t>(f, "rank", 1));
    }
    try {
        d.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, std::string("invalid Mumford data: ") + e.what());
    }
    return d;
}

inline IntermediateData parse_intermediate(const json& f) {
    IntermediateData d;
    d.n = get_or<std::int64_t>(f, "n", d.n);
    d.d = get_or<std::vector<std::int64_t>>(f, "d", d.d);
    d.ln_norm = get_or<double>(f, "ln_norm", d.ln_norm);
    if (f.contains("hilbert_M")) {
        d.hilbert_M = get_or<std::vector<std::int64_t>>(f, "hilbert_M", {});
    } else {
        d.hilbert_M = projective_hilbert(get_or<std::int64_t>(f, "ambient_dim", 3), 64);
    }
    try {
        d.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, std::string("invalid intermediate data: ") + e.what());
    }
    return d;
}

struct BuiltFamily {
    std::string kind;
    TransportProblem problem;
    std::optional<ThetaFamily> theta;
    std::optional<MumfordData> mumford;
};

inline BuiltFamily build_family(const ExperimentConfig& cfg) {
    BuiltFamily b;
    b.kind = get_or<std::string>(cfg.family, "family", "");
    if (b.kind == "abelian") {
        auto d = parse_mumford(cfg.family);
        auto inst = mumford_family(d, get_or<std::vector<std::int64_t>>(cfg.family, "levels", {}), cfg.h);
        b.problem = std::move(inst.problem);
        b.theta = std::move(inst.family);
        b.mumford = d;
    } else if (b.kind == "toric") {
        require(cfg.family.contains("delta"), ErrorCode::ConfigError, "toric family needs \"delta\"");
        std::vector<RationalPoint> verts;
        for (const auto& v : cfg.family.at("delta")) {
            RationalPoint p;
            for (const auto& x : v) p.push_back(json_rational(x, "delta coordinate"));
            verts.push_back(std::move(p));
        }
        try {
            b.problem = toric_pair(verts, cfg.h, get_or<double>(cfg.family, "ln_norm", 0.0)).problem;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NotReflexive) fail(ErrorCode::ConfigError, e.what());
            throw;
        }
    } else if (b.kind == "intermediate") {
        b.problem = intermediate_family(parse_intermediate(cfg.family), cfg.h);
    } else if (b.kind == "zero") {
        auto cx = std::make_shared<const IntegralPolyhedralComplex>(circle_complex(1));
        CostFunction c;
        c.source = c.target = cx;
        c.evaluator = [](const Point&, const Point&) { return 0.0; };
        c.lipschitz_x = 0.0;
        c.provenance = "zero";
        auto mu = quadrature(*cx, cfg.h).normalized();
        b.problem = make_problem(c, mu, mu);
    } else {
        fail(ErrorCode::ConfigError, "unknown family '" + b.kind + "' (abelian, toric, intermediate, zero)");
    }
    require(b.problem.mu0->size() <= cfg.grid_cap && b.problem.nu0->size() <= cfg.grid_cap, ErrorCode::ConfigError,
            "grid exceeds discretization.grid_cap");
    return b;
}

// ---------------------------------------------------------------------------
// Assertions and artifacts

struct AssertionRow {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline json to_json(const AssertionRow& a) {
    return {{"name", a.name}, {"expected", a.expected}, {"observed", a.observed}, {"tolerance", a.tolerance}, {"pass", a.pass}};
}

inline std::string potential_csv(const PotentialField& f, const std::vector<double>& weights) {
    std::ostringstream out;
    const auto& g = *f.support;
    std::size_t dim = g.coords.empty() ? 0 : g.coords[0].size();
    out << "index";
    for (std::size_t c = 0; c < dim; ++c) out << ",x" << c;
    out << ",weight,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << i;
        for (double x : g.coords[i]) out << ',' << fmt(x);
        out << ',' << fmt(weights[i]) << ',' << fmt(f.values[i]) << '\n';
    }
    return out.str();
}

inline std::vector<double> read_potential_csv(const fs::path& p, std::size_t expected) {
    std::ifstream in(p);
    require(in.good(), ErrorCode::IncompleteRun, "missing " + p.string());
    std::string line;
    std::getline(in, line);
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto pos = line.rfind(',');
        v.push_back(std::stod(line.substr(pos + 1)));
    }
    require(v.size() == expected, ErrorCode::IncompleteRun, p.string() + " does not match the problem grid");
    return v;
}

inline std::string plan_csv(const std::vector<PlanEntry>& plan) {
    std::ostringstream out;
    out << "i,j,mass\n";
    for (const auto& e : plan) out << e.i << ',' << e.j << ',' << fmt(e.mass) << '\n';
    return out.str();
}

struct RunOutcome {
    int exit_code = 0;
    std::vector<AssertionRow> assertions;
    json result;
};

/// Sampled (x, p, l) triples for verify_cost_bounds on a rank-1/2 abelian family. Levels are
/// drawn from those the family carries; a second label is attached only when l + l2 is also
/// available, so the subadditivity check never asks for a missing level.
inline std::vector<CostSample> abelian_cost_samples(const MumfordData& d, const ThetaFamily& fam, std::size_t count,
                                                    std::uint64_t seed) {
    std::vector<std::int64_t> levels = fam.levels;
    if (levels.empty()) levels = {1, 2, 3, 4, 5, 6, 7, 8};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> lv(0, levels.size() - 1);
    std::vector<CostSample> out;
    for (std::size_t s = 0; s < count; ++s) {
        CostSample cs;
        cs.l = levels[lv(rng)];
        std::int64_t l2 = levels[lv(rng)];
        bool pair = fam.has_level(cs.l + l2);
        RationalPoint p2;
        for (const auto& f : d.factors) {
            std::uniform_real_distribution<double> ux(0.0, static_cast<double>(f.shift));
            cs.x.push_back(ux(rng));
            std::uniform_int_distribution<std::int64_t> k(0, cs.l * f.period - 1), k2(0, l2 * f.period - 1);
            cs.p.emplace_back(k(rng), cs.l);
            p2.emplace_back(k2(rng), l2);
        }
        if (pair) {
            cs.p2 = p2;
            cs.l2 = l2;
        }
        out.push_back(std::move(cs));
    }
    return out;
}

inline RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, bool allow_nonconverged = false) {
    auto fam = build_family(cfg);
    const auto& pr = fam.problem;
    fs::create_directories(out_dir);
    json normalized = cfg.raw;
    normalized["seed"] = cfg.seed;
    write_json(out_dir / "config.json", normalized);

    RunOutcome oc;
    auto add = [&](std::string name, double expected, double observed, double tol) {
        oc.assertions.push_back({std::move(name), expected, observed, tol, std::abs(observed - expected) <= tol});
    };
    auto add_le = [&](std::string name, double observed, double bound) {
        oc.assertions.push_back({std::move(name), 0.0, observed, bound, observed <= bound});
    };

    auto res = minimize_kontorovich(pr, cfg.solver);
    json result = {{"family", fam.kind},
                   {"value", res.value},
                   {"gap", res.gap},
                   {"iterations", res.iterations},
                   {"converged", res.converged},
                   {"method", to_string(res.method)},
                   {"seed", cfg.seed},
                   {"source_points", pr.mu0->size()},
                   {"target_points", pr.nu0->size()},
                   {"h", to_string(cfg.h)},
                   {"ln_norm", pr.ln_norm},
                   {"energy", ma_energy(pr, res.phi)}};

    // transform identities on the returned pair
    auto again = c_transform(res.phi, pr, Direction::SourceToTarget);
    double psi_err = 0.0, pc_err = 0.0;
    for (std::size_t j = 0; j < again.size(); ++j) psi_err = std::max(psi_err, std::abs(again.values[j] - res.psi.values[j]));
    auto proj = project_Pc(res.phi, pr);
    for (std::size_t i = 0; i < proj.size(); ++i) pc_err = std::max(pc_err, std::abs(proj.values[i] - res.phi.values[i]));
    add_le("psi_is_transform_of_phi", psi_err, 1e-12);
    add_le("phi_in_Pc", pc_err, 1e-12);
    if (res.plan) add_le("dual_gap_nonnegative", -res.gap, 1e-9);

    json diag = json::object();
    if (cfg.lp_oracle) {
        auto lp = lp_oracle(pr, {cfg.grid_cap});
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < res.phi.size(); ++i) {
            lo = std::min(lo, res.phi.values[i] - lp.phi.values[i]);
            hi = std::max(hi, res.phi.values[i] - lp.phi.values[i]);
        }
        result["lp_value"] = lp.primal_value;
        result["lp_pivots"] = lp.pivots;
        add("strong_duality", lp.primal_value, res.value, cfg.tol.lp_relative * (1.0 + std::abs(res.value)));
        add_le("dual_potentials_up_to_constant", (hi - lo) / 2.0, cfg.tol.dual_sup);
        if (!res.plan) write_text(out_dir / "plan.csv", plan_csv(lp.plan));
    }
    if (res.plan) write_text(out_dir / "plan.csv", plan_csv(*res.plan));
    if (cfg.pushforward && res.plan) {
        auto r = pushforward_residual(res, pr);
        add_le("plan_marginal", r.linf, cfg.tol.marginal);
        auto a = pushforward_residual(res, pr, false);
        diag["argmax_pushforward"] = {{"linf", a.linf}, {"l1", a.l1}};
    }
    if (cfg.ma && !pr.mu0->face_grids.empty() && pr.cost.source && pr.cost.source->dim <= 2) {
        auto m = ma_residual(res.phi);
        diag["ma_residual"] = {{"max_abs", m.max_abs}, {"flagged", m.flagged}, {"cells", m.density.size()}};
    }
    if (cfg.duality) {
        auto dual = mirror_problem(pr);
        auto rd = minimize_kontorovich(dual, cfg.solver);
        auto rep = duality_check(pr, dual, res, rd);
        diag["duality"] = {{"functional_gap", rep.functional_gap},
                           {"potential_gap", rep.potential_gap},
                           {"precondition_residual", rep.precondition_residual}};
        add_le("mirror_functional_gap", rep.functional_gap, cfg.tol.functional_gap);
        // the mirror optimum is only unique up to constants on self-mirror (abelian) data; on
        // discrete toric grids the dual face can be wide, so the gap is reported but not asserted
        if (fam.kind == "abelian") add_le("mirror_potential_gap", rep.potential_gap, cfg.tol.dual_sup);
    }
    if (cfg.cost_bound_samples > 0) {
        require(fam.mumford.has_value(), ErrorCode::ConfigError, "cost_bound_samples needs an abelian family");
        auto rep = verify_cost_bounds(*fam.theta, pr.cost, abelian_cost_samples(*fam.mumford, *fam.theta, cfg.cost_bound_samples, cfg.seed),
                                      cfg.tol.cost_bounds);
        diag["cost_bounds"] = {{"bound_checks", rep.bound_checks},
                               {"subadditivity_checks", rep.subadditivity_checks},
                               {"skipped", rep.skipped},
                               {"violations", rep.violations.size()}};
        add_le("cost_bound_violations", static_cast<double>(rep.violations.size()), 0.0);
    }

    write_text(out_dir / "phi.csv", potential_csv(res.phi, pr.source_mass));
    write_text(out_dir / "phic.csv", potential_csv(res.psi, pr.target_mass));
    write_json(out_dir / "result.json", result);
    json rows = json::array();
    for (const auto& a : oc.assertions) rows.push_back(to_json(a));
    diag["assertions"] = rows;
    diag["seed"] = cfg.seed;
    write_json(out_dir / "diagnostics.json", diag);

    oc.result = result;
    bool ok = std::all_of(oc.assertions.begin(), oc.assertions.end(), [](const AssertionRow& a) { return a.pass; });
    if (!res.converged && !allow_nonconverged) oc.exit_code = 3;
    else oc.exit_code = ok ? 0 : 1;
    return oc;
}

// ---------------------------------------------------------------------------
// Section files

struct SectionFile {
    std::vector<TropicalSection> sections;
    Presentation presentation;
    std::optional<IntegralPolyhedralComplex> face_complex;
    std::optional<RationalPoint> point;
    std::optional<bool> expect_independent;
    std::optional<std::int64_t> level;
};

/// {"level": l, "labels": [..], "presentation": {"b": [..]}, "face": [[vertex], ...] | "point": [..],
///  "sections": [{"label": .., "terms": [{"alpha": [..], "t_order": k, "coeff": ["1", "2/3"]}]}],
///  "expect_independent": bool}
/// "exponent" is accepted as a synonym of "alpha"; a top-level "labels" array overrides per-section labels.
inline RationalPoint json_label(const json& lj) {
    RationalPoint lab;
    if (lj.is_array())
        for (const auto& x : lj) lab.push_back(json_rational(x, "label"));
    else
        lab.push_back(json_rational(lj, "label"));
    return lab;
}

inline SectionFile parse_section_file(const json& j) {
    check_keys(j, {"level", "labels", "presentation", "face", "point", "sections", "expect_independent"}, "sections file");
    SectionFile f;
    if (j.contains("level")) {
        f.level = get_or<std::int64_t>(j, "level", 0);
        require(*f.level >= 0, ErrorCode::ConfigError, "level must be non-negative");
    }
    if (j.contains("presentation")) {
        check_keys(j.at("presentation"), {"b"}, "presentation");
        f.presentation.b = get_or<std::vector<std::int64_t>>(j.at("presentation"), "b", {});
    }
    require(j.contains("face") != j.contains("point"), ErrorCode::ConfigError, "give exactly one of \"face\" or \"point\"");
    if (j.contains("face")) {
        FaceSpec spec;
        for (const auto& v : j.at("face")) {
            RationalPoint p;
            for (const auto& x : v) p.push_back(json_rational(x, "face vertex"));
            spec.vertices.push_back(std::move(p));
        }
        spec.multiplicities = f.presentation.b;
        f.face_complex = build_complex({spec});
    } else {
        RationalPoint p;
        for (const auto& x : j.at("point")) p.push_back(json_rational(x, "point coordinate"));
        f.point = std::move(p);
    }
    require(j.contains("sections") && j.at("sections").is_array(), ErrorCode::ConfigError, "sections must be an array");
    for (const auto& sj : j.at("sections")) {
        check_keys(sj, {"label", "terms", "tag"}, "section");
        TropicalSection s;
        s.tag = get_or<std::string>(sj, "tag", "");
        if (sj.contains("label")) s.label = json_label(sj.at("label"));
        require(sj.contains("terms") && sj.at("terms").is_array(), ErrorCode::ConfigError, "section needs a terms array");
        for (const auto& tj : sj.at("terms")) {
            check_keys(tj, {"alpha", "exponent", "t_order", "coeff", "coeff_id"}, "term");
            require(tj.contains("alpha") != tj.contains("exponent"), ErrorCode::ConfigError,
                    "term needs exactly one of \"alpha\" or \"exponent\"");
            MonomialTerm t;
            t.exponent = tj.at(tj.contains("alpha") ? "alpha" : "exponent").get<std::vector<std::int64_t>>();
            t.t_order = get_or<std::int64_t>(tj, "t_order", 0);
            t.coeff_id = get_or<std::string>(tj, "coeff_id", "");
            if (tj.contains("coeff"))
                for (const auto& c : tj.at("coeff")) t.coeff.push_back(json_rational(c, "coefficient"));
            else
                t.coeff = {Rational(1)};
            s.terms.push_back(std::move(t));
        }
        try {
            validate_section(s);
        } catch (const Error& e) {
            fail(ErrorCode::ConfigError, std::string("invalid section: ") + e.what());
        }
        f.sections.push_back(std::move(s));
    }
    if (j.contains("labels")) {
        const auto& ls = j.at("labels");
        require(ls.is_array() && ls.size() == f.sections.size(), ErrorCode::ConfigError, "one label per section expected");
        for (std::size_t k = 0; k < ls.size(); ++k) f.sections[k].label = json_label(ls[k]);
    }
    if (j.contains("expect_independent")) f.expect_independent = j.at("expect_independent").get<bool>();
    return f;
}

inline json verdict_json(const IndependenceVerdict& v) {
    json w = json::array();
    for (const auto& k : v.witness_kernel) w.push_back(k.str());
    return {{"independent", v.independent}, {"witness_sections", v.witness_sections}, {"witness_kernel", w},
            {"classes", v.classes}};
}

// ---------------------------------------------------------------------------
// Report

inline std::vector<AssertionRow> load_assertions(const fs::path& run_dir) {
    require(fs::exists(run_dir / "result.json") && fs::exists(run_dir / "diagnostics.json"), ErrorCode::IncompleteRun,
            "run directory lacks result.json or diagnostics.json");
    auto d = read_json(run_dir / "diagnostics.json", ErrorCode::IncompleteRun);
    std::vector<AssertionRow> rows;
    for (const auto& a : d.at("assertions"))
        rows.push_back({a.at("name"), a.at("expected"), a.at("observed"), a.at("tolerance"), a.at("pass")});
    return rows;
}

inline std::string report_csv(const std::vector<AssertionRow>& rows) {
    std::ostringstream out;
    out << "name,expected,observed,tolerance,pass\n";
    for (const auto& a : rows)
        out << a.name << ',' << fmt(a.expected) << ',' << fmt(a.observed) << ',' << fmt(a.tolerance) << ','
            << (a.pass ? "true" : "false") << '\n';
    return out.str();
}

inline std::vector<AssertionRow> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<AssertionRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        require(f.size() == 5, ErrorCode::IncompleteRun, "malformed report row");
        rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), f[4] == "true"});
    }
    return rows;
}

inline std::string report_json(const std::vector<AssertionRow>& rows) {
    json j = json::array();
    for (const auto& a : rows) j.push_back(to_json(a));
    return j.dump(2) + "\n";
}

}  // namespace kdual
