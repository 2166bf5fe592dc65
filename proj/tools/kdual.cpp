// kdual: experiment runner for the discrete Kontorovich dual problem.
//
// Exit codes: 0 ok, 1 assertion failed, 2 config/input error, 3 solver not converged.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "kdual/experiment.hpp"

using namespace kdual;

namespace {

int cmd_solve(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out, bool allow_nc) {
    auto cfg = parse_config(read_json(path));
    if (seed) cfg.seed = *seed;
    if (!out.empty()) cfg.output = out;
    auto oc = run_experiment(cfg, cfg.output, allow_nc);
    std::cout << oc.result.dump(2) << "\n";
    for (const auto& a : oc.assertions)
        if (!a.pass) std::cerr << "assertion failed: " << a.name << " observed " << fmt(a.observed) << "\n";
    if (oc.exit_code == 3) std::cerr << "solver did not converge (use --allow-nonconverged to accept)\n";
    return oc.exit_code;
}

int cmd_check_independence(const std::string& path) {
    auto f = parse_section_file(read_json(path));
    IndependenceVerdict v;
    json out;
    if (f.point) {
        v = check_valuative_independence(f.sections, *f.point, f.presentation);
    } else {
        const auto& cx = *f.face_complex;
        const auto& face = cx.faces[cx.top_faces().at(0)];
        auto parts = dominant_regions(f.sections, face);
        json regions = json::array();
        v.independent = true;
        for (const auto& d : parts.domains) {
            bool tied = std::any_of(d.tied.begin(), d.tied.end(), [](bool t) { return t; });
            json w = json::array();
            for (const auto& x : d.witness) w.push_back(to_string(x));
            json r = {{"witness_point", w}, {"tied", tied}};
            if (!tied) {
                auto rv = check_valuative_independence(f.sections, d, f.presentation);
                r["verdict"] = verdict_json(rv);
                if (!rv.independent && v.independent) v = rv;
            }
            regions.push_back(r);
        }
        out["regions"] = regions;
    }
    out["verdict"] = verdict_json(v);
    std::cout << out.dump(2) << "\n";
    if (f.expect_independent && *f.expect_independent != v.independent) return 1;
    return 0;
}

int cmd_count_sections(const std::string& path) {
    auto j = read_json(path);
    check_keys(j, {"family", "max_level"}, "count-sections config");
    auto data = parse_intermediate(j.at("family"));
    auto max_l = get_or<std::int64_t>(j, "max_level", 8);
    require(max_l >= 0, ErrorCode::ConfigError, "max_level must be non-negative");
    std::cout << "l,enumerated,series,match\n";
    bool ok = true;
    for (std::int64_t l = 0; l <= max_l; ++l) {
        auto sc = section_count(data, l);
        ok = ok && sc.enumerated == sc.series;
        std::cout << l << ',' << sc.enumerated << ',' << sc.series << ',' << (sc.enumerated == sc.series ? "true" : "false")
                  << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_hybrid(const std::string& path, const std::string& out_override) {
    auto j = read_json(path);
    check_keys(j, {"family", "levels", "t_schedule", "grid_points", "extra_window", "output"}, "hybrid config");
    auto data = parse_mumford(j.at("family"));
    require(data.rank() == 1, ErrorCode::ConfigError, "hybrid runs ship for rank-1 data");
    auto levels = get_or<std::vector<std::int64_t>>(j, "levels", {1, 2});
    auto ts = get_or<std::vector<double>>(j, "t_schedule", {1e-2, 1e-4, 1e-8});
    auto points = get_or<std::int64_t>(j, "grid_points", 129);
    require(points >= 2, ErrorCode::ConfigError, "grid_points must be at least 2");
    for (std::size_t k = 0; k < ts.size(); ++k) {
        require(ts[k] > 0.0 && ts[k] < 1.0, ErrorCode::ConfigError, "t_schedule entries must lie in (0, 1)");
        require(k == 0 || ts[k] < ts[k - 1], ErrorCode::ConfigError, "t_schedule must decrease");
    }
    HybridConfig hc;
    hc.extra_window = get_or<std::int64_t>(j, "extra_window", 0);
    fs::path out = out_override.empty() ? fs::path(get_or<std::string>(j, "output", "hybrid")) : fs::path(out_override);
    fs::create_directories(out);
    const double span = static_cast<double>(data.factors[0].shift);
    std::vector<Point> grid;
    for (std::int64_t k = 0; k < points; ++k) grid.push_back({span * static_cast<double>(k) / static_cast<double>(points - 1)});
    std::ostringstream csv;
    csv << "level,t,log_inv_t,sup_error,argmax_x,window\n";
    json summary = json::array();
    bool ok = true;
    for (auto l : levels) {
        auto curve = hybrid_potential_curve(data, l, ts, grid, hc);
        bool decreasing = true;
        for (std::size_t k = 0; k < curve.size(); ++k) {
            const auto& s = curve[k];
            csv << l << ',' << fmt(s.t) << ',' << fmt(s.log_inv_t) << ',' << fmt(s.sup_error) << ',' << fmt(s.argmax_x) << ','
                << s.window << "\n";
            if (k && !(s.sup_error < curve[k - 1].sup_error)) decreasing = false;
        }
        ok = ok && decreasing;
        summary.push_back({{"level", l}, {"strictly_decreasing", decreasing}});
    }
    write_text(out / "hybrid.csv", csv.str());
    write_json(out / "hybrid.json", {{"levels", summary}, {"pass", ok}});
    std::cout << csv.str();
    return ok ? 0 : 1;
}

struct LoadedRun {
    ExperimentConfig cfg;
    BuiltFamily fam;
    TransportResult res;
};

LoadedRun load_run(const fs::path& dir) {
    require(fs::exists(dir / "config.json"), ErrorCode::IncompleteRun, "run directory lacks config.json");
    LoadedRun r{parse_config(read_json(dir / "config.json")), {}, {}};
    r.fam = build_family(r.cfg);
    const auto& pr = r.fam.problem;
    r.res.phi = pr.source_field(read_potential_csv(dir / "phi.csv", pr.mu0->size()));
    r.res.psi = c_transform(r.res.phi, pr, Direction::SourceToTarget);
    r.res.value = kontorovich_value(pr, r.res.phi);
    return r;
}

int cmd_diagnose_ma(const fs::path& dir) {
    auto run = load_run(dir);
    auto m = ma_residual(run.res.phi);
    std::ostringstream csv;
    const auto& fg = run.fam.problem.mu0->face_grids.at(0);
    const double h = 1.0 / static_cast<double>(fg.steps);
    if (fg.barycentric.at(0).size() == 2) {
        csv << "x,value,residual,degenerate\n";
        auto u = face_values_1d(run.res.phi);
        for (std::size_t k = 0; k < m.density.size(); ++k)
            csv << fmt(h * static_cast<double>(k + 1)) << ',' << fmt(u[k + 1]) << ',' << fmt(m.residual[k]) << ','
                << int(m.degenerate[k]) << "\n";
    } else {
        csv << "cell,density,residual,degenerate\n";
        for (std::size_t k = 0; k < m.density.size(); ++k)
            csv << k << ',' << fmt(m.density[k]) << ',' << fmt(m.residual[k]) << ',' << int(m.degenerate[k]) << "\n";
    }
    write_text(dir / "ma.csv", csv.str());
    json s = {{"max_abs", m.max_abs}, {"flagged", m.flagged}, {"cells", m.density.size()}, {"h", h}};
    write_json(dir / "ma.json", s);
    std::cout << s.dump(2) << "\n";
    return 0;
}

int cmd_diagnose_duality(const fs::path& dir) {
    auto run = load_run(dir);
    auto dual = mirror_problem(run.fam.problem);
    auto rd = minimize_kontorovich(dual, run.cfg.solver);
    auto rep = duality_check(run.fam.problem, dual, run.res, rd);
    json s = {{"functional_gap", rep.functional_gap},
              {"potential_gap", rep.potential_gap},
              {"precondition_residual", rep.precondition_residual}};
    write_json(dir / "duality.json", s);
    std::cout << s.dump(2) << "\n";
    return 0;
}

int cmd_report(const fs::path& dir, const std::string& format) {
    auto rows = load_assertions(dir);
    if (format == "csv")
        std::cout << report_csv(rows);
    else if (format == "json")
        std::cout << report_json(rows);
    else
        fail(ErrorCode::ConfigError, "format must be csv or json");
    return std::all_of(rows.begin(), rows.end(), [](const AssertionRow& a) { return a.pass; }) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kdual: Kontorovich dual of non-archimedean Calabi-Yau potentials"};
    app.require_subcommand(1);
    std::string path, out, format = "json";
    std::optional<std::uint64_t> seed;
    bool allow_nc = false;

    auto* solve = app.add_subcommand("solve", "run the pipeline described by a config file");
    solve->add_option("config", path, "experiment config (JSON)")->required();
    solve->add_option("--seed", seed, "override the config seed");
    solve->add_option("--out", out, "override the output directory");
    solve->add_flag("--allow-nonconverged", allow_nc, "exit 0 even if the solver did not converge");

    auto* indep = app.add_subcommand("check-independence", "valuative independence of a sections file");
    indep->add_option("sections", path, "sections file (JSON)")->required();

    auto* count = app.add_subcommand("count-sections", "compare enumerated and generating-series section counts");
    count->add_option("config", path, "intermediate family config (JSON)")->required();

    auto* hybrid = app.add_subcommand("hybrid", "finite-t Fubini-Study potentials against the NA limit");
    hybrid->add_option("config", path, "hybrid config (JSON)")->required();
    hybrid->add_option("--out", out, "override the output directory");

    auto* dma = app.add_subcommand("diagnose-ma", "discrete real Monge-Ampere residual of a finished run");
    dma->add_option("run_dir", path, "run directory")->required();

    auto* ddu = app.add_subcommand("diagnose-duality", "mirror duality check of a finished run");
    ddu->add_option("run_dir", path, "run directory")->required();

    auto* rep = app.add_subcommand("report", "one row per assertion of a finished run");
    rep->add_option("run_dir", path, "run directory")->required();
    rep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*solve) return cmd_solve(path, seed, out, allow_nc);
        if (*indep) return cmd_check_independence(path);
        if (*count) return cmd_count_sections(path);
        if (*hybrid) return cmd_hybrid(path, out);
        if (*dma) return cmd_diagnose_ma(path);
        if (*ddu) return cmd_diagnose_duality(path);
        if (*rep) return cmd_report(path, format);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        if (e.code() == ErrorCode::NotConverged) return 3;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
