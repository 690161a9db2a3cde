#pragma once

// Task dispatch: computes everything in memory, then writes report.json and
// the task CSVs. A failure before the write leaves no artifacts behind.

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sisamp/cli/config.hpp"
#include "sisamp/cli/report.hpp"

namespace sisamp::cli {

inline constexpr const char* report_schema = "sisamp-report/1";

struct RunResult {
    json report;
    std::vector<std::pair<std::string, std::string>> csv;  ///< file name, content
};

namespace detail {

inline void analyze_task(const ExperimentConfig& cfg, RunResult& out) {
    const Generator& g = *cfg.generator;
    json& r = out.report["result"];
    r["generator"] = to_json(g);
    r["stability"] = to_json(stability_check(g, cfg.stability.grid_size, cfg.threads, cfg.stability.eps));
    r["xi"] = to_json(xi_check(g, cfg.gamma));
    r["wiener_norm"] = wiener_norm(g);
    if (cfg.lambda) r["lambda"] = to_json(*cfg.lambda);
    r["gamma"] = to_json(*cfg.gamma);

    CsvTable poles({"re", "im", "order"});
    for (const auto& p : g.rational().poles()) poles.row(p.location.real(), p.location.imag(), p.order);
    out.csv.emplace_back("poles.csv", poles.str());

    if (cfg.bessel.trials > 0) {
        json arr = json::array();
        CsvTable t({"p", "max_ratio", "bound", "passed"});
        for (int p : cfg.bessel.p) {
            const auto b = bessel_bound_check(g, *cfg.gamma, cfg.bessel.trials, p, cfg.seed, cfg.bessel.radius);
            json jb = to_json(b);
            jb["radius"] = cfg.bessel.radius;
            jb["seed"] = cfg.seed;
            arr.push_back(jb);
            t.row(p == 0 ? std::string("inf") : std::to_string(p), b.max_ratio, b.bound, b.passed ? 1 : 0);
        }
        r["bessel"] = arr;
        out.csv.emplace_back("bessel.csv", t.str());
    }
}

inline void spectrum_task(const ExperimentConfig& cfg, RunResult& out) {
    const Spectrum sp(*cfg.generator);
    const auto& ts = cfg.spectrum.t;
    std::vector<SpectrumSample> vals(ts.size());
    const auto method = cfg.spectrum.method;
    parallel_for(ts.size(), cfg.threads, [&](std::size_t i) {
        if (!method) vals[i] = sp(ts[i]);
        else if (*method == SpectrumMethod::residue) vals[i] = sp.by_residue(ts[i]);
        else vals[i] = sp.by_quadrature(ts[i]);
    });
    CsvTable t({"t", "re", "im", "method", "err_est"});
    double max_err = 0.0, max_abs = 0.0;
    for (const auto& s : vals) {
        t.row(s.t, s.value.real(), s.value.imag(), to_string(s.method), s.err_est);
        max_err = std::max(max_err, s.err_est);
        max_abs = std::max(max_abs, std::abs(s.value));
    }
    json& r = out.report["result"];
    r["generator"] = to_json(*cfg.generator);
    r["count"] = vals.size();
    r["t_first"] = ts.front();
    r["t_last"] = ts.back();
    r["method"] = method ? to_string(*method) : "auto";
    r["residue_t_min"] = residue_t_min;
    r["quadrature_tol"] = quadrature_tol;
    r["quadrature_radius"] = sp.quadrature_radius();
    r["max_abs"] = max_abs;
    r["max_err_est"] = max_err;
    out.csv.emplace_back("spectrum.csv", t.str());
}

inline void stability_task(const ExperimentConfig& cfg, RunResult& out) {
    const Spectrum sp(*cfg.generator);
    const int n = cfg.stability.grid_size;
    std::vector<PeriodizedFloor> floors(static_cast<std::size_t>(n));
    parallel_for(floors.size(), cfg.threads,
                 [&](std::size_t j) { floors[j] = periodized_spectrum(sp, static_cast<double>(j) / n); });
    const auto v = stability_check(sp, n, cfg.threads, cfg.stability.eps);
    CsvTable t({"b", "floor", "argmax_n", "n_max", "certified"});
    for (const auto& f : floors) t.row(f.b, f.floor, f.argmax_n, f.n_max, f.certified ? 1 : 0);
    json& r = out.report["result"];
    r["generator"] = to_json(*cfg.generator);
    r["stability"] = to_json(v);
    r["periodized_n_cap"] = periodized_n_cap;
    r["xi"] = to_json(xi_check(*cfg.generator, cfg.gamma));
    out.csv.emplace_back("stability.csv", t.str());
}

inline CsvTable sweep_table(const FrameReport& f) {
    CsvTable t({"W", "A_est", "B_est", "rows", "cols", "margin"});
    for (std::size_t i = 0; i < f.windows.size(); ++i)
        t.row(f.windows[i], f.lower_bounds[i], f.upper_bounds[i], f.rows[i], f.cols[i], f.margins[i]);
    return t;
}

inline void sampling_task(const ExperimentConfig& cfg, RunResult& out) {
    const Generator& g = *cfg.generator;
    const auto fr = sampling_verdict(g, *cfg.lambda, *cfg.gamma, cfg.frames);
    json& r = out.report["result"];
    r["generator"] = to_json(g);
    r["lambda"] = to_json(*cfg.lambda);
    r["gamma"] = to_json(*cfg.gamma);
    r["frames"] = to_json(fr);
    out.csv.emplace_back("frame_sweep.csv", sweep_table(fr).str());
    if (cfg.interp.targets == 0) return;

    json ji;
    ji["targets"] = cfg.interp.targets;
    ji["window"] = cfg.interp.window;
    ji["seed"] = cfg.seed;
    ji["residual_goal"] = 1e-6;
    if (fr.verdict != SamplingVerdict::sampling) {
        ji["status"] = "precondition-violated";
        ji["message"] = "interpolation needs verdict sampling, got " + to_string(fr.verdict);
        r["interpolation"] = ji;
        return;
    }
    const auto n = cfg.gamma->points_in({-cfg.interp.window, cfg.interp.window}).size();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    CsvTable t({"target", "max_residual", "coeff_norm", "condition"});
    double worst = 0.0;
    for (int k = 0; k < cfg.interp.targets; ++k) {
        std::vector<cplx> y(n);
        for (auto& v : y) v = {U(rng), U(rng)};
        const auto ir = interpolate_demo(g, *cfg.lambda, *cfg.gamma, y, cfg.interp.window, fr);
        worst = std::max(worst, ir.max_residual);
        t.row(k, ir.max_residual, ir.coeff_norm, ir.condition);
        if (k == 0) ji["section"] = to_json(ir);
    }
    ji["status"] = "done";
    ji["max_residual"] = worst;
    ji["passed"] = worst < 1e-6;
    r["interpolation"] = ji;
    out.csv.emplace_back("interpolation.csv", t.str());
}

inline void gabor_task(const ExperimentConfig& cfg, RunResult& out) {
    const auto gr = gabor_frame_sweep(*cfg.generator, *cfg.lambda, cfg.x_grid, cfg.frames);
    json& r = out.report["result"];
    r["generator"] = to_json(*cfg.generator);
    r["lambda"] = to_json(*cfg.lambda);
    r["gabor"] = to_json(gr);
    const auto windows = cfg.frames.windows.empty() ? default_windows(*cfg.generator) : cfg.frames.windows;
    r["gabor"]["windows"] = windows;
    r["gabor"]["eps_frame"] = cfg.frames.eps_frame;
    r["gabor"]["rel_tol"] = cfg.frames.rel_tol;
    CsvTable t({"x", "A_est", "verdict"});
    for (std::size_t i = 0; i < gr.xs.size(); ++i) t.row(gr.xs[i], gr.last_lower[i], to_string(gr.verdicts[i]));
    out.csv.emplace_back("gabor.csv", t.str());
}

inline void vanisher_task(const ExperimentConfig& cfg, RunResult& out) {
    const auto& p = cfg.vanisher;
    const auto v = build_vanisher(p.vcase, p.N, p.b, p.alpha, cfg.seed);
    json& r = out.report["result"];
    r["vanisher"] = to_json(v);
    r["vanisher"]["tolerances"] = {{"condition_limit", vanisher_cond_limit}, {"zero_grid", 1 << 14},
                                   {"bracket_width", 1e-12}};
    if (p.verify) {
        const auto nu = verify_nonuniqueness(v, cfg.frames);
        r["nonuniqueness"] = {{"frames", to_json(nu.frames)},
                              {"stability", to_json(nu.stability)},
                              {"not_sampling", nu.not_sampling},
                              {"stable", nu.stable}};
        out.csv.emplace_back("frame_sweep.csv", sweep_table(nu.frames).str());
    }
    const double period = v.signed_periodization ? 2.0 : 1.0;
    CsvTable t({"x", "f"});
    for (int i = 0; i < p.trace_points; ++i) {
        const double x = period * i / p.trace_points;
        t.row(x, vanisher_value(v, x));
    }
    out.csv.emplace_back("vanisher_trace.csv", t.str());
    CsvTable z({"x"});
    for (double x : v.zeros_found) z.row(x);
    out.csv.emplace_back("zeros.csv", z.str());
}

inline void verify_examples_task(const ExperimentConfig& cfg, RunResult& out) {
    json& r = out.report["result"];
    struct Row {
        const char* name;
        ComplexPoly P, Q;
    };
    const std::vector<Row> table{{"z/(1+z^2)", ComplexPoly{0.0, 1.0}, ComplexPoly{1.0, 0.0, 1.0}},
                                 {"z/(1+z^4)", ComplexPoly{0.0, 1.0}, ComplexPoly{1.0, 0.0, 0.0, 0.0, 1.0}},
                                 {"z/(1+z)^2", ComplexPoly{0.0, 1.0}, ComplexPoly{1.0, 2.0, 1.0}}};
    json sym = json::array();
    CsvTable st({"R", "k", "c_re", "c_im"});
    for (const auto& row : table) {
        const auto g = make_generator(GeneratorClass::K, 1.0, row.P, row.Q);
        const cplx c = g.sym_const().value_or(cplx{});
        sym.push_back({{"R", row.name}, {"k", *g.k()}, {"sym_const", to_json(c)}});
        st.row(row.name, *g.k(), c.real(), c.imag());
    }
    r["symmetry_table"] = sym;
    out.csv.emplace_back("symmetry.csv", st.str());

    const auto ex = verify_exg_example(cfg.x_grid);
    json je = {{"generator", to_json(ex.g)},
               {"grid", cfg.x_grid},
               {"grid_max", ex.grid_max},
               {"tail_bound", ex.tail_bound},
               {"hat_max_integers", ex.hat_max_integers},
               {"stability", to_json(ex.stability)},
               {"xi", to_json(ex.xi)}};
    if (ex.witness)
        je["witness"] = {{"w", to_json(ex.witness->w)}, {"w2", to_json(ex.witness->w2)}, {"n", ex.witness->shift}};
    r["exg"] = je;

    const auto hd = verify_hdef_example();
    json hat = json::array();
    CsvTable ht({"n", "re", "im"});
    for (std::size_t i = 0; i < hd.hat.size(); ++i) {
        const int n = static_cast<int>(i) - 3;
        hat.push_back({{"n", n}, {"value", to_json(hd.hat[i])}});
        ht.row(n, hd.hat[i].real(), hd.hat[i].imag());
    }
    r["hdef"] = {{"generator", to_json(hd.g)},
                 {"A", to_json(hd.A)},
                 {"hat", hat},
                 {"hat_max", hd.hat_max},
                 {"hat_tolerance", 1e-8},
                 {"stability", to_json(hd.stability)},
                 {"xi", to_json(hd.xi)}};
    out.csv.emplace_back("hdef_hat.csv", ht.str());
}

}  // namespace detail

/// Runs the task; throws on operational failure.
inline RunResult execute(const ExperimentConfig& cfg) {
    RunResult out;
    out.report["schema"] = report_schema;
    out.report["timestamp"] = utc_timestamp();
    out.report["task"] = to_string(cfg.task);
    out.report["seed"] = cfg.seed;
    out.report["threads"] = cfg.threads;
    out.report["config"] = cfg.echo;
    out.report["result"] = json::object();
    switch (cfg.task) {
        case Task::analyze: detail::analyze_task(cfg, out); break;
        case Task::spectrum: detail::spectrum_task(cfg, out); break;
        case Task::stability: detail::stability_task(cfg, out); break;
        case Task::sampling: detail::sampling_task(cfg, out); break;
        case Task::gabor: detail::gabor_task(cfg, out); break;
        case Task::vanisher: detail::vanisher_task(cfg, out); break;
        case Task::verify_examples: detail::verify_examples_task(cfg, out); break;
    }
    return out;
}

/// report.json plus CSVs (when enabled), each written atomically.
inline std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& cfg, const RunResult& res) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::filesystem::path> written;
    if (cfg.csv)
        for (const auto& [name, content] : res.csv) {
            write_atomic(cfg.out_dir / name, content);
            written.push_back(cfg.out_dir / name);
        }
    write_atomic(cfg.out_dir / "report.json", res.report.dump(2) + "\n");
    written.push_back(cfg.out_dir / "report.json");
    return written;
}

}  // namespace sisamp::cli
