#pragma once

// JSON views of library results, CSV tables, and atomic file output.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "sisamp/counterexample.hpp"
#include "sisamp/frames.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"
#include "sisamp/synthesis.hpp"

namespace sisamp::cli {

using json = nlohmann::ordered_json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ComplexPoly& p) {
    json a = json::array();
    for (const auto& c : p.coeffs()) a.push_back(to_json(c));
    return a;
}

inline json to_json(const Generator& g) {
    json j;
    j["class"] = to_string(g.cls());
    j["alpha"] = g.alpha();
    j["P"] = to_json(g.rational().num());
    j["Q"] = to_json(g.rational().den());
    if (g.k()) j["k"] = *g.k();
    else j["k"] = "unbounded";
    j["q"] = g.q();
    if (g.sym_const()) j["sym_const"] = to_json(*g.sym_const());
    else j["sym_const"] = nullptr;
    json poles = json::array();
    for (const auto& p : g.rational().poles()) poles.push_back({{"location", to_json(p.location)}, {"order", p.order}});
    j["poles"] = poles;
    json W = json::array();
    for (const auto& w : g.log_poles()) W.push_back(to_json(w));
    j["W"] = W;
    const auto& e = g.decay();
    j["decay"] = {{"kind", e.kind == DecayEnvelope::Kind::exponential ? "exponential" : "gaussian"},
                  {"rate", e.rate},
                  {"amp", e.amp},
                  {"slope", e.slope},
                  {"poly_growth", e.poly_growth}};
    return j;
}

inline json to_json(const SeparatedSet& s) {
    json j;
    if (const auto* p = s.as_periodic()) {
        j["periodic"] = {{"offsets", p->offsets}, {"period", p->period}};
    } else {
        const auto* e = s.as_explicit();
        j["explicit"] = {{"points", e->points}, {"window", {e->window.lo, e->window.hi}}};
    }
    j["separation"] = s.separation();
    j["covering_constant"] = covering_constant(s);
    if (s.is_periodic()) {
        const auto d = beurling_densities(s);
        j["density"] = {{"d_minus", d.d_minus}, {"d_plus", d.d_plus}, {"exact", true}};
    }
    return j;
}

inline json to_json(const StabilityVerdict& v) {
    return {{"stable", v.stable},       {"margin", v.margin}, {"witness_b", v.witness_b},
            {"grid_size", v.grid_size}, {"eps", v.eps},       {"tails_certified", v.tails_certified},
            {"label", v.label}};
}

inline json to_json(const XiReport& x) {
    json j;
    j["d"] = x.d;
    json pd = json::array();
    for (const auto& w : x.pol_d) pd.push_back(to_json(w));
    j["pol_d"] = pd;
    j["xi_prime"] = x.xi_prime;
    j["xi_triple_prime"] = x.xi_triple_prime;
    if (x.xi_double_prime) j["xi_double_prime"] = *x.xi_double_prime;
    else j["xi_double_prime"] = "not-evaluated";
    j["n_bound"] = x.n_bound;
    json col = json::array();
    for (const auto& c : x.collisions) col.push_back({{"w", to_json(c.w)}, {"w2", to_json(c.w2)}, {"n", c.shift}});
    j["collisions"] = col;
    j["implies_stable_z_shifts"] = x.implies_stable_z_shifts();
    j["tolerance"] = sisamp::detail::xi_tol;
    j["details"] = x.details;
    return j;
}

inline json to_json(const ThresholdContext& t) {
    return {{"rule", t.rule},
            {"d_minus_lambda", t.d_minus_lambda},
            {"d_plus_gamma", t.d_plus_gamma},
            {"threshold", t.threshold},
            {"hypothesis_holds", t.hypothesis_holds},
            {"exact", t.exact}};
}

inline json to_json(const FrameReport& f) {
    return {{"windows", f.windows},
            {"lower", f.lower_bounds},
            {"upper", f.upper_bounds},
            {"margins", f.margins},
            {"rows", f.rows},
            {"cols", f.cols},
            {"verdict", to_string(f.verdict)},
            {"threshold_context", to_json(f.threshold_context)},
            {"stability", f.stability},
            {"estimator", f.estimator},
            {"eps_frame", f.eps_frame},
            {"rel_tol", f.rel_tol},
            {"eigen_residual_tol", eigen_residual_tol}};
}

inline json to_json(const GaborReport& g) {
    return {{"system", g.system},
            {"x_grid", g.xs.size()},
            {"inf_lower", g.inf_lower},
            {"witness_x", g.witness_x},
            {"verdict", to_string(g.verdict)},
            {"caveat", g.caveat},
            {"stability", g.stability}};
}

inline json to_json(const BesselReport& b) {
    return {{"p", b.p == 0 ? json("inf") : json(b.p)},
            {"trials", b.trials},
            {"covering_constant", b.covering},
            {"wiener_norm", b.wiener},
            {"bound", b.bound},
            {"max_ratio", b.max_ratio},
            {"slack", b.slack},
            {"passed", b.passed}};
}

inline json to_json(const InterpolationReport& r) {
    return {{"max_residual", r.max_residual},
            {"coeff_norm", r.coeff_norm},
            {"condition", r.condition},
            {"rows", r.rows},
            {"cols", r.cols},
            {"window", r.window},
            {"margin", r.margin}};
}

inline json to_json(const VanisherSolution& v) {
    return {{"case", to_string(v.case_tag)},
            {"N", v.N},
            {"alpha", v.alpha},
            {"b", v.b},
            {"nodes", v.nodes},
            {"coeffs", v.coeffs},
            {"signed_periodization", v.signed_periodization},
            {"zero_set", to_json(v.zero_set)},
            {"zeros", v.zeros_found},
            {"extra_zeros", v.extra_zeros},
            {"max_residual", v.max_residual},
            {"condition", v.condition},
            {"node_perturbations", v.node_perturbations},
            {"extrapolated_construction", v.extrapolated},
            {"generator", to_json(v.g)}};
}

/// Rows of a CSV table with a header line.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    template <class... Cells>
    void row(const Cells&... cells) {
        std::ostringstream os;
        os << std::setprecision(17);
        bool first = true;
        ((os << (first ? "" : ",") << cells, first = false), ...);
        rows_.push_back(os.str());
    }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += "\n";
        for (const auto& r : rows_) out += r + "\n";
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

/// Writes through a temporary file in the same directory and renames it.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.parent_path() / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace sisamp::cli
