#pragma once

// Experiment configs: TOML (primary) or JSON, flattened into a JSON tree with
// a pointer -> source line map so every validation error names its location.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "sisamp/counterexample.hpp"
#include "sisamp/frames.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"

namespace sisamp::cli {

using json = nlohmann::ordered_json;

class ConfigError : public Error {
public:
    ConfigError(const std::string& pointer, int line, const std::string& msg)
        : Error("config error at " + (pointer.empty() ? std::string("/") : pointer) +
                (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + msg),
          pointer_(pointer), line_(line) {}

    [[nodiscard]] const std::string& pointer() const { return pointer_; }
    [[nodiscard]] int line() const { return line_; }

private:
    std::string pointer_;
    int line_;
};

/// Parsed config text plus the source line of every JSON pointer.
struct SourceTree {
    json root;
    std::map<std::string, int> lines;
};

namespace detail {

inline std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

inline json from_toml(const toml::node& node, const std::string& ptr, std::map<std::string, int>& lines) {
    if (!lines.count(ptr)) lines[ptr] = static_cast<int>(node.source().begin.line);
    if (const auto* t = node.as_table()) {
        json obj = json::object();
        for (const auto& [k, v] : *t) {
            const std::string key(k.str());
            const std::string child = ptr + "/" + escape_token(key);
            lines[child] = static_cast<int>(k.source().begin.line);
            obj[key] = from_toml(v, child, lines);
        }
        return obj;
    }
    if (const auto* a = node.as_array()) {
        json arr = json::array();
        for (std::size_t i = 0; i < a->size(); ++i)
            arr.push_back(from_toml(*a->get(i), ptr + "/" + std::to_string(i), lines));
        return arr;
    }
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    if (const auto* v = node.as_string()) return v->get();
    throw ConfigError(ptr, static_cast<int>(node.source().begin.line), "dates and times are not supported");
}

/// Forward iterator over the JSON text that remembers the line of the last
/// non-blank character consumed, so SAX events can be tagged with lines.
struct LineTrackingIter {
    using iterator_category = std::forward_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    const char* p = nullptr;
    int* line = nullptr;
    int* last_token_line = nullptr;

    reference operator*() const { return *p; }
    LineTrackingIter& operator++() {
        if (*p == '\n') ++*line;
        else if (*p != ' ' && *p != '\t' && *p != '\r') *last_token_line = *line;
        ++p;
        return *this;
    }
    LineTrackingIter operator++(int) {
        auto t = *this;
        ++*this;
        return t;
    }
    bool operator==(const LineTrackingIter& o) const { return p == o.p; }
    bool operator!=(const LineTrackingIter& o) const { return p != o.p; }
};

/// Builds the DOM and the pointer -> line map in one SAX pass.
class LineSax : public nlohmann::json_sax<json> {
public:
    explicit LineSax(const int* line) : line_(line) {}

    json result;
    std::map<std::string, int> lines;

    bool null() override { return put(nullptr); }
    bool boolean(bool v) override { return put(v); }
    bool number_integer(number_integer_t v) override { return put(v); }
    bool number_unsigned(number_unsigned_t v) override { return put(v); }
    bool number_float(number_float_t v, const string_t&) override { return put(v); }
    bool string(string_t& v) override { return put(v); }
    bool binary(binary_t&) override { return false; }

    bool start_object(std::size_t) override {
        open(json::object());
        return true;
    }
    bool key(string_t& k) override {
        key_ = k;
        lines[path_of_child()] = *line_;
        return true;
    }
    bool end_object() override { return close(); }
    bool start_array(std::size_t) override {
        open(json::array());
        return true;
    }
    bool end_array() override { return close(); }

    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override {
        error = ex.what();
        error_line = *line_;
        return false;
    }

    std::string error;
    int error_line = 0;

private:
    struct Frame {
        json value;
        std::string ptr;
        std::string pending_key;
    };

    [[nodiscard]] std::string path_of_child() const {
        if (stack_.empty()) return "";
        const auto& f = stack_.back();
        if (f.value.is_object()) return f.ptr + "/" + escape_token(key_);
        return f.ptr + "/" + std::to_string(f.value.size());
    }

    bool put(json v) {
        if (stack_.empty()) {
            result = std::move(v);
            return true;
        }
        const std::string p = path_of_child();
        if (!lines.count(p)) lines[p] = *line_;
        auto& f = stack_.back();
        if (f.value.is_object()) f.value[key_] = std::move(v);
        else f.value.push_back(std::move(v));
        return true;
    }

    void open(json v) {
        const std::string p = path_of_child();
        if (!lines.count(p)) lines[p] = *line_;
        stack_.push_back({std::move(v), p, key_});
    }

    bool close() {
        Frame f = std::move(stack_.back());
        stack_.pop_back();
        key_ = f.pending_key;
        if (stack_.empty()) {
            result = std::move(f.value);
            return true;
        }
        auto& parent = stack_.back();
        if (parent.value.is_object()) parent.value[key_] = std::move(f.value);
        else parent.value.push_back(std::move(f.value));
        return true;
    }

    const int* line_;
    std::string key_;
    std::vector<Frame> stack_;
};

}  // namespace detail

inline SourceTree parse_toml_text(const std::string& text, const std::string& name = "config") {
    SourceTree st;
    try {
        const toml::table tbl = toml::parse(text, name);
        st.root = detail::from_toml(tbl, "", st.lines);
    } catch (const toml::parse_error& e) {
        throw ConfigError("", static_cast<int>(e.source().begin.line), std::string(e.description()));
    }
    return st;
}

inline SourceTree parse_json_text(const std::string& text) {
    int line = 1, token_line = 1;
    detail::LineTrackingIter first{text.data(), &line, &token_line};
    detail::LineTrackingIter last{text.data() + text.size(), &line, &token_line};
    detail::LineSax sax(&token_line);
    const bool ok = json::sax_parse(first, last, &sax);
    if (!ok) throw ConfigError("", sax.error_line, sax.error.empty() ? "malformed JSON" : sax.error);
    return {std::move(sax.result), std::move(sax.lines)};
}

/// Chooses the parser from the extension (.json -> JSON, otherwise TOML).
inline SourceTree load_source(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", 0, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    if (path.extension() == ".json") return parse_json_text(ss.str());
    return parse_toml_text(ss.str(), path.string());
}

// ---------------------------------------------------------------------------

enum class Task { analyze, spectrum, stability, sampling, gabor, vanisher, verify_examples };

inline std::string to_string(Task t) {
    switch (t) {
        case Task::analyze: return "analyze";
        case Task::spectrum: return "spectrum";
        case Task::stability: return "stability";
        case Task::sampling: return "sampling";
        case Task::gabor: return "gabor";
        case Task::vanisher: return "vanisher";
        case Task::verify_examples: return "verify-examples";
    }
    return "?";
}

inline std::optional<Task> task_from_string(const std::string& s) {
    for (Task t : {Task::analyze, Task::spectrum, Task::stability, Task::sampling, Task::gabor, Task::vanisher,
                   Task::verify_examples})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

struct SpectrumParams {
    std::vector<double> t;
    std::optional<SpectrumMethod> method;
};

struct StabilityParams {
    int grid_size = 256;
    double eps = stability_eps;
};

struct BesselParams {
    int trials = 0;
    std::vector<int> p{1, 2, 0};
    double radius = 10.0;
};

struct InterpParams {
    int targets = 0;
    double window = 20.0;
};

struct VanisherParams {
    VanisherCase vcase = VanisherCase::case1_even;
    int N = 2;
    std::vector<double> b;
    double alpha = 1.0;
    bool verify = true;
    int trace_points = 1000;
};

struct ExperimentConfig {
    Task task = Task::analyze;
    std::optional<Generator> generator;
    std::optional<SeparatedSet> lambda;
    std::optional<SeparatedSet> gamma;
    FrameOptions frames;
    int x_grid = 64;
    SpectrumParams spectrum;
    StabilityParams stability;
    BesselParams bessel;
    InterpParams interp;
    VanisherParams vanisher;
    std::filesystem::path out_dir = "sisamp_out";
    bool csv = true;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    json echo;  ///< the parsed config, stored in the report
};

/// Command-line values that override the file.
struct Overrides {
    std::optional<Task> task;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

namespace detail {

/// Typed, located access into a SourceTree.
class Reader {
public:
    explicit Reader(const SourceTree& st) : st_(st) {}

    [[nodiscard]] int line_of(const std::string& ptr) const {
        std::string p = ptr;
        while (true) {
            if (auto it = st_.lines.find(p); it != st_.lines.end()) return it->second;
            if (p.empty()) return 0;
            p = p.substr(0, p.rfind('/'));
        }
    }

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        throw ConfigError(ptr, line_of(ptr), msg);
    }

    [[nodiscard]] const json* find(const std::string& ptr) const {
        const json::json_pointer jp(ptr);
        if (!st_.root.contains(jp)) return nullptr;
        return &st_.root.at(jp);
    }

    [[nodiscard]] bool has(const std::string& ptr) const { return find(ptr) != nullptr; }

    const json& at(const std::string& ptr) const {
        const json* j = find(ptr);
        if (!j) fail(ptr, "missing required entry");
        return *j;
    }

    void only_keys(const std::string& ptr, const std::vector<std::string>& allowed) const {
        const json& obj = at(ptr);
        if (!obj.is_object()) fail(ptr, "expected a table/object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : obj.items())
            if (!ok.count(k)) fail(ptr + "/" + escape_token(k), "unknown key '" + k + "'");
    }

    [[nodiscard]] double number(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_number()) fail(ptr, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ptr, "expected a finite number");
        return v;
    }

    [[nodiscard]] double positive(const std::string& ptr) const {
        const double v = number(ptr);
        if (!(v > 0.0)) fail(ptr, "must be positive");
        return v;
    }

    [[nodiscard]] long long integer(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_number_integer()) fail(ptr, "expected an integer");
        return j.get<long long>();
    }

    [[nodiscard]] int int_in(const std::string& ptr, long long lo, long long hi) const {
        const long long v = integer(ptr);
        if (v < lo || v > hi) fail(ptr, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    }

    [[nodiscard]] bool boolean(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_boolean()) fail(ptr, "expected true or false");
        return j.get<bool>();
    }

    [[nodiscard]] std::string string(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_string()) fail(ptr, "expected a string");
        return j.get<std::string>();
    }

    /// A number, or a [re, im] pair.
    [[nodiscard]] cplx complex(const std::string& ptr) const {
        const json& j = at(ptr);
        if (j.is_number()) return {number(ptr), 0.0};
        if (j.is_array() && j.size() == 2) return {number(ptr + "/0"), number(ptr + "/1")};
        fail(ptr, "expected a number or a [re, im] pair");
    }

    [[nodiscard]] std::vector<double> numbers(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_array()) fail(ptr, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(ptr + "/" + std::to_string(i)));
        return out;
    }

    [[nodiscard]] std::vector<cplx> complexes(const std::string& ptr) const {
        const json& j = at(ptr);
        if (!j.is_array()) fail(ptr, "expected an array");
        std::vector<cplx> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex(ptr + "/" + std::to_string(i)));
        return out;
    }

    [[nodiscard]] const SourceTree& tree() const { return st_; }

private:
    const SourceTree& st_;
};

inline Generator read_generator(const Reader& r, const std::string& ptr) {
    r.only_keys(ptr, {"preset", "class", "alpha", "P", "Q", "hsec_combo", "gauss_combo"});
    int forms = 0;
    for (const char* k : {"preset", "class", "hsec_combo", "gauss_combo"}) forms += r.has(ptr + "/" + k) ? 1 : 0;
    if (forms != 1) r.fail(ptr, "give exactly one of preset, class (with P and Q), hsec_combo, gauss_combo");
    const double alpha = r.has(ptr + "/alpha") ? r.positive(ptr + "/alpha") : 1.0;
    try {
        if (r.has(ptr + "/preset")) {
            if (r.has(ptr + "/P") || r.has(ptr + "/Q")) r.fail(ptr, "P and Q belong to the class form");
            const std::string p = r.string(ptr + "/preset");
            if (p == "hsec") return hyperbolic_secant(alpha);
            if (p == "gaussian") return gaussian(alpha);
            if (p == "exg") {
                const std::vector<cplx> a{1.0, -1.0}, b{0.0, 1.0};
                return hsec_combination(alpha, a, b);
            }
            r.fail(ptr + "/preset", "unknown preset '" + p + "' (expected hsec, gaussian or exg)");
        }
        if (r.has(ptr + "/class")) {
            const std::string c = r.string(ptr + "/class");
            if (c != "K" && c != "C") r.fail(ptr + "/class", "class must be \"K\" or \"C\"");
            const auto P = r.complexes(ptr + "/P");
            const auto Q = r.complexes(ptr + "/Q");
            if (P.size() > max_poly_degree + 1) r.fail(ptr + "/P", "degree exceeds 64");
            if (Q.size() > max_poly_degree + 1) r.fail(ptr + "/Q", "degree exceeds 64");
            return make_generator(c == "K" ? GeneratorClass::K : GeneratorClass::C, alpha, ComplexPoly(P),
                                  ComplexPoly(Q));
        }
        if (r.has(ptr + "/P") || r.has(ptr + "/Q")) r.fail(ptr, "P and Q belong to the class form");
        if (r.has(ptr + "/hsec_combo")) {
            const std::string h = ptr + "/hsec_combo";
            r.only_keys(h, {"a", "b"});
            const auto a = r.complexes(h + "/a");
            const auto b = r.complexes(h + "/b");
            return hsec_combination(alpha, a, b);
        }
        const std::string h = ptr + "/gauss_combo";
        r.only_keys(h, {"a0", "a", "b"});
        const cplx a0 = r.has(h + "/a0") ? r.complex(h + "/a0") : cplx{};
        const auto a = r.has(h + "/a") ? r.complexes(h + "/a") : std::vector<cplx>{};
        const auto b = r.has(h + "/b") ? r.numbers(h + "/b") : std::vector<double>{};
        return gaussian_combination(alpha, a0, a, b);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        r.fail(ptr, e.what());
    }
}

inline SeparatedSet read_set(const Reader& r, const std::string& ptr) {
    r.only_keys(ptr, {"periodic", "explicit", "lattice"});
    int forms = 0;
    for (const char* k : {"periodic", "explicit", "lattice"}) forms += r.has(ptr + "/" + k) ? 1 : 0;
    if (forms != 1) r.fail(ptr, "give exactly one of periodic, explicit, lattice");
    try {
        if (r.has(ptr + "/lattice")) {
            const std::string l = ptr + "/lattice";
            r.only_keys(l, {"step", "shift"});
            return SeparatedSet::lattice(r.positive(l + "/step"), r.has(l + "/shift") ? r.number(l + "/shift") : 0.0);
        }
        if (r.has(ptr + "/periodic")) {
            const std::string p = ptr + "/periodic";
            r.only_keys(p, {"offsets", "period"});
            auto offs = r.numbers(p + "/offsets");
            if (offs.empty()) r.fail(p + "/offsets", "needs at least one offset");
            return SeparatedSet::periodic(std::move(offs), r.positive(p + "/period"));
        }
        const std::string e = ptr + "/explicit";
        r.only_keys(e, {"points", "window"});
        const auto w = r.numbers(e + "/window");
        if (w.size() != 2 || !(w[1] > w[0])) r.fail(e + "/window", "window must be [a, b] with a < b");
        return SeparatedSet::explicit_points(r.numbers(e + "/points"), {w[0], w[1]});
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        r.fail(ptr, e.what());
    }
}

inline std::vector<std::string> params_for(Task t) {
    switch (t) {
        case Task::analyze: return {"grid_size", "eps", "bessel_trials", "bessel_p", "bessel_radius"};
        case Task::spectrum: return {"t", "t_range", "method"};
        case Task::stability: return {"grid_size", "eps"};
        case Task::sampling:
            return {"windows", "margin", "eps_frame", "rel_tol", "estimator", "check_stability", "interpolate"};
        case Task::gabor: return {"windows", "margin", "eps_frame", "rel_tol", "estimator", "x_grid"};
        case Task::vanisher: return {"case", "N", "b", "alpha", "verify", "trace_points", "windows"};
        case Task::verify_examples: return {"grid"};
    }
    return {};
}

inline void read_frame_params(const Reader& r, const std::string& p, FrameOptions& fo) {
    if (r.has(p + "/windows")) {
        fo.windows = r.numbers(p + "/windows");
        if (fo.windows.empty()) r.fail(p + "/windows", "needs at least one window");
        for (std::size_t i = 0; i < fo.windows.size(); ++i) {
            if (!(fo.windows[i] > 0.0)) r.fail(p + "/windows/" + std::to_string(i), "must be positive");
            if (i > 0 && !(fo.windows[i] > fo.windows[i - 1]))
                r.fail(p + "/windows/" + std::to_string(i), "windows must increase");
        }
    }
    if (r.has(p + "/margin")) fo.margin = r.positive(p + "/margin");
    if (r.has(p + "/eps_frame")) fo.eps_frame = r.positive(p + "/eps_frame");
    if (r.has(p + "/rel_tol")) fo.rel_tol = r.positive(p + "/rel_tol");
    if (r.has(p + "/estimator")) {
        const std::string e = r.string(p + "/estimator");
        if (e == "automatic") fo.estimator = FrameEstimator::automatic;
        else if (e == "open-section") fo.estimator = FrameEstimator::open_section;
        else if (e == "periodic-section") fo.estimator = FrameEstimator::periodic_section;
        else r.fail(p + "/estimator", "expected automatic, open-section or periodic-section");
    }
    if (r.has(p + "/check_stability")) fo.check_stability = r.boolean(p + "/check_stability");
}

}  // namespace detail

/// Validates the whole tree and builds every object the task needs. Nothing
/// is written to disk here.
inline ExperimentConfig build_config(const SourceTree& st, const Overrides& ov = {}) {
    const detail::Reader r(st);
    if (!st.root.is_object()) r.fail("", "config must be a table/object");
    r.only_keys("", {"task", "seed", "threads", "generator", "sets", "params", "output"});
    ExperimentConfig cfg;
    cfg.echo = st.root;

    std::optional<Task> file_task;
    if (r.has("/task")) {
        file_task = task_from_string(r.string("/task"));
        if (!file_task) r.fail("/task", "unknown task '" + r.string("/task") + "'");
    }
    if (file_task && ov.task && *file_task != *ov.task)
        r.fail("/task", "config task '" + to_string(*file_task) + "' differs from subcommand '" +
                            to_string(*ov.task) + "'");
    if (!file_task && !ov.task) r.fail("/task", "no task given (set task or use a subcommand)");
    cfg.task = file_task ? *file_task : *ov.task;

    if (r.has("/seed")) {
        const long long s = r.integer("/seed");
        if (s < 0) r.fail("/seed", "must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (r.has("/threads")) cfg.threads = static_cast<unsigned>(r.int_in("/threads", 1, 256));
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.threads) {
        if (*ov.threads < 1) r.fail("/threads", "--threads must be at least 1");
        cfg.threads = *ov.threads;
    }

    const bool needs_generator = cfg.task != Task::vanisher && cfg.task != Task::verify_examples;
    if (needs_generator) cfg.generator = detail::read_generator(r, "/generator");
    else if (r.has("/generator")) r.fail("/generator", "task '" + to_string(cfg.task) + "' builds its own generator");

    if (r.has("/sets")) {
        r.only_keys("/sets", {"lambda", "gamma"});
        if (r.has("/sets/lambda")) cfg.lambda = detail::read_set(r, "/sets/lambda");
        if (r.has("/sets/gamma")) cfg.gamma = detail::read_set(r, "/sets/gamma");
    }
    if ((cfg.task == Task::sampling || cfg.task == Task::gabor) && !cfg.lambda)
        r.fail("/sets/lambda", "task '" + to_string(cfg.task) + "' needs sets.lambda");
    if (cfg.task == Task::gabor && cfg.gamma) r.fail("/sets/gamma", "the Gabor sweep always uses Gamma = Z");
    if (!cfg.gamma) cfg.gamma = SeparatedSet::integers();

    const std::string p = "/params";
    if (r.has(p)) r.only_keys(p, detail::params_for(cfg.task));
    cfg.frames.threads = cfg.threads;

    switch (cfg.task) {
        case Task::analyze:
        case Task::stability: {
            if (r.has(p + "/grid_size")) cfg.stability.grid_size = r.int_in(p + "/grid_size", 16, 1 << 16);
            if (r.has(p + "/eps")) cfg.stability.eps = r.positive(p + "/eps");
            if (r.has(p + "/bessel_trials")) cfg.bessel.trials = r.int_in(p + "/bessel_trials", 0, 100000);
            if (r.has(p + "/bessel_radius")) cfg.bessel.radius = r.positive(p + "/bessel_radius");
            if (r.has(p + "/bessel_p")) {
                cfg.bessel.p.clear();
                const json& arr = r.at(p + "/bessel_p");
                if (!arr.is_array() || arr.empty()) r.fail(p + "/bessel_p", "expected a non-empty array");
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string e = p + "/bessel_p/" + std::to_string(i);
                    if (arr[i].is_string() && arr[i].get<std::string>() == "inf") cfg.bessel.p.push_back(0);
                    else {
                        const int v = r.int_in(e, 1, 2);
                        cfg.bessel.p.push_back(v);
                    }
                }
            }
            break;
        }
        case Task::spectrum: {
            const bool has_t = r.has(p + "/t"), has_range = r.has(p + "/t_range");
            if (has_t == has_range) r.fail(p, "give exactly one of t or t_range");
            if (has_t) {
                cfg.spectrum.t = r.numbers(p + "/t");
                if (cfg.spectrum.t.empty()) r.fail(p + "/t", "needs at least one frequency");
            } else {
                const std::string tr = p + "/t_range";
                r.only_keys(tr, {"from", "to", "count"});
                const double a = r.number(tr + "/from"), b = r.number(tr + "/to");
                const int n = r.int_in(tr + "/count", 2, 1000000);
                if (!(b > a)) r.fail(tr, "needs from < to");
                for (int i = 0; i < n; ++i) cfg.spectrum.t.push_back(a + (b - a) * i / (n - 1));
            }
            if (r.has(p + "/method")) {
                const std::string m = r.string(p + "/method");
                if (m == "residue") cfg.spectrum.method = SpectrumMethod::residue;
                else if (m == "quadrature") cfg.spectrum.method = SpectrumMethod::quadrature;
                else if (m != "auto") r.fail(p + "/method", "expected auto, residue or quadrature");
                if (cfg.spectrum.method == SpectrumMethod::residue && cfg.generator->cls() != GeneratorClass::K)
                    r.fail(p + "/method", "the residue method needs a class-K generator");
            }
            break;
        }
        case Task::sampling: {
            detail::read_frame_params(r, p, cfg.frames);
            if (r.has(p + "/interpolate")) {
                const std::string ip = p + "/interpolate";
                r.only_keys(ip, {"targets", "window"});
                cfg.interp.targets = r.int_in(ip + "/targets", 1, 10000);
                if (r.has(ip + "/window")) cfg.interp.window = r.positive(ip + "/window");
            }
            break;
        }
        case Task::gabor: {
            detail::read_frame_params(r, p, cfg.frames);
            if (r.has(p + "/x_grid")) cfg.x_grid = r.int_in(p + "/x_grid", 1, 4096);
            break;
        }
        case Task::vanisher: {
            auto& v = cfg.vanisher;
            const std::string c = r.string(p + "/case");
            if (c == "case1") v.vcase = VanisherCase::case1_even;
            else if (c == "case2") v.vcase = VanisherCase::case2_odd;
            else if (c == "gaussian") v.vcase = VanisherCase::gaussian;
            else r.fail(p + "/case", "expected case1, case2 or gaussian");
            v.N = r.int_in(p + "/N", 1, 32);
            v.b = r.numbers(p + "/b");
            if (r.has(p + "/alpha")) v.alpha = r.positive(p + "/alpha");
            if (r.has(p + "/verify")) v.verify = r.boolean(p + "/verify");
            if (r.has(p + "/trace_points")) v.trace_points = r.int_in(p + "/trace_points", 2, 1000000);
            detail::read_frame_params(r, p, cfg.frames);
            if (static_cast<int>(v.b.size()) != v.N) r.fail(p + "/b", "needs exactly N shifts");
            if (v.vcase == VanisherCase::case1_even && v.N % 2 != 0) r.fail(p + "/N", "case1 needs an even N");
            if (v.vcase == VanisherCase::case2_odd && v.N % 2 != 1) r.fail(p + "/N", "case2 needs an odd N");
            for (std::size_t i = 0; i < v.b.size(); ++i) {
                if (!(v.b[i] > 0.0)) r.fail(p + "/b/" + std::to_string(i), "shifts must be positive");
                if (i > 0 && !(v.b[i] > v.b[i - 1])) r.fail(p + "/b/" + std::to_string(i), "shifts must increase");
                for (std::size_t k = 0; k < i; ++k) {
                    const double d = v.b[i] - v.b[k];
                    if (std::abs(d - std::round(d)) < 1e-9)
                        r.fail(p + "/b/" + std::to_string(i), "shift differences must not be integers");
                }
            }
            break;
        }
        case Task::verify_examples: {
            if (r.has(p + "/grid")) cfg.x_grid = r.int_in(p + "/grid", 10, 1000000);
            else cfg.x_grid = 1000;
            break;
        }
    }

    if (r.has("/output")) {
        r.only_keys("/output", {"dir", "formats"});
        if (r.has("/output/dir")) {
            const std::string d = r.string("/output/dir");
            if (d.empty()) r.fail("/output/dir", "must not be empty");
            cfg.out_dir = d;
        }
        if (r.has("/output/formats")) {
            const json& f = r.at("/output/formats");
            if (!f.is_array()) r.fail("/output/formats", "expected an array of strings");
            bool has_json = false, has_csv = false;
            for (std::size_t i = 0; i < f.size(); ++i) {
                const std::string s = r.string("/output/formats/" + std::to_string(i));
                if (s == "json") has_json = true;
                else if (s == "csv") has_csv = true;
                else r.fail("/output/formats/" + std::to_string(i), "expected json or csv");
            }
            if (!has_json) r.fail("/output/formats", "json is required (report.json is always written)");
            cfg.csv = has_csv;
        }
    }
    if (ov.out) cfg.out_dir = *ov.out;
    return cfg;
}

}  // namespace sisamp::cli
