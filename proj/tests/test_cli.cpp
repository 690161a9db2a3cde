#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

struct ScratchRoot {
    fs::path path;
    ScratchRoot() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("sisamp_cli_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~ScratchRoot() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path scratch(const std::string& name) {
    static const ScratchRoot root;
    return root.path / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& args) {
    static int counter = 0;
    const auto log = scratch("log_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string("\"") + SISAMP_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(log);
    return r;
}

std::string config(const std::string& name) { return std::string(SISAMP_CONFIG_DIR) + "/" + name; }

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const auto p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

Run run_task(const std::string& task, const std::string& cfg, const fs::path& out, const std::string& extra = "") {
    return run_cli(task + " --config \"" + cfg + "\" --out \"" + out.string() + "\" " + extra);
}

}  // namespace

TEST_CASE("analyze writes a report with generator facts", "[cli]") {
    const auto out = scratch("analyze");
    const auto r = run_task("analyze", config("analyze_hsec.toml"), out);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("task analyze done") != std::string::npos);
    const auto rep = report(out);
    CHECK(rep["schema"] == "sisamp-report/1");
    CHECK(rep["task"] == "analyze");
    CHECK(rep["seed"] == 11);
    const auto& res = rep["result"];
    CHECK(res["generator"]["k"] == 2);
    CHECK(res["generator"]["q"] == 2);
    CHECK(res["stability"]["stable"] == true);
    CHECK_THAT(res["stability"]["margin"].get<double>(), Catch::Matchers::WithinRel(0.0225928, 1e-5));
    CHECK(res["xi"]["xi_triple_prime"] == true);
    CHECK_THAT(res["wiener_norm"].get<double>(), Catch::Matchers::WithinAbs(2.071121329968, 1e-11));
    REQUIRE(res["bessel"].is_array());
    CHECK(res["bessel"].size() == 3);
    for (const auto& b : res["bessel"]) CHECK(b["passed"] == true);
    CHECK(fs::exists(out / "poles.csv"));
    CHECK(fs::exists(out / "bessel.csv"));
}

TEST_CASE("spectrum CSV matches the closed form", "[cli]") {
    const auto out = scratch("spectrum");
    REQUIRE(run_task("spectrum", config("spectrum_hsec.toml"), out).code == 0);
    const auto rows = csv_rows(out / "spectrum.csv");
    REQUIRE(rows.size() == 202);
    CHECK(rows[0] == std::vector<std::string>{"t", "re", "im", "method", "err_est"});
    const double pi = std::acos(-1.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double t = std::stod(rows[i][0]);
        const double expect = pi / 2.0 / std::cosh(pi * pi * t);
        INFO("t=" << t);
        CHECK(std::abs(std::stod(rows[i][1]) - expect) < 1e-12);
        CHECK(std::abs(std::stod(rows[i][2])) < 1e-12);
        CHECK((rows[i][3] == "residue" || rows[i][3] == "quadrature"));
    }
}

TEST_CASE("sampling verdicts through the CLI", "[cli]") {
    const auto a = scratch("sampling_0p8"), b = scratch("sampling_2"), c = scratch("sampling_open");
    REQUIRE(run_task("sampling", config("sampling_hsec_0p8.toml"), a).code == 0);
    REQUIRE(run_task("sampling", config("sampling_hsec_2.toml"), b).code == 0);
    REQUIRE(run_task("sampling", config("sampling_open_section.json"), c).code == 0);
    const auto ra = report(a)["result"];
    CHECK(ra["frames"]["verdict"] == "sampling");
    CHECK(ra["frames"]["estimator"] == "periodic-section");
    CHECK(ra["interpolation"]["passed"] == true);
    CHECK(report(b)["result"]["frames"]["verdict"] == "not-sampling");
    const auto rc = report(c)["result"]["frames"];
    CHECK(rc["estimator"] == "open-section");
    CHECK(rc["verdict"] == "sampling");
    const auto sweep = csv_rows(a / "frame_sweep.csv");
    CHECK(sweep.size() == 5);
    CHECK(sweep[0][0] == "W");
}

TEST_CASE("gabor sweep on a reduced grid", "[cli]") {
    const auto cfg = write_file("gabor.toml", "task = \"gabor\"\n[generator]\npreset = \"hsec\"\n"
                                              "[sets.lambda]\nlattice = { step = 0.8 }\n[params]\nx_grid = 4\n");
    const auto out = scratch("gabor");
    REQUIRE(run_task("gabor", cfg.string(), out).code == 0);
    const auto g = report(out)["result"];
    CHECK(g.dump().find("\"frame\"") != std::string::npos);
    CHECK(csv_rows(out / "gabor.csv").size() == 5);
}

TEST_CASE("vanisher and example verification", "[cli]") {
    const auto v = scratch("vanisher"), e = scratch("examples"), s = scratch("stability");
    REQUIRE(run_task("vanisher", config("vanisher_case1.toml"), v).code == 0);
    const auto rv = report(v)["result"];
    CHECK(rv["nonuniqueness"]["not_sampling"] == true);
    CHECK(rv["nonuniqueness"]["stable"] == true);
    CHECK(csv_rows(v / "zeros.csv").size() == 3);
    CHECK(csv_rows(v / "vanisher_trace.csv").size() == 1001);

    REQUIRE(run_task("verify-examples", config("verify_examples.toml"), e).code == 0);
    const auto re = report(e)["result"];
    CHECK(re["exg"]["grid_max"].get<double>() < 1e-11);
    CHECK(re["hdef"]["hat_max"].get<double>() < 1e-10);
    CHECK(re["symmetry_table"].size() == 3);

    REQUIRE(run_task("stability", config("stability_exg.toml"), s).code == 0);
    CHECK(report(s)["result"]["stability"]["stable"] == false);
}

TEST_CASE("every sample config runs", "[cli]") {
    for (const auto& entry : fs::directory_iterator(SISAMP_CONFIG_DIR)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("gabor", 0) == 0) continue;  // covered above on a reduced grid
        const std::string text = slurp(entry.path());
        std::string task;
        for (const char* t : {"analyze", "spectrum", "stability", "sampling", "vanisher", "verify-examples"})
            if (text.find(std::string("\"") + t + "\"") != std::string::npos) task = t;
        INFO(name);
        REQUIRE_FALSE(task.empty());
        CHECK(run_task(task, entry.path().string(), scratch("all_" + name)).code == 0);
    }
}

TEST_CASE("malformed configs fail before writing anything", "[cli]") {
    struct Bad {
        std::string name, text, expect;
    };
    const std::vector<Bad> bad{
        {"unknown_key.toml", "task = \"analyze\"\n[generator]\npreset = \"hsec\"\ncolour = 3\n", "line 4"},
        {"wrong_type.toml", "task = \"analyze\"\n[generator]\nclass = \"K\"\nP = \"z\"\nQ = [1, 0, 1]\n", "line 4"},
        {"bad_alpha.json", "{\n  \"task\": \"analyze\",\n  \"generator\": {\"preset\": \"hsec\",\n  \"alpha\": -1}\n}\n",
         "line 4"},
        {"task_mismatch.toml", "task = \"spectrum\"\n[generator]\npreset = \"hsec\"\n", "task"},
        {"syntax.toml", "task = \"analyze\"\n[generator\npreset = 1\n", "line 2"},
        {"missing_lambda.toml", "task = \"sampling\"\n[generator]\npreset = \"hsec\"\n", "lambda"},
    };
    for (const auto& b : bad) {
        const auto cfg = write_file(b.name, b.text);
        const auto out = scratch("bad_" + b.name);
        const auto r = run_task("analyze", cfg.string(), out);
        INFO(b.name << ": " << r.output);
        if (b.name == "missing_lambda.toml") {
            const auto r2 = run_task("sampling", cfg.string(), out);
            CHECK(r2.code == 2);
            CHECK(r2.output.find(b.expect) != std::string::npos);
        } else {
            CHECK(r.code == 2);
            CHECK(r.output.find(b.expect) != std::string::npos);
        }
        CHECK_FALSE(fs::exists(out));
    }
    CHECK(run_cli("analyze --config /nonexistent/file.toml").code == 2);
    CHECK(run_cli("analyze").code == 2);
    CHECK(run_cli("").code == 2);
}

TEST_CASE("runtime failures exit with code 1", "[cli]") {
    const auto cfg = write_file("residue_at_zero.toml",
                                "task = \"spectrum\"\n[generator]\npreset = \"hsec\"\n"
                                "[params]\nt = [0.0, 0.5]\nmethod = \"residue\"\n");
    const auto r = run_task("spectrum", cfg.string(), scratch("residue_at_zero"));
    CHECK(r.code == 1);
    CHECK(r.output.find("t = 0") != std::string::npos);
}

TEST_CASE("runs are reproducible up to the timestamp", "[cli]") {
    const auto a = scratch("repro_a"), b = scratch("repro_b");
    REQUIRE(run_task("analyze", config("analyze_hsec.toml"), a).code == 0);
    REQUIRE(run_task("analyze", config("analyze_hsec.toml"), b).code == 0);
    auto ra = report(a), rb = report(b);
    ra.erase("timestamp");
    rb.erase("timestamp");
    CHECK(ra == rb);
    CHECK(slurp(a / "bessel.csv") == slurp(b / "bessel.csv"));

    const auto c = scratch("repro_seed");
    REQUIRE(run_task("analyze", config("analyze_hsec.toml"), c, "--seed 12").code == 0);
    const auto rc = report(c);
    CHECK(rc["seed"] == 12);
    CHECK(slurp(a / "bessel.csv") != slurp(c / "bessel.csv"));
}

TEST_CASE("TOML and JSON spellings give the same result", "[cli]") {
    const auto toml = write_file("same.toml", "task = \"sampling\"\nseed = 3\n[generator]\nclass = \"K\"\n"
                                              "P = [0, 1]\nQ = [1, 0, 1]\n[sets.lambda]\n"
                                              "periodic = { offsets = [0.0, 0.35, 0.7], period = 2.0 }\n"
                                              "[params]\nwindows = [8.0, 16.0, 32.0]\n");
    const auto js = write_file("same.json", R"({"task": "sampling", "seed": 3,
  "generator": {"class": "K", "P": [0, 1], "Q": [1, 0, 1]},
  "sets": {"lambda": {"periodic": {"offsets": [0.0, 0.35, 0.7], "period": 2.0}}},
  "params": {"windows": [8.0, 16.0, 32.0]}})");
    const auto a = scratch("same_toml"), b = scratch("same_json");
    REQUIRE(run_task("sampling", toml.string(), a).code == 0);
    REQUIRE(run_task("sampling", js.string(), b).code == 0);
    const auto ra = report(a), rb = report(b);
    CHECK(ra["result"] == rb["result"]);
    CHECK(ra["config"] == rb["config"]);
    CHECK(slurp(a / "frame_sweep.csv") == slurp(b / "frame_sweep.csv"));
}
