#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "gridinfo/config.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/report.hpp"
#include "gridinfo/runner.hpp"

using namespace gridinfo;
namespace fs = std::filesystem;

namespace {

const char* kTinyConfig = R"({
  "catalog": [
    {"name": "g1", "type": "gaussian", "mean": 0.0, "variance": 1.0},
    {"name": "g2", "type": "gaussian", "mean": 0.0, "variance": 2.0}
  ],
  "checks": ["fii"]
})";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("minimal config falls back to defaults", "[config]") {
    const RunConfig cfg = parse_config_text(kTinyConfig);
    CHECK(cfg.catalog.size() == 2);
    CHECK(cfg.catalog[0].name == "g1");
    CHECK(cfg.checks == std::vector<std::string>{"fii"});
    CHECK(cfg.grid_overrides.empty());  // a supplied catalog resets the overrides
    CHECK(cfg.t_sweep.size() == 7);
    CHECK(cfg.mc_samples == 10'000'000);
    CHECK(cfg.tolerance_scale == 1.0);
    CHECK(cfg.threads == 1);
    CHECK(cfg.out_dir == "report");
}

TEST_CASE("config text that is not JSON", "[config]") {
    CHECK_THROWS_AS(parse_config_text("not json"), ParseError);
    CHECK_THROWS_AS(parse_config_text(R"({"t_sweep": "x"})"), ParseError);
}

TEST_CASE("config validation names the offending fields", "[config]") {
    const char* bad = R"({
      "catalog": [{"name": "g1", "type": "gaussian", "mean": 0.0, "variance": -1.0}],
      "checks": ["fii", "nope"]
    })";
    try {
        parse_config_text(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("variance") != std::string::npos);
        CHECK(msg.find("nope") != std::string::npos);
        CHECK(msg.find("g1") != std::string::npos);
    }
}

TEST_CASE("mc seed is required for the sampling check", "[config]") {
    const char* cfg = R"({
      "catalog": [{"name": "g1", "type": "gaussian", "mean": 0.0, "variance": 1.0}],
      "checks": ["var-additivity"],
      "mc": {"n_samples": 2000000}
    })";
    CHECK_THROWS_AS(parse_config_text(cfg), ValidationError);
}

TEST_CASE("default config round-trips byte-identically", "[config]") {
    const std::string s1 = to_json(default_config()).dump(2);
    const RunConfig cfg2 = parse_config_text(s1);
    CHECK(to_json(cfg2).dump(2) == s1);
}

TEST_CASE("suite report schema and round trip", "[report]") {
    RunConfig cfg = parse_config_text(kTinyConfig);
    cfg.checks = {"fii", "gap-probe"};
    const RunReport rep = run_suite(cfg);
    CHECK(rep.overall == Verdict::pass);
    CHECK(rep.checks.size() == 20);  // 2x2 ordered pairs x 5 weight sets
    CHECK(rep.sweeps.size() == 1);
    CHECK(rep.timings_ms.size() == 21);

    const ordered_json j = to_json(rep);
    CHECK(j.begin().key() == "version");
    for (const char* key : {"version", "timing", "config", "overall_verdict", "checks", "sweeps"})
        CHECK(j.contains(key));
    CHECK(j.at("timing").is_string());
    const ordered_json& c0 = j.at("checks").at(0);
    for (const char* key : {"name", "lhs", "rhs", "gap", "tolerance", "verdict", "diagnostics", "note"})
        CHECK(c0.contains(key));

    const RunReport back = report_from_json(j);
    CHECK(back == rep);
    CHECK(to_json(back).dump(2) == j.dump(2));
}

TEST_CASE("emit_report writes the bundle", "[report]") {
    RunConfig cfg = parse_config_text(kTinyConfig);
    cfg.checks = {"gap-probe"};
    const RunReport rep = run_suite(cfg);
    REQUIRE(rep.sweeps.size() == 1);

    const fs::path dir = "cr_report_tmp";
    fs::remove_all(dir);
    emit_report(rep, dir.string());
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "summary.txt"));
    const fs::path csv = dir / (detail::sanitize_filename(rep.sweeps[0].name) + ".csv");
    REQUIRE(fs::exists(csv));
    const std::string text = slurp(csv);
    CHECK(text.rfind("param,lhs,rhs,gap,verdict\n", 0) == 0);
    CHECK(count_lines(text) == 1 + static_cast<int>(rep.sweeps[0].values.size()));

    const RunReport loaded = load_report((dir / "report.json").string());
    CHECK(loaded == rep);
    const std::string summary = slurp(dir / "summary.txt");
    CHECK(summary.find("overall: pass") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("run_single rejects unknown families", "[runner]") {
    const RunConfig cfg = parse_config_text(kTinyConfig);
    CHECK_THROWS_AS(run_single(cfg, "nope"), ValidationError);
}

TEST_CASE("starved grids degrade to degenerate verdicts", "[runner]") {
    const char* coarse = R"({
      "catalog": [{"name": "g1", "type": "gaussian", "mean": 0.0, "variance": 1.0}],
      "grid_overrides": {"g1": {"x_min": -30.0, "x_max": 30.0, "n_points": 65}},
      "checks": ["fii"]
    })";
    const RunReport rep = run_single(parse_config_text(coarse), "fii");
    REQUIRE(!rep.checks.empty());
    int degenerate = 0;
    for (const auto& c : rep.checks)
        if (c.verdict == Verdict::degenerate) {
            ++degenerate;
            CHECK(!c.note.empty());
        }
    CHECK(degenerate == static_cast<int>(rep.checks.size()));
    CHECK(rep.overall == Verdict::degenerate);

    const fs::path dir = "cr_degenerate_tmp";
    fs::remove_all(dir);
    emit_report(rep, dir.string());  // degenerate runs still produce a bundle
    CHECK(fs::exists(dir / "report.json"));
    fs::remove_all(dir);
}

TEST_CASE("suite runs are deterministic", "[runner]") {
    RunConfig cfg = parse_config_text(kTinyConfig);
    cfg.checks = {"fii", "gap-probe"};
    const RunReport r1 = run_suite(cfg);
    const RunReport r2 = run_suite(cfg);
    CHECK(r1.checks == r2.checks);
    CHECK(r1.sweeps == r2.sweeps);
    CHECK(r1.overall == r2.overall);
    CHECK(r1.config_echo == r2.config_echo);

    ordered_json j1 = to_json(r1);
    ordered_json j2 = to_json(r2);
    j1.erase("timing");
    j2.erase("timing");
    CHECK(j1.dump() == j2.dump());
}
