#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/grid.hpp"

namespace gridinfo {

using ordered_json = nlohmann::ordered_json;

inline const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"fii",        "stam",        "dependent-fii",
                                                "lemma1",     "debruijn",    "comm-proof",
                                                "bayes-proof", "gap-probe",  "var-additivity"};
    return names;
}

struct CatalogEntry {
    std::string name;
    DistributionSpec spec;
};

struct RunConfig {
    std::vector<CatalogEntry> catalog;
    std::map<std::string, GridSpec> grid_overrides;
    std::vector<std::string> checks;
    std::map<std::string, double> tolerances;  // per-check overrides of the defaults
    std::vector<double> t_sweep;
    std::map<std::string, std::vector<double>> debruijn_sweep_overrides;
    std::uint64_t mc_seed = 0;
    bool mc_seed_set = false;
    std::int64_t mc_samples = 10'000'000;
    std::string out_dir = "report";
    // CLI-level knobs, not part of the config file.
    double tolerance_scale = 1.0;
    int threads = 1;

    const DistributionSpec* find(const std::string& name) const {
        for (const auto& e : catalog)
            if (e.name == name) return &e.spec;
        return nullptr;
    }

    bool selected(const std::string& check) const {
        return std::find(checks.begin(), checks.end(), check) != checks.end();
    }

    double tolerance_for(const std::string& check, double fallback) const {
        const auto it = tolerances.find(check);
        return (it != tolerances.end() ? it->second : fallback) * tolerance_scale;
    }
};

namespace detail {

inline ordered_json spec_to_json(const DistributionSpec& spec) {
    ordered_json j;
    if (const auto* g = std::get_if<Gaussian>(&spec)) {
        j["type"] = "gaussian";
        j["mean"] = g->mean;
        j["variance"] = g->variance;
    } else if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        j["type"] = "gaussian_mixture";
        j["components"] = ordered_json::array();
        for (const auto& c : m->components)
            j["components"].push_back(
                ordered_json{{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    } else if (const auto* l = std::get_if<Laplace>(&spec)) {
        j["type"] = "laplace";
        j["location"] = l->location;
        j["scale"] = l->scale;
    } else if (const auto* g2 = std::get_if<Gaussian2D>(&spec)) {
        j["type"] = "gaussian_2d";
        j["mean"] = {g2->mean[0], g2->mean[1]};
        j["cov"] = {{g2->cov[0], g2->cov[1]}, {g2->cov[2], g2->cov[3]}};
    } else {
        const auto& m2 = std::get<Mixture2D>(spec);
        j["type"] = "mixture_2d";
        j["components"] = ordered_json::array();
        for (const auto& c : m2.components) {
            const Gaussian2D& g = c.component;
            j["components"].push_back(
                ordered_json{{"weight", c.weight},
                             {"mean", {g.mean[0], g.mean[1]}},
                             {"cov", {{g.cov[0], g.cov[1]}, {g.cov[2], g.cov[3]}}}});
        }
    }
    return j;
}

inline DistributionSpec spec_from_json(const ordered_json& j, const std::string& where,
                                       std::vector<std::string>& problems) {
    const std::string type = j.value("type", "");
    const auto need = [&](const char* key) {
        if (!j.contains(key)) {
            problems.push_back(where + ": missing field '" + key + "'");
            return false;
        }
        return true;
    };
    if (type == "gaussian") {
        Gaussian g;
        if (need("mean")) g.mean = j.at("mean").get<double>();
        if (need("variance")) g.variance = j.at("variance").get<double>();
        return g;
    }
    if (type == "gaussian_mixture") {
        GaussianMixture m;
        if (need("components"))
            for (const auto& c : j.at("components"))
                m.components.push_back(GmmComponent{c.at("weight").get<double>(),
                                                    c.at("mean").get<double>(),
                                                    c.at("variance").get<double>()});
        return m;
    }
    if (type == "laplace") {
        Laplace l;
        if (need("location")) l.location = j.at("location").get<double>();
        if (need("scale")) l.scale = j.at("scale").get<double>();
        return l;
    }
    if (type == "gaussian_2d") {
        Gaussian2D g;
        if (need("mean")) {
            g.mean[0] = j.at("mean").at(0).get<double>();
            g.mean[1] = j.at("mean").at(1).get<double>();
        }
        if (need("cov")) {
            const auto& c = j.at("cov");
            g.cov = {c.at(0).at(0).get<double>(), c.at(0).at(1).get<double>(),
                     c.at(1).at(0).get<double>(), c.at(1).at(1).get<double>()};
        }
        return g;
    }
    if (type == "mixture_2d") {
        Mixture2D m;
        if (need("components"))
            for (const auto& c : j.at("components")) {
                Mixture2DComponent mc;
                mc.weight = c.at("weight").get<double>();
                mc.component.mean = {c.at("mean").at(0).get<double>(),
                                     c.at("mean").at(1).get<double>()};
                const auto& cv = c.at("cov");
                mc.component.cov = {cv.at(0).at(0).get<double>(), cv.at(0).at(1).get<double>(),
                                    cv.at(1).at(0).get<double>(), cv.at(1).at(1).get<double>()};
                m.components.push_back(mc);
            }
        return m;
    }
    problems.push_back(where + ": unknown distribution type '" + type + "'");
    return Gaussian{0.0, 1.0};
}

}  // namespace detail

inline ordered_json to_json(const RunConfig& cfg) {
    ordered_json j;
    j["catalog"] = ordered_json::array();
    for (const auto& e : cfg.catalog) {
        ordered_json s = detail::spec_to_json(e.spec);
        ordered_json row;
        row["name"] = e.name;
        for (auto& [k, v] : s.items()) row[k] = v;
        j["catalog"].push_back(row);
    }
    j["grid_overrides"] = ordered_json::object();
    for (const auto& [name, g] : cfg.grid_overrides)
        j["grid_overrides"][name] =
            ordered_json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n_points}};
    j["checks"] = cfg.checks;
    j["tolerances"] = ordered_json::object();
    for (const auto& [name, tol] : cfg.tolerances) j["tolerances"][name] = tol;
    j["t_sweep"] = cfg.t_sweep;
    j["debruijn_sweep_overrides"] = ordered_json::object();
    for (const auto& [name, ts] : cfg.debruijn_sweep_overrides)
        j["debruijn_sweep_overrides"][name] = ts;
    j["mc"] = ordered_json{{"seed", cfg.mc_seed}, {"n_samples", cfg.mc_samples}};
    j["tolerance_scale"] = cfg.tolerance_scale;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

// Validates every invariant and reports all violations at once.
inline void validate_config(const RunConfig& cfg) {
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (const auto& e : cfg.catalog) {
        if (!names.insert(e.name).second)
            problems.push_back("catalog: duplicate name '" + e.name + "'");
        try {
            validate(e.spec);
        } catch (const Error& err) {
            problems.push_back("catalog entry '" + e.name + "': " + err.what());
        }
    }
    if (cfg.checks.empty()) problems.push_back("checks: selection must not be empty");
    for (const auto& c : cfg.checks)
        if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
            problems.push_back("checks: unknown check '" + c + "'");
    for (const auto& [name, tol] : cfg.tolerances) {
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
            problems.push_back("tolerances: unknown check '" + name + "'");
        if (!(tol > 0.0)) problems.push_back("tolerances: '" + name + "' must be positive");
    }
    for (const auto& [name, g] : cfg.grid_overrides) {
        if (names.find(name) == names.end())
            problems.push_back("grid_overrides: unknown catalog name '" + name + "'");
        (void)g;  // GridSpec construction already validated shape
    }
    for (const auto& [name, ts] : cfg.debruijn_sweep_overrides) {
        if (names.find(name) == names.end())
            problems.push_back("debruijn_sweep_overrides: unknown catalog name '" + name + "'");
        if (ts.size() < 4)
            problems.push_back("debruijn_sweep_overrides: '" + name + "' needs at least 4 values");
    }
    if (cfg.t_sweep.size() < 4) problems.push_back("t_sweep: needs at least 4 values");
    for (std::size_t i = 1; i < cfg.t_sweep.size(); ++i)
        if (!(cfg.t_sweep[i] < cfg.t_sweep[i - 1])) {
            problems.push_back("t_sweep: values must be strictly decreasing");
            break;
        }
    if (cfg.selected("var-additivity")) {
        if (!cfg.mc_seed_set) problems.push_back("mc.seed: required when var-additivity is selected");
        if (cfg.mc_samples < 1'000'000)
            problems.push_back("mc.n_samples: must be at least 1e6");
    }
    if (!(cfg.tolerance_scale > 0.0)) problems.push_back("tolerance-scale: must be positive");
    if (cfg.threads < 1) problems.push_back("threads: must be at least 1");
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
}

inline RunConfig default_config();

// Omitted fields fall back to the built-in defaults; a supplied catalog
// replaces the default catalog together with its grid/sweep overrides, and a
// supplied mc block must name its own seed.
inline RunConfig config_from_json(const ordered_json& j) {
    RunConfig cfg = default_config();
    std::vector<std::string> problems;
    if (j.contains("catalog")) {
        cfg.catalog.clear();
        cfg.grid_overrides.clear();
        cfg.debruijn_sweep_overrides.clear();
        for (const auto& row : j.at("catalog")) {
            CatalogEntry e;
            e.name = row.value("name", "");
            if (e.name.empty()) problems.push_back("catalog: entry without a name");
            e.spec = detail::spec_from_json(row, "catalog entry '" + e.name + "'", problems);
            cfg.catalog.push_back(std::move(e));
        }
    }
    if (j.contains("grid_overrides")) {
        for (const auto& [name, g] : j.at("grid_overrides").items()) {
            try {
                cfg.grid_overrides.emplace(
                    name, GridSpec(g.at("x_min").get<double>(), g.at("x_max").get<double>(),
                                   g.at("n_points").get<int>()));
            } catch (const Error& err) {
                problems.push_back("grid_overrides '" + name + "': " + err.what());
            }
        }
    }
    if (j.contains("checks")) cfg.checks = j.at("checks").get<std::vector<std::string>>();
    if (j.contains("tolerances"))
        for (const auto& [name, tol] : j.at("tolerances").items())
            cfg.tolerances[name] = tol.get<double>();
    if (j.contains("t_sweep")) cfg.t_sweep = j.at("t_sweep").get<std::vector<double>>();
    if (j.contains("debruijn_sweep_overrides"))
        for (const auto& [name, ts] : j.at("debruijn_sweep_overrides").items())
            cfg.debruijn_sweep_overrides[name] = ts.get<std::vector<double>>();
    if (j.contains("mc")) {
        const auto& mc = j.at("mc");
        cfg.mc_seed = 0;
        cfg.mc_seed_set = false;
        if (mc.contains("seed")) {
            cfg.mc_seed = mc.at("seed").get<std::uint64_t>();
            cfg.mc_seed_set = true;
        }
        if (mc.contains("n_samples")) cfg.mc_samples = mc.at("n_samples").get<std::int64_t>();
    }
    if (j.contains("tolerance_scale")) cfg.tolerance_scale = j.at("tolerance_scale").get<double>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return cfg;
}

// Built-in catalog and full check selection; every default documented in the
// README is produced here.
inline RunConfig default_config() {
    RunConfig cfg;
    cfg.catalog = {
        {"gauss_unit", Gaussian{0.0, 1.0}},
        {"gauss_half", Gaussian{0.5, 0.5}},
        {"gmm_sym", GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}}},
        {"gmm_asym", GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}}},
        {"laplace_unit", Laplace{0.0, 1.0}},
        {"gauss2d_neg05", Gaussian2D{{0.0, 0.0}, {1.0, -0.5, -0.5, 1.0}}},
        {"gauss2d_zero", Gaussian2D{{0.0, 0.0}, {1.0, 0.0, 0.0, 1.0}}},
        {"gauss2d_pos05", Gaussian2D{{0.0, 0.0}, {1.0, 0.5, 0.5, 1.0}}},
        {"gauss2d_pos09", Gaussian2D{{0.0, 0.0}, {1.0, 0.9, 0.9, 1.0}}},
        {"mix2d_test",
         Mixture2D{{{0.5, {{-1.0, -0.5}, {1.0, 0.3, 0.3, 0.8}}},
                    {0.5, {{1.0, 0.5}, {1.0, -0.2, -0.2, 1.2}}}}}},
    };
    // The Laplace kink needs a finer step than the smooth catalog; this also
    // sets the common step every 1-D density is materialized on.
    cfg.grid_overrides.emplace("laplace_unit", GridSpec(-31.2448, 31.2448, 8193));
    cfg.checks = known_checks();
    for (int k = 0; k <= 6; ++k) cfg.t_sweep.push_back(0.1 * std::pow(2.0, -k));
    // The kink also slows the mutual-information route's convergence; start
    // its sweep higher so the extrapolation sees the asymptotic regime.
    std::vector<double> lap_ts;
    for (int k = 0; k <= 5; ++k) lap_ts.push_back(0.2 * std::pow(2.0, -k));
    cfg.debruijn_sweep_overrides.emplace("laplace_unit", std::move(lap_ts));
    cfg.mc_seed = 20260815;
    cfg.mc_seed_set = true;
    cfg.mc_samples = 10'000'000;
    cfg.out_dir = "report";
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg = config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config field error: ") + e.what());
    }
    validate_config(cfg);
    return cfg;
}

}  // namespace gridinfo
