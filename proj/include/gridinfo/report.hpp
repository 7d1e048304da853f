#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "gridinfo/check.hpp"
#include "gridinfo/config.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/runner.hpp"

namespace gridinfo {

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// File-name-safe version of a check name: runs of unsafe characters become
// single underscores.
inline std::string sanitize_filename(const std::string& name) {
    std::string out;
    bool pending = false;
    for (char ch : name) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
        if (ok) {
            if (pending && !out.empty()) out.push_back('_');
            pending = false;
            out.push_back(ch);
        } else {
            pending = true;
        }
    }
    return out.empty() ? std::string("unnamed") : out;
}

// All wall-clock content lives in this one string (hence one line of the
// pretty-printed JSON), so determinism checks can mask a single field.
inline std::string timing_string(const RunReport& rep) {
    std::string s = "started=" + rep.started_at;
    char buf[48];
    for (const auto& [name, ms] : rep.timings_ms) {
        std::snprintf(buf, sizeof(buf), "%.17g", ms);
        s += "; " + name + "=" + buf;
    }
    return s;
}

inline void parse_timing_string(const std::string& s, RunReport& rep) {
    rep.started_at.clear();
    rep.timings_ms.clear();
    std::size_t pos = 0;
    bool first = true;
    while (pos <= s.size()) {
        std::size_t end = s.find("; ", pos);
        if (end == std::string::npos) end = s.size();
        const std::string tok = s.substr(pos, end - pos);
        // Check names may contain '='; the value never does, so split at the
        // last one.
        const std::size_t eq = tok.rfind('=');
        if (eq != std::string::npos) {
            if (first)
                rep.started_at = tok.substr(eq + 1);
            else
                rep.timings_ms.emplace_back(tok.substr(0, eq), std::stod(tok.substr(eq + 1)));
        }
        first = false;
        if (end == s.size()) break;
        pos = end + 2;
    }
}

}  // namespace detail

inline ordered_json to_json(const CheckResult& r) {
    ordered_json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["gap"] = r.gap;
    j["tolerance"] = r.tolerance;
    j["verdict"] = to_string(r.verdict);
    j["diagnostics"] = r.diagnostics;
    j["note"] = r.note;
    return j;
}

inline ordered_json to_json(const SweepReport& s) {
    ordered_json j;
    j["name"] = s.name;
    j["parameter"] = s.parameter;
    j["values"] = s.values;
    j["results"] = ordered_json::array();
    for (const auto& r : s.results) j["results"].push_back(to_json(r));
    j["limits"] = s.limits;
    j["verdict"] = to_string(s.verdict);
    j["note"] = s.note;
    return j;
}

inline ordered_json to_json(const RunReport& rep) {
    ordered_json j;
    j["version"] = rep.version;
    j["timing"] = detail::timing_string(rep);
    j["config"] = rep.config_echo;
    j["overall_verdict"] = to_string(rep.overall);
    j["checks"] = ordered_json::array();
    for (const auto& c : rep.checks) j["checks"].push_back(to_json(c));
    j["sweeps"] = ordered_json::array();
    for (const auto& s : rep.sweeps) j["sweeps"].push_back(to_json(s));
    return j;
}

namespace detail {

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "degenerate") return Verdict::degenerate;
    throw ParseError("unknown verdict '" + s + "'");
}

inline CheckResult check_from_json(const ordered_json& j) {
    CheckResult r;
    r.name = j.at("name").get<std::string>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.gap = j.at("gap").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    r.note = j.at("note").get<std::string>();
    return r;
}

inline SweepReport sweep_from_json(const ordered_json& j) {
    SweepReport s;
    s.name = j.at("name").get<std::string>();
    s.parameter = j.at("parameter").get<std::string>();
    s.values = j.at("values").get<std::vector<double>>();
    for (const auto& rj : j.at("results")) s.results.push_back(check_from_json(rj));
    s.limits = j.at("limits").get<std::map<std::string, double>>();
    s.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    s.note = j.at("note").get<std::string>();
    return s;
}

}  // namespace detail

inline RunReport report_from_json(const ordered_json& j) {
    RunReport rep;
    try {
        rep.version = j.at("version").get<std::string>();
        detail::parse_timing_string(j.at("timing").get<std::string>(), rep);
        rep.config_echo = j.at("config");
        rep.overall = detail::verdict_from_string(j.at("overall_verdict").get<std::string>());
        for (const auto& cj : j.at("checks")) rep.checks.push_back(detail::check_from_json(cj));
        for (const auto& sj : j.at("sweeps")) rep.sweeps.push_back(detail::sweep_from_json(sj));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    return rep;
}

inline bool operator==(const CheckResult& a, const CheckResult& b) {
    return a.name == b.name && a.lhs == b.lhs && a.rhs == b.rhs && a.gap == b.gap &&
           a.tolerance == b.tolerance && a.verdict == b.verdict &&
           a.diagnostics == b.diagnostics && a.note == b.note;
}

inline bool operator==(const SweepReport& a, const SweepReport& b) {
    return a.name == b.name && a.parameter == b.parameter && a.values == b.values &&
           a.results == b.results && a.limits == b.limits && a.verdict == b.verdict &&
           a.note == b.note;
}

inline bool operator==(const RunReport& a, const RunReport& b) {
    return a.version == b.version && a.started_at == b.started_at &&
           a.timings_ms == b.timings_ms && a.config_echo == b.config_echo &&
           a.checks == b.checks && a.sweeps == b.sweeps && a.overall == b.overall;
}

inline std::string summary_text(const RunReport& rep) {
    std::string out;
    char buf[64];
    const auto line = [&](Verdict v, const std::string& name, const std::string& tail) {
        std::snprintf(buf, sizeof(buf), "%-10s ", to_string(v));
        out += buf;
        out += name;
        if (!tail.empty()) out += "  " + tail;
        out += '\n';
    };
    int n_pass = 0, n_fail = 0, n_degen = 0;
    const auto tally = [&](Verdict v) {
        if (v == Verdict::pass)
            ++n_pass;
        else if (v == Verdict::fail)
            ++n_fail;
        else
            ++n_degen;
    };
    for (const auto& c : rep.checks) {
        tally(c.verdict);
        if (c.verdict == Verdict::degenerate)
            line(c.verdict, c.name, c.note);
        else
            line(c.verdict, c.name, "gap=" + detail::csv_num(c.gap));
    }
    for (const auto& s : rep.sweeps) {
        tally(s.verdict);
        std::string tail;
        if (s.verdict == Verdict::degenerate) {
            tail = s.note;
        } else {
            for (const auto& [k, v] : s.limits) {
                if (!tail.empty()) tail += ' ';
                tail += k + "=" + detail::csv_num(v);
            }
        }
        line(s.verdict, s.name, tail);
    }
    std::snprintf(buf, sizeof(buf), "\npass %d  fail %d  degenerate %d\noverall: %s\n", n_pass,
                  n_fail, n_degen, to_string(rep.overall));
    out += buf;
    return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << content;
    os.flush();
    if (!os.good()) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string sweep_csv(const SweepReport& s) {
    std::string out = "param,lhs,rhs,gap,verdict\n";
    for (std::size_t k = 0; k < s.results.size(); ++k) {
        const CheckResult& r = s.results[k];
        const double param = k < s.values.size() ? s.values[k] : 0.0;
        out += csv_num(param) + "," + csv_num(r.lhs) + "," + csv_num(r.rhs) + "," +
               csv_num(r.gap) + "," + to_string(r.verdict) + "\n";
    }
    return out;
}

}  // namespace detail

// Writes report.json, one <sweep-name>.csv per sweep, and summary.txt.
inline void emit_report(const RunReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
    detail::write_file(fs::path(out_dir) / "report.json", to_json(rep).dump(2) + "\n");
    for (const auto& s : rep.sweeps)
        detail::write_file(fs::path(out_dir) / (detail::sanitize_filename(s.name) + ".csv"),
                           detail::sweep_csv(s));
    detail::write_file(fs::path(out_dir) / "summary.txt", summary_text(rep));
}

inline RunReport load_report(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    return report_from_json(j);
}

}  // namespace gridinfo
