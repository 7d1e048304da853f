// Command-line front end: run the full suite or a single check family
// against a JSON config, and emit machine-readable reports.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gridinfo/gridinfo.hpp"

namespace {

gridinfo::RunConfig load_config(const std::string& path) {
    if (path.empty()) return gridinfo::default_config();
    std::ifstream is(path, std::ios::binary);
    if (!is) throw gridinfo::IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return gridinfo::parse_config_text(ss.str());
}

int verdict_exit_code(gridinfo::Verdict v) {
    return v == gridinfo::Verdict::pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid-density information toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double tolerance_scale = 0.0;
    int threads = 0;

    app.add_option("--config", config_path, "JSON config file (defaults used when omitted)");
    app.add_option("--out", out_dir, "output directory for report.json/CSVs/summary.txt");
    CLI::Option* opt_seed = app.add_option("--seed", seed, "Monte Carlo seed override");
    CLI::Option* opt_tol =
        app.add_option("--tolerance-scale", tolerance_scale, "multiply all tolerances");
    app.add_option("--threads", threads, "worker threads (default from config)");

    std::string check_name;
    CLI::App* cmd_check = app.add_subcommand("check", "run one check family");
    cmd_check->add_option("name", check_name, "check family name")->required();
    CLI::App* cmd_suite = app.add_subcommand("suite", "run every selected check");
    CLI::App* cmd_report = app.add_subcommand("report", "print the summary of an existing report");
    for (CLI::App* sub : {cmd_check, cmd_suite, cmd_report}) sub->fallthrough(true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_report->parsed()) {
            const std::string dir = out_dir.empty() ? "report" : out_dir;
            const gridinfo::RunReport rep =
                gridinfo::load_report((std::filesystem::path(dir) / "report.json").string());
            std::cout << gridinfo::summary_text(rep);
            return verdict_exit_code(rep.overall);
        }

        gridinfo::RunConfig cfg = load_config(config_path);
        if (opt_seed->count() > 0) {
            cfg.mc_seed = seed;
            cfg.mc_seed_set = true;
        }
        if (opt_tol->count() > 0) cfg.tolerance_scale = tolerance_scale;
        if (threads > 0) cfg.threads = threads;
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        gridinfo::RunReport rep;
        if (cmd_check->parsed())
            rep = gridinfo::run_single(cfg, check_name);
        else if (cmd_suite->parsed())
            rep = gridinfo::run_suite(cfg);

        gridinfo::emit_report(rep, cfg.out_dir);
        std::cout << gridinfo::summary_text(rep);
        return verdict_exit_code(rep.overall);
    } catch (const gridinfo::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const gridinfo::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const gridinfo::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
