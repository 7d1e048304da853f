#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gridinfo/channel.hpp"
#include "gridinfo/check.hpp"
#include "gridinfo/config.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/harness.hpp"
#include "gridinfo/joint.hpp"
#include "gridinfo/mutual_information.hpp"
#include "gridinfo/score.hpp"
#include "gridinfo/version.hpp"

namespace gridinfo {

struct RunReport {
    ordered_json config_echo;
    std::string version;
    std::string started_at;                                  // wall clock, excluded from diffs
    std::vector<std::pair<std::string, double>> timings_ms;  // per task, excluded from diffs
    std::vector<CheckResult> checks;
    std::vector<SweepReport> sweeps;
    Verdict overall = Verdict::fail;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Prepared1D {
    std::string name;
    DistributionSpec spec;
    GridDensity density;
    bool smooth = true;  // false for kinked densities (Laplace)
};

struct Prepared2D {
    std::string name;
    DistributionSpec spec;
    JointDensity2D joint;
};

// All 1-D catalog densities are materialized on one common step (the finest
// of the per-entry grids, centers rounded onto its lattice) so that any pair
// is commensurate for convolution. Per-entry spans are preserved.
inline std::vector<Prepared1D> prepare_catalog_1d(const RunConfig& cfg) {
    struct Plan {
        std::string name;
        DistributionSpec spec;
        double x_min, x_max, step;
    };
    std::vector<Plan> plans;
    for (const auto& e : cfg.catalog) {
        if (!is_1d(e.spec)) continue;
        const auto it = cfg.grid_overrides.find(e.name);
        const GridSpec g = (it != cfg.grid_overrides.end()) ? it->second : default_grid(e.spec);
        plans.push_back({e.name, e.spec, g.x_min, g.x_max, g.step()});
    }
    std::vector<Prepared1D> out;
    if (plans.empty()) return out;
    double h = plans.front().step;
    for (const auto& p : plans) h = std::min(h, p.step);
    for (const auto& p : plans) {
        const double c = std::round(0.5 * (p.x_min + p.x_max) / h) * h;
        const int k = std::max(
            16, static_cast<int>(std::ceil(std::max(p.x_max - c, c - p.x_min) / h)));
        const GridSpec g(c - k * h, c + k * h, 2 * k + 1);
        out.push_back({p.name, p.spec, materialize(p.spec, g),
                       kind_name(p.spec) != "laplace"});
    }
    return out;
}

inline std::vector<Prepared2D> prepare_catalog_2d(const RunConfig& cfg) {
    std::vector<Prepared2D> out;
    for (const auto& e : cfg.catalog) {
        if (is_1d(e.spec)) continue;
        const auto it = cfg.grid_overrides.find(e.name);
        if (it != cfg.grid_overrides.end())
            out.push_back({e.name, e.spec, materialize2d(e.spec, it->second, it->second)});
        else
            out.push_back({e.name, e.spec, materialize2d(e.spec)});
    }
    return out;
}

struct Task {
    std::string name;
    bool is_sweep = false;
    std::function<CheckResult()> run_check;
    std::function<SweepReport()> run_sweep;
};

inline CheckResult degenerate_check(const std::string& name, const std::string& why) {
    CheckResult r;
    r.name = name;
    r.verdict = Verdict::degenerate;
    r.note = why;
    return r;
}

inline SweepReport degenerate_sweep(const std::string& name, const std::string& why) {
    SweepReport r;
    r.name = name;
    r.verdict = Verdict::degenerate;
    r.note = why;
    return r;
}

inline CheckResult run_lemma1(const Prepared1D& e, double sigma2, double rel_tol,
                              const std::string& nm) {
    const GridDensity fr = resolve_for_kernel(e.density, std::sqrt(sigma2));
    const GridDensity fx = convolve(fr, gaussian_kernel_density(sigma2, fr.grid.step()));
    const double j = fisher_information(fx);
    const double cv = conditional_variance(fr, sigma2).cond_var;
    const double rhs = (sigma2 - cv) / (sigma2 * sigma2);
    CheckResult r = equality_check(nm, j, rhs, rel_tol * j);
    r.diagnostics["sigma2"] = sigma2;
    r.diagnostics["cond_var"] = cv;
    r.diagnostics["relative_residual"] = std::abs(j - rhs) / j;
    r.diagnostics["n_points"] = static_cast<double>(e.density.grid.n_points);
    return r;
}

inline SweepReport run_debruijn(const RunConfig& cfg, const Prepared1D& e, const GridDensity& fw,
                                double rel_tol, const std::string& nm) {
    const auto it = cfg.debruijn_sweep_overrides.find(e.name);
    const std::vector<double>& ts =
        (it != cfg.debruijn_sweep_overrides.end()) ? it->second : cfg.t_sweep;
    const DeBruijnSweep sw = de_bruijn_sweep(fw, e.density, 1.0, ts);
    const double jn = fisher_information(e.density);
    SweepReport rep;
    rep.name = nm;
    rep.parameter = "t";
    rep.values = sw.t_values;
    for (std::size_t k = 0; k < sw.t_values.size(); ++k) {
        CheckResult c;
        c.name = nm + "@t=" + fmt_num(sw.t_values[k]);
        c.lhs = sw.slope_estimates[k];
        c.rhs = sw.extrapolated_limit;
        c.gap = c.rhs - c.lhs;
        c.tolerance = 0.0;
        c.verdict = (sw.mi_values[k] >= -1e-12 && std::isfinite(sw.slope_estimates[k]))
                        ? Verdict::pass
                        : Verdict::fail;
        c.diagnostics["t"] = sw.t_values[k];
        c.diagnostics["mi"] = sw.mi_values[k];
        c.diagnostics["remainder_ratio"] = sw.remainder_ratio[k];
        c.diagnostics["n_points"] = static_cast<double>(e.density.grid.n_points);
        rep.results.push_back(std::move(c));
    }
    const double rel = std::abs(sw.extrapolated_limit - jn) / jn;
    rep.limits["extrapolated_limit"] = sw.extrapolated_limit;
    rep.limits["fisher_information"] = jn;
    rep.limits["limit_rel_err"] = rel;
    rep.limits["remainder_ratio_last"] = std::abs(sw.remainder_ratio.back());
    rep.limits["smooth"] = e.smooth ? 1.0 : 0.0;
    Verdict v = Verdict::pass;
    for (const auto& c : rep.results) v = combine(v, c.verdict);
    if (rel > rel_tol) v = Verdict::fail;
    // The 0.5% residual-slope contract applies to smooth densities; a kink
    // slows the o(t) decay, so those sweeps are judged on the limit alone.
    if (e.smooth && std::abs(sw.remainder_ratio.back()) >= 0.005) v = Verdict::fail;
    rep.verdict = v;
    return rep;
}

}  // namespace detail

// Expands the selected checks over the catalog into independent tasks and
// runs them (optionally in parallel); results are merged in task order, so
// reports are identical for any thread count.
inline RunReport run_suite(const RunConfig& cfg) {
    validate_config(cfg);

    const auto t_start = std::chrono::system_clock::now();
    RunReport rep;
    rep.config_echo = to_json(cfg);
    rep.version = kVersion;
    {
        const std::time_t tt = std::chrono::system_clock::to_time_t(t_start);
        std::tm tm_utc{};
        gmtime_r(&tt, &tm_utc);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        rep.started_at = buf;
    }

    const std::vector<detail::Prepared1D> oned = detail::prepare_catalog_1d(cfg);
    const std::vector<detail::Prepared2D> twod = detail::prepare_catalog_2d(cfg);

    // Shared inputs for the MI-based checks.
    const GridDensity w_gauss = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const DistributionSpec w_gauss_spec = Gaussian{0.0, 1.0};

    // Task lambdas run after the construction blocks below end, so they
    // capture block-scope values (indices, weights, tolerances, names) by
    // copy and only the long-lived locals above by reference.
    std::vector<detail::Task> tasks;
    const auto add_check = [&tasks](std::string name, std::function<CheckResult()> fn) {
        detail::Task t;
        t.name = std::move(name);
        t.run_check = std::move(fn);
        tasks.push_back(std::move(t));
    };
    const auto add_sweep = [&tasks](std::string name, std::function<SweepReport()> fn) {
        detail::Task t;
        t.name = std::move(name);
        t.is_sweep = true;
        t.run_sweep = std::move(fn);
        tasks.push_back(std::move(t));
    };

    using detail::fmt_num;

    if (cfg.selected("fii")) {
        const double tol = cfg.tolerance_for("fii", kDefaultInequalityTol);
        const std::vector<std::pair<double, double>> weights{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 3}};
        for (std::size_t i = 0; i < oned.size(); ++i)
            for (std::size_t j = 0; j < oned.size(); ++j)
                for (const auto& [a, b] : weights) {
                    std::string nm = "fii[f1=" + oned[i].name + ",f2=" + oned[j].name +
                                     ",a=" + fmt_num(a) + ",b=" + fmt_num(b) + "]";
                    add_check(nm, [&oned, i, j, a = a, b = b, tol, nm]() {
                        CheckResult r = fii_check(oned[i].density, oned[j].density, a, b, tol);
                        r.name = nm;
                        return r;
                    });
                }
    }

    if (cfg.selected("stam")) {
        const double tol = cfg.tolerance_for("stam", kDefaultInequalityTol);
        for (std::size_t i = 0; i < oned.size(); ++i)
            for (std::size_t j = i; j < oned.size(); ++j) {
                std::string nm = "stam[f1=" + oned[i].name + ",f2=" + oned[j].name + "]";
                add_check(nm, [&oned, i, j, tol, nm]() {
                    CheckResult r = stam_check(oned[i].density, oned[j].density, tol);
                    r.name = nm;
                    return r;
                });
            }
    }

    if (cfg.selected("dependent-fii")) {
        const double tol = cfg.tolerance_for("dependent-fii", kDefaultInequalityTol);
        const std::vector<std::pair<double, double>> weights{{1, 1}, {1, 2}};
        for (std::size_t k = 0; k < twod.size(); ++k)
            for (const auto& [a, b] : weights) {
                std::string nm = "dependent-fii[j=" + twod[k].name + ",a=" + fmt_num(a) +
                                 ",b=" + fmt_num(b) + "]";
                add_check(nm, [&twod, k, a = a, b = b, tol, nm]() {
                    CheckResult r = dependent_fii_check(twod[k].joint, a, b, tol);
                    r.name = nm;
                    return r;
                });
            }
    }

    if (cfg.selected("lemma1")) {
        const double rel_tol = cfg.tolerance_for("lemma1", 1e-4);
        for (std::size_t i = 0; i < oned.size(); ++i)
            for (double s2 : {0.25, 1.0, 4.0}) {
                std::string nm = "lemma1[f=" + oned[i].name + ",sigma2=" + fmt_num(s2) + "]";
                add_check(nm, [&oned, i, s2, rel_tol, nm]() {
                    return detail::run_lemma1(oned[i], s2, rel_tol, nm);
                });
            }
    }

    if (cfg.selected("debruijn")) {
        const double rel_tol = cfg.tolerance_for("debruijn", kLimitRelTol);
        for (std::size_t i = 0; i < oned.size(); ++i) {
            std::string nm = "debruijn[f=" + oned[i].name + ",W=gaussian]";
            add_sweep(nm, [&cfg, &oned, &w_gauss, i, rel_tol, nm]() {
                return detail::run_debruijn(cfg, oned[i], w_gauss, rel_tol, nm);
            });
        }
        // Moment-matched non-Gaussian input: the expansion limit must be
        // unchanged. Skipped for kinked noise, where the t-range needed to
        // damp the kink's slope bias is already pinned by the override.
        for (std::size_t i = 0; i < oned.size(); ++i) {
            if (!oned[i].smooth) continue;
            std::string nm = "debruijn[f=" + oned[i].name + ",W=moment-matched]";
            add_sweep(nm, [&cfg, &oned, i, rel_tol, nm]() {
                const MomentMatchedSpec mm = moment_matched_nongaussian();
                const GridDensity fw = materialize(DistributionSpec{mm.to_mixture()});
                return detail::run_debruijn(cfg, oned[i], fw, rel_tol, nm);
            });
        }
    }

    if (cfg.selected("comm-proof")) {
        const double tol = cfg.tolerance_for("comm-proof", kDefaultInequalityTol);
        for (std::size_t i = 0; i < oned.size(); ++i)
            for (std::size_t j = i + 1; j < oned.size(); ++j) {
                // The entropy-difference route needs smooth inputs for its
                // limits to settle at these sweep depths.
                if (!oned[i].smooth || !oned[j].smooth) continue;
                std::string nm =
                    "comm-proof[f1=" + oned[i].name + ",f2=" + oned[j].name + ",W=gaussian]";
                add_sweep(nm, [&cfg, &oned, &w_gauss_spec, i, j, tol, nm]() {
                    SweepReport s = communications_proof_sweep(
                        oned[i].density, oned[j].density, 1.0, 1.0, cfg.t_sweep, w_gauss_spec, tol);
                    s.name = nm;
                    return s;
                });
                std::string nm2 =
                    "comm-proof[f1=" + oned[i].name + ",f2=" + oned[j].name + ",W=moment-matched]";
                add_sweep(nm2, [&cfg, &oned, i, j, tol, nm2]() {
                    const MomentMatchedSpec mm = moment_matched_nongaussian();
                    SweepReport s = communications_proof_sweep(
                        oned[i].density, oned[j].density, 1.0, 1.0, cfg.t_sweep,
                        DistributionSpec{mm.to_mixture()}, tol);
                    s.name = nm2;
                    return s;
                });
            }
    }

    if (cfg.selected("bayes-proof")) {
        const double tol = cfg.tolerance_for("bayes-proof", kDefaultInequalityTol);
        std::vector<double> ts = cfg.t_sweep;
        if (ts.empty() || ts.front() < 5.0) ts.insert(ts.begin(), 5.0);
        for (std::size_t i = 0; i < oned.size(); ++i)
            for (std::size_t j = i + 1; j < oned.size(); ++j) {
                std::string nm = "bayes-proof[f1=" + oned[i].name + ",f2=" + oned[j].name + "]";
                add_sweep(nm, [&oned, i, j, ts, tol, nm]() {
                    SweepReport s =
                        bayesian_proof_sweep(oned[i].density, oned[j].density, 1.0, 1.0, ts, tol);
                    s.name = nm;
                    return s;
                });
            }
    }

    if (cfg.selected("gap-probe")) {
        add_sweep("gap-probe[family=symmetric-gmm]", []() {
            const DistributionSpec base = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
            SweepReport s = gaussianity_gap_probe(base, {0.0, 0.25, 0.5, 0.75, 1.0});
            s.name = "gap-probe[family=symmetric-gmm]";
            return s;
        });
    }

    if (cfg.selected("var-additivity") && !oned.empty()) {
        struct Case {
            std::size_t i1, i2;
            double a, b, t;
        };
        const auto cap = [&oned](std::size_t k) { return std::min(k, oned.size() - 1); };
        const std::vector<Case> cases{{cap(0), cap(0), 1.0, 1.0, 0.2},
                                      {cap(2), cap(3), 2.0, 1.0, 0.2},
                                      {cap(4), cap(2), 1.0, 1.0, 0.5}};
        for (const Case c : cases) {
            std::string nm = "var-additivity[f1=" + oned[c.i1].name + ",f2=" + oned[c.i2].name +
                             ",a=" + fmt_num(c.a) + ",b=" + fmt_num(c.b) + ",t=" + fmt_num(c.t) +
                             "]";
            add_check(nm, [&cfg, &oned, c, nm]() {
                const ChannelModel m = ChannelModel::bayesian(c.a, c.b, c.t);
                CheckResult r = var_additivity_mc_check(oned[c.i1].density, oned[c.i2].density, m,
                                                        cfg.mc_samples, cfg.mc_seed, cfg.threads);
                r.name = nm;
                return r;
            });
        }
    }

    // Execute. Tasks are pure; any scheduling yields the same results vector.
    struct Slot {
        CheckResult check;
        SweepReport sweep;
        double ms = 0.0;
    };
    std::vector<Slot> slots(tasks.size());
    const auto run_task = [&tasks, &slots](std::size_t idx) {
        const auto t0 = std::chrono::steady_clock::now();
        detail::Task& t = tasks[idx];
        try {
            if (t.is_sweep)
                slots[idx].sweep = t.run_sweep();
            else
                slots[idx].check = t.run_check();
        } catch (const Error& e) {
            if (t.is_sweep)
                slots[idx].sweep = detail::degenerate_sweep(t.name, e.what());
            else
                slots[idx].check = detail::degenerate_check(t.name, e.what());
        }
        slots[idx].ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    };
    if (cfg.threads <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int nt = std::min<int>(cfg.threads, static_cast<int>(tasks.size()));
        pool.reserve(static_cast<std::size_t>(nt));
        for (int w = 0; w < nt; ++w)
            pool.emplace_back([&next, &tasks, &run_task]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_task(i);
                }
            });
        for (auto& th : pool) th.join();
    }

    Verdict overall = Verdict::pass;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        rep.timings_ms.emplace_back(tasks[i].name, slots[i].ms);
        if (tasks[i].is_sweep) {
            overall = combine(overall, slots[i].sweep.verdict);
            rep.sweeps.push_back(std::move(slots[i].sweep));
        } else {
            overall = combine(overall, slots[i].check.verdict);
            rep.checks.push_back(std::move(slots[i].check));
        }
    }
    rep.overall = overall;
    return rep;
}

// Runs a single check family by restricting the selection.
inline RunReport run_single(RunConfig cfg, const std::string& check) {
    cfg.checks = {check};
    return run_suite(cfg);
}

}  // namespace gridinfo
