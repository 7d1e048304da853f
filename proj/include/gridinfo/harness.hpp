#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gridinfo/channel.hpp"
#include "gridinfo/check.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/extrapolate.hpp"
#include "gridinfo/joint.hpp"
#include "gridinfo/mutual_information.hpp"
#include "gridinfo/score.hpp"

namespace gridinfo {

// (a+b)^2 J(N1+N2) <= a^2 J(N1) + b^2 J(N2) for independent N1, N2.
inline CheckResult fii_check(const GridDensity& f1, const GridDensity& f2, double a, double b,
                             double tol = kDefaultInequalityTol) {
    if (!(a >= 0.0) || !(b >= 0.0) || (a == 0.0 && b == 0.0))
        throw ValidationError("fii_check: weights must be non-negative and not both zero");
    const double j1 = fisher_information(f1);
    const double j2 = fisher_information(f2);
    const double j12 = fisher_information(convolve(f1, f2));
    const double lhs = (a + b) * (a + b) * j12;
    const double rhs = a * a * j1 + b * b * j2;
    CheckResult r = inequality_check("fii", lhs, rhs, tol);
    r.diagnostics["fisher_1"] = j1;
    r.diagnostics["fisher_2"] = j2;
    r.diagnostics["fisher_sum"] = j12;
    r.diagnostics["a"] = a;
    r.diagnostics["b"] = b;
    r.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
    r.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
    return r;
}

// Stam form 1/J(N1) + 1/J(N2) <= 1/J(N1+N2); equivalent to the weighted form
// at the optimal weights a = 1/J(N1), b = 1/J(N2).
inline CheckResult stam_check(const GridDensity& f1, const GridDensity& f2,
                              double tol = kDefaultInequalityTol) {
    const double j1 = fisher_information(f1);
    const double j2 = fisher_information(f2);
    if (!(j1 > 0.0) || !(j2 > 0.0)) throw DegenerateDensity("stam_check: Fisher information must be positive");
    const double j12 = fisher_information(convolve(f1, f2));
    const double lhs = 1.0 / j1 + 1.0 / j2;
    const double rhs = 1.0 / j12;
    CheckResult r = inequality_check("stam", lhs, rhs, tol);
    // Weighted-form gap at the optimal weights, mapped onto the Stam scale:
    // stam_gap = fii_gap * j1 * j2 / ((j1 + j2) * j12).
    const double a = 1.0 / j1, b = 1.0 / j2;
    const double fii_gap = (a * a * j1 + b * b * j2) - (a + b) * (a + b) * j12;
    r.diagnostics["optimal_a"] = a;
    r.diagnostics["optimal_b"] = b;
    r.diagnostics["fisher_1"] = j1;
    r.diagnostics["fisher_2"] = j2;
    r.diagnostics["fisher_sum"] = j12;
    r.diagnostics["fii_gap_at_optimal"] = fii_gap;
    r.diagnostics["algebraic_consistency"] =
        std::abs(r.gap - fii_gap * j1 * j2 / ((j1 + j2) * j12));
    r.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
    r.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
    return r;
}

// Dependent-variable form: (a+b)^2 J(N1+N2) <= [a b] J(N1,N2) [a b]^t with
// the 2x2 Fisher matrix of the joint density.
inline CheckResult dependent_fii_check(const JointDensity2D& j, double a, double b,
                                       double tol = kDefaultInequalityTol) {
    if (!(a >= 0.0) || !(b >= 0.0) || (a == 0.0 && b == 0.0))
        throw ValidationError("dependent_fii_check: weights must be non-negative and not both zero");
    const FisherMatrix2 fm = fisher_matrix(j);
    const GridDensity fsum = sum_density_of_joint(j);
    const double lhs = (a + b) * (a + b) * fisher_information(fsum);
    const double rhs = fm.quad_form(a, b);
    CheckResult r = inequality_check("dependent-fii", lhs, rhs, tol);
    r.diagnostics["j11"] = fm.j11;
    r.diagnostics["j12"] = fm.j12;
    r.diagnostics["j22"] = fm.j22;
    r.diagnostics["min_eigenvalue"] = fm.min_eigenvalue();
    r.diagnostics["fisher_sum"] = lhs / ((a + b) * (a + b));
    r.diagnostics["a"] = a;
    r.diagnostics["b"] = b;
    r.diagnostics["n_points_1"] = static_cast<double>(j.grid1.n_points);
    r.diagnostics["n_points_2"] = static_cast<double>(j.grid2.n_points);
    return r;
}

namespace detail {

// Materialize `spec` scaled by `scale` exactly on a grid of step h (family
// closure under affine maps keeps the small-scale kernels exact).
inline GridDensity scaled_spec_on_step(const DistributionSpec& spec, double scale, double h) {
    const DistributionSpec s = affine_spec(spec, scale, 0.0);
    const double hw = default_half_width(s);
    const double c = mean_of(s);
    const double c0 = std::round(c / h) * h;
    const int half = std::max(16, static_cast<int>(std::ceil((hw + std::abs(c - c0)) / h)));
    const GridSpec g(c0 - half * h, c0 + half * h, 2 * half + 1);
    return materialize(s, g);
}

// I(W; scale*W + N) with the scaled W materialized exactly on fN's step.
// Refines fN first when the scaled W is too narrow for the step.
inline double mi_spec_kernel(const DistributionSpec& w_spec, const GridDensity& fN, double scale) {
    if (scale == 0.0) return 0.0;
    const double sigma_eff = scale * std::sqrt(variance_of(w_spec));
    const GridDensity fr = resolve_for_kernel(fN, sigma_eff);
    const GridDensity w = scaled_spec_on_step(w_spec, scale, fr.grid.step());
    const GridDensity fx = convolve(w, fr);
    double mi = differential_entropy(fx) - differential_entropy(fr);
    if (mi < 0.0 && mi > -1e-9) mi = 0.0;
    return mi;
}

inline void require_sweep(const std::vector<double>& ts, const char* who) {
    if (ts.size() < 4) throw TSweepTooShort(std::string(who) + ": need at least 4 t values");
    require_decreasing_sweep(ts);
    if (ts.back() < 1e-5)
        throw ValidationError(std::string(who) + ": t below 1e-5 drowns in quadrature error");
}

}  // namespace detail

// Communications model X_i = gain_i sqrt(t) W + N_i with one W in both
// observations: per-t mutual-information chain inequality, normalized by
// 2/t, and its t->0 limits against the score-pipeline Fisher quantities.
inline SweepReport communications_proof_sweep(const GridDensity& f1, const GridDensity& f2,
                                              double a, double b,
                                              const std::vector<double>& t_values,
                                              const DistributionSpec& w_spec = Gaussian{0.0, 1.0},
                                              double tol = kDefaultInequalityTol) {
    if (!(a >= 0.0) || !(b >= 0.0) || (a == 0.0 && b == 0.0))
        throw ValidationError("communications_proof_sweep: weights must be non-negative and not both zero");
    detail::require_sweep(t_values, "communications_proof_sweep");
    validate(w_spec);

    const GridDensity f12 = convolve(f1, f2);
    SweepReport rep;
    rep.name = "comm-proof";
    rep.parameter = "t";
    rep.values = t_values;
    std::vector<double> lhs_seq, rhs_seq;
    for (double t : t_values) {
        const double rt = std::sqrt(t);
        const double mi_sum = detail::mi_spec_kernel(w_spec, f12, (a + b) * rt);
        const double mi1 = (a > 0.0) ? detail::mi_spec_kernel(w_spec, f1, a * rt) : 0.0;
        const double mi2 = (b > 0.0) ? detail::mi_spec_kernel(w_spec, f2, b * rt) : 0.0;
        const double lhs = 2.0 * mi_sum / t;
        const double rhs = 2.0 * (mi1 + mi2) / t;
        CheckResult c = inequality_check("comm-proof", lhs, rhs, tol);
        c.diagnostics["t"] = t;
        c.diagnostics["mi_sum_channel"] = mi_sum;
        c.diagnostics["mi_1"] = mi1;
        c.diagnostics["mi_2"] = mi2;
        c.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
        c.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
        rep.results.push_back(std::move(c));
        lhs_seq.push_back(lhs);
        rhs_seq.push_back(rhs);
    }

    const double lhs_limit = aitken_limit(lhs_seq);
    const double rhs_limit = aitken_limit(rhs_seq);
    const double fii_lhs = (a + b) * (a + b) * fisher_information(f12);
    const double fii_rhs = a * a * fisher_information(f1) + b * b * fisher_information(f2);
    const double rel_lhs = std::abs(lhs_limit - fii_lhs) / fii_lhs;
    const double rel_rhs = std::abs(rhs_limit - fii_rhs) / fii_rhs;
    rep.limits["lhs_limit"] = lhs_limit;
    rep.limits["rhs_limit"] = rhs_limit;
    rep.limits["fii_lhs"] = fii_lhs;
    rep.limits["fii_rhs"] = fii_rhs;
    rep.limits["lhs_limit_rel_err"] = rel_lhs;
    rep.limits["rhs_limit_rel_err"] = rel_rhs;

    Verdict v = Verdict::pass;
    for (const auto& c : rep.results) v = combine(v, c.verdict);
    if (rel_lhs > kLimitRelTol || rel_rhs > kLimitRelTol) v = Verdict::fail;
    rep.verdict = v;
    return rep;
}

// Bayesian model X_i = N_i + Gaussian(0, gain_i t): the finite-t inequality
// (a+b)^2 J(X1+X2) <= a^2 J(X1) + b^2 J(X2) at every t, plus the t->0
// extrapolation of its gap against the unsmoothed weighted-form gap.
inline SweepReport bayesian_proof_sweep(const GridDensity& f1, const GridDensity& f2, double a,
                                        double b, const std::vector<double>& t_values,
                                        double tol = kDefaultInequalityTol) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ValidationError("bayesian_proof_sweep: weights must be positive");
    if (t_values.size() < 4) throw TSweepTooShort("bayesian_proof_sweep: need at least 4 t values");
    require_decreasing_sweep(t_values);

    const GridDensity f12 = convolve(f1, f2);
    SweepReport rep;
    rep.name = "bayes-proof";
    rep.parameter = "t";
    rep.values = t_values;
    std::vector<double> gap_seq;
    double prev_j1 = 0.0, prev_j2 = 0.0;
    bool monotone = true;
    for (std::size_t k = 0; k < t_values.size(); ++k) {
        const double t = t_values[k];
        const GridDensity x1 = convolve(f1, detail::gaussian_kernel_density(a * t, f1.grid.step()));
        const GridDensity x2 = convolve(f2, detail::gaussian_kernel_density(b * t, f2.grid.step()));
        const GridDensity x12 =
            convolve(f12, detail::gaussian_kernel_density((a + b) * t, f12.grid.step()));
        const double j1 = fisher_information(x1);
        const double j2 = fisher_information(x2);
        const double j12 = fisher_information(x12);
        const double lhs = (a + b) * (a + b) * j12;
        const double rhs = a * a * j1 + b * b * j2;
        CheckResult c = inequality_check("bayes-proof", lhs, rhs, tol);
        c.diagnostics["t"] = t;
        c.diagnostics["fisher_x1"] = j1;
        c.diagnostics["fisher_x2"] = j2;
        c.diagnostics["fisher_x12"] = j12;
        c.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
        c.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
        rep.results.push_back(std::move(c));
        gap_seq.push_back(rhs - lhs);
        // smoothing destroys Fisher information, so J(X_i) grows as t drops
        if (k > 0 && (j1 < prev_j1 - 1e-8 || j2 < prev_j2 - 1e-8)) monotone = false;
        prev_j1 = j1;
        prev_j2 = j2;
    }

    const double gap_limit = aitken_limit(gap_seq);
    const CheckResult fii = fii_check(f1, f2, a, b, tol);
    const double diff = std::abs(gap_limit - fii.gap);
    rep.limits["gap_limit"] = gap_limit;
    rep.limits["fii_gap"] = fii.gap;
    rep.limits["gap_limit_abs_err"] = diff;
    rep.limits["fisher_monotone_in_t"] = monotone ? 1.0 : 0.0;

    Verdict v = Verdict::pass;
    for (const auto& c : rep.results) v = combine(v, c.verdict);
    if (diff > std::max(kLimitRelTol * std::abs(fii.gap), kDefaultInequalityTol)) v = Verdict::fail;
    if (!monotone) v = Verdict::fail;
    rep.verdict = v;
    return rep;
}

// Stam gap as a function of the mixture separation: scale all component
// means of a GMM family by epsilon; the gap must vanish at epsilon = 0 and
// grow monotonically away from it (numerical evidence for the equality
// condition, not a proof).
inline SweepReport gaussianity_gap_probe(const DistributionSpec& spec,
                                         const std::vector<double>& epsilon_values) {
    if (!std::holds_alternative<GaussianMixture>(spec))
        throw ValidationError("gaussianity_gap_probe: spec must be a Gaussian mixture family");
    if (epsilon_values.empty()) throw ValidationError("gaussianity_gap_probe: empty epsilon list");
    const GaussianMixture base = std::get<GaussianMixture>(spec);

    const auto family_at = [&](double eps) {
        GaussianMixture m = base;
        for (auto& c : m.components) c.mean *= eps;
        return m;
    };
    // One shared grid so gaps are comparable across epsilon, sized by the
    // component envelope (12 sigma past each component of every member); the
    // total-variance rule would over-widen it and starve the narrowest
    // member's valid-score region.
    const double eps_max = *std::max_element(epsilon_values.begin(), epsilon_values.end());
    const double center = mean_of(DistributionSpec{family_at(eps_max)});
    double hw = 0.0;
    for (double eps : epsilon_values) {
        const GaussianMixture m = family_at(eps);
        hw = std::max(hw, 10.0 * std::sqrt(variance_of(DistributionSpec{m})));
        for (const auto& c : m.components)
            hw = std::max(hw, std::abs(c.mean - center) + 12.0 * std::sqrt(c.variance));
    }
    const GridSpec grid(center - hw, center + hw, kDefaultNPoints);

    SweepReport rep;
    rep.name = "gap-probe";
    rep.parameter = "epsilon";
    rep.values = epsilon_values;
    std::vector<double> gaps;
    for (double eps : epsilon_values) {
        const GridDensity f = materialize(DistributionSpec{family_at(eps)}, grid);
        CheckResult c = stam_check(f, f);
        c.name = "gap-probe";
        c.diagnostics["epsilon"] = eps;
        gaps.push_back(c.gap);
        rep.results.push_back(std::move(c));
    }

    bool nondecreasing = true;
    std::vector<std::size_t> order(epsilon_values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return epsilon_values[u] < epsilon_values[v]; });
    for (std::size_t k = 1; k < order.size(); ++k)
        if (gaps[order[k]] < gaps[order[k - 1]] - 1e-6) nondecreasing = false;

    rep.limits["gap_at_min_epsilon"] = gaps[order.front()];
    rep.limits["gap_at_max_epsilon"] = gaps[order.back()];
    rep.limits["nondecreasing"] = nondecreasing ? 1.0 : 0.0;

    Verdict v = Verdict::pass;
    for (const auto& c : rep.results) v = combine(v, c.verdict);
    if (!nondecreasing) v = Verdict::fail;
    if (epsilon_values[order.front()] == 0.0 && gaps[order.front()] >= 1e-5) v = Verdict::fail;
    rep.verdict = v;
    return rep;
}

}  // namespace gridinfo
