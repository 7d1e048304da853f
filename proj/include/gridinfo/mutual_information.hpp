#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gridinfo/channel.hpp"
#include "gridinfo/check.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/extrapolate.hpp"
#include "gridinfo/score.hpp"

namespace gridinfo {

namespace detail {

// Interpolate f onto a grid with the given step covering the same span.
// The source grid is at least as fine as its own features, so quintic
// interpolation keeps full accuracy regardless of the target step.
inline GridDensity regrid_to_step(const GridDensity& f, double h) {
    const double c = 0.5 * (f.grid.x_min + f.grid.x_max);
    const int half = std::max(16, static_cast<int>(std::ceil(0.5 * (f.grid.x_max - f.grid.x_min) / h)) + 2);
    const GridSpec g(c - half * h, c + half * h, 2 * half + 1);
    return regrid(f, g);
}

}  // namespace detail

// I(W; X) in nats for X = gain*W + N, computed as h(X) - h(N); valid since
// X|W=w is a translate of N. The observation grid is refined automatically
// when the scaled input is too narrow for the noise grid to resolve; below
// the refinement cap a quadratic-in-gain estimate stands in, provided the
// estimate itself is negligible.
inline double mi_additive(const GridDensity& fW, const GridDensity& fN, double gain) {
    if (!(gain >= 0.0)) throw ValidationError("mi_additive: gain must be non-negative");
    if (gain == 0.0) return 0.0;
    const double var_w = variance(fW);
    const double sigma_eff = gain * std::sqrt(std::max(var_w, 0.0));
    const double h = fN.grid.step();
    if (!(sigma_eff > 0.0) ||
        sigma_eff < detail::kKernelResolveRatio * h / detail::kMaxRefineFactor) {
        const double est = 0.5 * gain * gain * var_w * fisher_information(fN);
        if (est < 1e-10) return std::max(est, 0.0);
        throw DegenerateDensity("mi_additive: scaled input unresolvable at any affordable grid refinement");
    }
    const GridDensity fr = detail::resolve_for_kernel(fN, sigma_eff);
    const GridDensity scaled = detail::regrid_to_step(affine_push(fW, gain, 0.0), fr.grid.step());
    const GridDensity fx = convolve(scaled, fr);
    double mi = differential_entropy(fx) - differential_entropy(fr);
    if (mi < 0.0 && mi > -1e-9) mi = 0.0;
    return mi;
}

struct DeBruijnSweep {
    std::vector<double> t_values;        // strictly decreasing
    std::vector<double> mi_values;       // nats
    std::vector<double> slope_estimates; // 2 I / (gain^2 t)
    double extrapolated_limit = 0.0;
    std::vector<double> remainder_ratio; // (slope - limit) / limit per t
};

// Small-t expansion I(W; gain sqrt(t) W + N) = (gain^2 t / 2) J(N) + o(t):
// sweeps t, forms the normalized slopes, and extrapolates t -> 0 by Aitken's
// delta-squared on the last three points (Richardson with estimated ratio).
inline DeBruijnSweep de_bruijn_sweep(const GridDensity& fW, const GridDensity& fN, double gain,
                                     const std::vector<double>& t_values) {
    if (t_values.size() < 4) throw TSweepTooShort("de_bruijn_sweep: need at least 4 t values");
    require_decreasing_sweep(t_values);
    if (t_values.back() < 1e-5)
        throw ValidationError("de_bruijn_sweep: t below 1e-5 drowns in quadrature error");
    if (!(gain >= 0.0)) throw ValidationError("de_bruijn_sweep: gain must be non-negative");

    DeBruijnSweep out;
    out.t_values = t_values;
    for (double t : t_values) {
        const double mi = mi_additive(fW, fN, gain * std::sqrt(t));
        out.mi_values.push_back(mi);
        out.slope_estimates.push_back(gain > 0.0 ? 2.0 * mi / (gain * gain * t) : 0.0);
    }
    out.extrapolated_limit = (gain > 0.0) ? aitken_limit(out.slope_estimates) : 0.0;
    for (double s : out.slope_estimates)
        out.remainder_ratio.push_back(
            out.extrapolated_limit != 0.0 ? (s - out.extrapolated_limit) / out.extrapolated_limit
                                          : 0.0);
    return out;
}

// Symmetric three-component mixture p/2 N(-mu,s2) + (1-p) N(0,s0_sq) +
// p/2 N(mu,s2) whose first four moments match the standard Gaussian's
// (0, 1, 0, 3) while staying visibly non-Gaussian in L1.
struct MomentMatchedSpec {
    double p = 0.0;
    double mu = 0.0;
    double s2 = 0.0;
    double s0_sq = 0.0;

    GaussianMixture to_mixture() const {
        return GaussianMixture{{GmmComponent{0.5 * p, -mu, s2},
                                GmmComponent{1.0 - p, 0.0, s0_sq},
                                GmmComponent{0.5 * p, mu, s2}}};
    }
};

// Solves the second/fourth moment equations for the family with p = 0.1 and
// s2 = 0.5 fixed. Substituting s0_sq(u) from the second-moment equation turns
// the fourth-moment equation into a one-variable residual in u = mu^2 with
// two positive roots; the smaller one is nearly Gaussian in L1 and would
// violate the non-Gaussianity requirement, so the root in [1, 1/p - s2] is
// the one returned.
inline MomentMatchedSpec moment_matched_nongaussian() {
    constexpr double p = 0.1;
    constexpr double s2 = 0.5;
    const auto s0_of = [&](double u) { return (1.0 - p * (u + s2)) / (1.0 - p); };
    const auto residual = [&](double u) {
        const double s0 = s0_of(u);
        return p * (u * u + 6.0 * u * s2 + 3.0 * s2 * s2) + 3.0 * (1.0 - p) * s0 * s0 - 3.0;
    };
    double lo = 1.0, hi = 1.0 / p - s2;
    double flo = residual(lo);
    if (!(flo < 0.0) || !(residual(hi) > 0.0))
        throw SolverFailed("moment_matched_nongaussian: bisection bracket lost");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double u = 0.5 * (lo + hi);
    MomentMatchedSpec spec{p, std::sqrt(u), s2, s0_of(u)};

    // Assert the defining invariants on a materialized copy.
    const GridDensity f = materialize(DistributionSpec{spec.to_mixture()});
    const double m1 = moment(f, 1);
    const double m2 = moment(f, 2);
    const double m3 = moment(f, 3);
    const double m4 = moment(f, 4);
    if (std::abs(m1) > 1e-6 || std::abs(m2 - 1.0) > 1e-6 || std::abs(m3) > 1e-6 ||
        std::abs(m4 - 3.0) > 1e-6)
        throw SolverFailed("moment_matched_nongaussian: moment equations not satisfied");
    const GridDensity g = materialize(DistributionSpec{Gaussian{0.0, 1.0}}, f.grid);
    if (!(l1_distance(f, g) > 0.01))
        throw SolverFailed("moment_matched_nongaussian: solution indistinguishable from Gaussian");
    return spec;
}

// I(W; X1+X2) <= I(W;X1) + I(W;X2) for X_i = gain_i sqrt(t) W + N_i with the
// same W in both observations.
inline CheckResult mi_pair_bound_check(const GridDensity& fW, const GridDensity& f1,
                                       const GridDensity& f2, double a, double b, double t,
                                       double tol = 1e-8) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw ValidationError("mi_pair_bound_check: gains must be non-negative");
    if (!(t > 0.0)) throw ValidationError("mi_pair_bound_check: t must be positive");
    const double rt = std::sqrt(t);
    const GridDensity fsum = convolve(f1, f2);
    const double lhs = mi_additive(fW, fsum, (a + b) * rt);
    const double mi1 = mi_additive(fW, f1, a * rt);
    const double mi2 = mi_additive(fW, f2, b * rt);
    CheckResult r = inequality_check("mi-pair-bound", lhs, mi1 + mi2, tol);
    r.diagnostics["mi_sum_channel"] = lhs;
    r.diagnostics["mi_1"] = mi1;
    r.diagnostics["mi_2"] = mi2;
    r.diagnostics["a"] = a;
    r.diagnostics["b"] = b;
    r.diagnostics["t"] = t;
    r.diagnostics["gap_slope"] = 2.0 * (mi1 + mi2 - lhs) / t;
    r.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
    r.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
    return r;
}

}  // namespace gridinfo
