#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/harness.hpp"
#include "gridinfo/mutual_information.hpp"
#include "gridinfo/score.hpp"

using namespace gridinfo;

namespace {

GridDensity refined_default(const DistributionSpec& spec, int factor) {
    const GridSpec g = default_grid(spec);
    return materialize(spec, GridSpec(g.x_min, g.x_max, factor * (g.n_points - 1) + 1));
}

}  // namespace

TEST_CASE("Gaussian channel MI closed form", "[mi]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    for (double g : {0.1, 1.0, 3.0}) {
        const double mi = mi_additive(w, n, g);
        CHECK(mi == Catch::Approx(0.5 * std::log1p(g * g)).epsilon(1e-6));
    }
}

TEST_CASE("MI vanishes with the gain", "[mi]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    CHECK(mi_additive(w, n, 0.0) == 0.0);
    const double tiny = mi_additive(w, n, 1e-6);
    CHECK(tiny >= 0.0);
    CHECK(tiny < 1e-9);
}

TEST_CASE("MI against a refined oracle for mixture noise", "[mi]") {
    const DistributionSpec gmm = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const DistributionSpec gw = Gaussian{0.0, 1.0};
    const double mi = mi_additive(materialize(gw), materialize(gmm), 0.7);
    const double mi8 = mi_additive(refined_default(gw, 8), refined_default(gmm, 8), 0.7);
    CHECK(mi == Catch::Approx(mi8).epsilon(1e-5));
    CHECK(mi > 0.0);
}

TEST_CASE("MI is monotone in the gain", "[mi]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const DistributionSpec gmm = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    const GridDensity n = materialize(gmm);
    double prev = -1.0;
    for (double g : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        const double mi = mi_additive(w, n, g);
        CHECK(mi >= 0.0);
        CHECK(mi >= prev - 1e-8);
        prev = mi;
    }
}

TEST_CASE("De Bruijn sweep recovers Fisher information", "[debruijn]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const DistributionSpec gmm = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const GridDensity n = materialize(gmm);
    std::vector<double> ts;
    for (int k = 0; k < 7; ++k) ts.push_back(0.1 * std::pow(2.0, -k));
    const DeBruijnSweep sw = de_bruijn_sweep(w, n, 1.0, ts);
    const double jn = fisher_information(n);
    CHECK(sw.extrapolated_limit == Catch::Approx(jn).epsilon(0.01));
    CHECK(std::abs(sw.remainder_ratio.back()) < 0.005);  // smooth: o(t) residual
    for (std::size_t i = 0; i < sw.mi_values.size(); ++i) CHECK(sw.mi_values[i] >= 0.0);
}

TEST_CASE("De Bruijn sweep validates its t grid", "[debruijn]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    CHECK_THROWS_AS(de_bruijn_sweep(w, n, 1.0, {0.1, 0.05, 0.025}), TSweepTooShort);
    CHECK_THROWS_AS(de_bruijn_sweep(w, n, 1.0, {0.1, 0.2, 0.05, 0.025}), ValidationError);
    CHECK_THROWS_AS(de_bruijn_sweep(w, n, 1.0, {0.1, 0.05, 0.025, 1e-6}), ValidationError);
}

TEST_CASE("moment-matched non-Gaussian auxiliary input", "[mm]") {
    const MomentMatchedSpec mm = moment_matched_nongaussian();
    // analytic root of the fourth-moment equation at p=0.1, s^2=0.5
    const double u = (5.0 + std::sqrt(15.0)) / 4.0;
    CHECK(mm.p == Catch::Approx(0.1));
    CHECK(mm.s2 == Catch::Approx(0.5));
    CHECK(mm.mu == Catch::Approx(std::sqrt(u)).epsilon(1e-6));
    CHECK(mm.s0_sq == Catch::Approx((33.0 - std::sqrt(15.0)) / 36.0).epsilon(1e-6));

    const GridDensity f = materialize(DistributionSpec{mm.to_mixture()});
    CHECK(mean(f) == Catch::Approx(0.0).margin(1e-8));
    CHECK(variance(f) == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(moment(f, 3) == Catch::Approx(0.0).margin(1e-8));
    const GridDensity gauss =
        materialize(DistributionSpec{Gaussian{0.0, 1.0}}, f.grid);
    CHECK(l1_distance(f, gauss) == Catch::Approx(0.013745).margin(2e-6));
    CHECK(l1_distance(f, gauss) > 0.01);
}

TEST_CASE("fourth moment of the matched mixture", "[mm]") {
    const MomentMatchedSpec mm = moment_matched_nongaussian();
    const GridDensity f = materialize(DistributionSpec{mm.to_mixture()});
    CHECK(moment(f, 4) == Catch::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("pairwise MI bound with Gaussian closed forms", "[mi-pair]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n1 = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n2 = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const double t = 0.1;
    const CheckResult r = mi_pair_bound_check(w, n1, n2, 1.0, 1.0, t);
    CHECK(r.verdict == Verdict::pass);
    // I((a+b)sqrt(t)W; sum channel) = 0.5 ln(1 + 4t/2); each branch 0.5 ln(1 + t)
    CHECK(r.lhs == Catch::Approx(0.5 * std::log(1.2)).epsilon(1e-6));
    CHECK(r.rhs == Catch::Approx(std::log(1.1)).epsilon(1e-6));
}

TEST_CASE("pairwise MI bound degenerate weight", "[mi-pair]") {
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n1 = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity n2 = materialize(DistributionSpec{Gaussian{0.0, 0.5}},
                                       GridSpec(-12.0, 12.0, 1025));
    const CheckResult r = mi_pair_bound_check(w, n1, n2, 1.0, 0.0, 0.1);
    CHECK(r.verdict == Verdict::pass);
    // b = 0: lhs = I(sqrt(t)W; sqrt(t)W + N1 + N2), rhs = I over N1 alone
    CHECK(r.lhs == Catch::Approx(0.5 * std::log(1.0 + 0.1 / 1.5)).epsilon(1e-6));
    CHECK(r.rhs == Catch::Approx(0.5 * std::log(1.1)).epsilon(1e-6));
}

TEST_CASE("MI gap slope approaches the FII gap", "[mi-pair]") {
    const GridSpec shared(-16.970562748477143, 16.970562748477143, 1025);
    const DistributionSpec gmm = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const GridDensity n1 = materialize(DistributionSpec{Gaussian{0.0, 1.0}}, shared);
    const GridDensity n2 = materialize(gmm, shared);
    const GridDensity w = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const double t = 0.003125;
    const CheckResult r = mi_pair_bound_check(w, n1, n2, 1.0, 1.0, t);
    const CheckResult fii = fii_check(n1, n2, 1.0, 1.0);
    const double slope_gap = 2.0 * (r.rhs - r.lhs) / t;
    const double fii_gap = fii.rhs - fii.lhs;
    CHECK(slope_gap == Catch::Approx(fii_gap).epsilon(0.05));
}
