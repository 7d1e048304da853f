#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gridinfo/channel.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/score.hpp"

using namespace gridinfo;

namespace {

constexpr double kPi = 3.14159265358979323846;

double gauss_pdf(double x, double mu, double var) {
    return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2.0 * kPi * var);
}

}  // namespace

TEST_CASE("channel model validation", "[channel]") {
    CHECK_NOTHROW(ChannelModel::bayesian(1.0, 2.0, 0.1).validate());
    CHECK_NOTHROW(ChannelModel::communications(1.0, 1.0, 0.1, 1.0, 2.0).validate());
    CHECK_THROWS_AS(ChannelModel::bayesian(1.0, 1.0, 0.0).validate(), ValidationError);
    ChannelModel m = ChannelModel::bayesian(1.0, 1.0, 0.1);
    m.noise_variance_1 = 0.05;  // breaks nv = gain * t
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("Gaussian posterior closed form", "[posterior]") {
    // N ~ N(0,1), W ~ N(0,1): E[N|X=x] = x/2, VAR = 1/2.
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const PosteriorField p = posterior(f, 1.0);
    double sup_mean = 0.0, sup_var = 0.0;
    for (std::size_t i = 0; i < p.mean.size(); ++i) {
        // pointwise closed forms only bind where the observation density is
        // representable; below that the ratio is ill-conditioned by design
        if (!p.valid[i] || p.fx.values[i] < 1e-7) continue;
        const double x = p.grid.x(static_cast<int>(i));
        sup_mean = std::max(sup_mean, std::abs(p.mean[i] - 0.5 * x));
        sup_var = std::max(sup_var, std::abs(p.var[i] - 0.5));
    }
    CHECK(sup_mean < 1e-6);
    CHECK(sup_var < 1e-6);
}

TEST_CASE("posterior variance is non-negative and law of total expectation holds", "[posterior]") {
    const DistributionSpec spec = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    const GridDensity f = materialize(spec);
    const PosteriorField p = posterior(f, 0.5);
    double emean = 0.0;
    std::vector<double> integrand(p.mean.size(), 0.0);
    for (std::size_t i = 0; i < p.mean.size(); ++i) {
        CHECK(p.var[i] >= 0.0);
        if (p.valid[i]) integrand[i] = p.mean[i] * p.fx.values[i];
    }
    emean = simpson_masked(integrand, p.valid, p.grid.step());
    CHECK(emean == Catch::Approx(mean_of(spec)).margin(1e-5));
}

TEST_CASE("two-component mixture posterior against the analytic mixture form", "[posterior]") {
    const std::vector<GmmComponent> comps{{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}};
    const DistributionSpec spec = GaussianMixture{{comps}};
    const double s2 = 1.0;
    const GridDensity f = materialize(spec);
    const PosteriorField p = posterior(f, s2);
    double sup_mean = 0.0, sup_var = 0.0;
    for (std::size_t i = 0; i < p.mean.size(); ++i) {
        if (!p.valid[i] || p.fx.values[i] < 1e-8) continue;
        const double x = p.grid.x(static_cast<int>(i));
        double den = 0.0, m1 = 0.0, m2 = 0.0;
        for (const auto& c : comps) {
            const double wt = c.weight * gauss_pdf(x, c.mean, c.variance + s2);
            const double mi = (c.variance * x + s2 * c.mean) / (c.variance + s2);
            const double vi = c.variance * s2 / (c.variance + s2);
            den += wt;
            m1 += wt * mi;
            m2 += wt * (vi + mi * mi);
        }
        m1 /= den;
        m2 /= den;
        sup_mean = std::max(sup_mean, std::abs(p.mean[i] - m1) / std::max(1.0, std::abs(m1)));
        sup_var = std::max(sup_var, std::abs(p.var[i] - (m2 - m1 * m1)) / (m2 - m1 * m1));
    }
    CHECK(sup_mean < 1e-5);
    CHECK(sup_var < 1e-5);
}

TEST_CASE("conditional variance harmonic rule for Gaussians", "[posterior]") {
    for (double s2 : {0.25, 1.0, 2.0}) {
        const double prior_var = 0.5;
        const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, prior_var}});
        const double cv = conditional_variance(f, s2).cond_var;
        CHECK(cv == Catch::Approx(prior_var * s2 / (prior_var + s2)).epsilon(1e-6));
    }
}

TEST_CASE("conditional variance vanishes with the noise", "[posterior]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    CHECK(conditional_variance(f, 1e-8).cond_var < 1e-6);
}

TEST_CASE("MMSE bounds and monotonicity in the noise variance", "[posterior]") {
    const DistributionSpec spec = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const GridDensity f = materialize(spec);
    const double prior_var = variance_of(spec);
    double prev = 0.0;
    for (double s2 : {0.1, 0.25, 0.5, 1.0, 2.0}) {
        const double cv = conditional_variance(f, s2).cond_var;
        CHECK(cv >= 0.0);
        CHECK(cv <= prior_var * (1.0 + 1e-8));
        // harmonic Gaussian bound: non-Gaussian prior estimates at least as well
        CHECK(cv <= prior_var * s2 / (prior_var + s2) + 1e-8);
        CHECK(cv >= prev - 1e-8);  // nondecreasing in s2
        prev = cv;
    }
}

TEST_CASE("Gaussian prior saturates the MMSE bound", "[posterior]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.5}});
    const double s2 = 0.7;
    const double cv = conditional_variance(f, s2).cond_var;
    CHECK(cv == Catch::Approx(1.5 * s2 / (1.5 + s2)).margin(1e-6));
}

TEST_CASE("information-MMSE identity residuals", "[lemma1]") {
    // Gaussian closed form: J(N+W) = 1/(v + s2), MMSE side agrees to quadrature error
    for (double v : {0.25, 1.0, 4.0})
        CHECK(lemma1_residual(materialize(DistributionSpec{Gaussian{0.0, v}}), 1.0) < 1e-5);
    // explicit value: N ~ N(0,4), s2 = 2 -> J(X) = 1/6
    const GridDensity f4 = materialize(DistributionSpec{Gaussian{0.0, 4.0}});
    const GridDensity fr = detail::resolve_for_kernel(f4, std::sqrt(2.0));
    const GridDensity fx = convolve(fr, detail::gaussian_kernel_density(2.0, fr.grid.step()));
    CHECK(fisher_information(fx) == Catch::Approx(1.0 / 6.0).epsilon(1e-6));
    CHECK(lemma1_residual(f4, 2.0) < 1e-5);

    const DistributionSpec gmm = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    CHECK(lemma1_residual(materialize(gmm), 0.5) < 1e-4);
}

TEST_CASE("score-MMSE identity", "[lemma1]") {
    CHECK(score_mmse_identity_residual(materialize(DistributionSpec{Gaussian{0.0, 1.0}}), 0.5) <
          1e-5);
    const DistributionSpec gmm = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    CHECK(score_mmse_identity_residual(materialize(gmm), 0.5) < 1e-4);
}

TEST_CASE("estimation-error orthogonality", "[lemma1]") {
    CHECK(orthogonality_residual(materialize(DistributionSpec{Gaussian{0.0, 1.0}}), 1.0) < 1e-6);
    const DistributionSpec gmm = GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const GridDensity f = materialize(gmm);
    const double r = orthogonality_residual(f, 0.25);
    CHECK(r < 1e-5);
    // oracle: the residual is pure quadrature noise, so refining 4x must not
    // reveal a hidden bias
    const GridSpec g = default_grid(gmm);
    const GridDensity f4 =
        materialize(gmm, GridSpec(g.x_min, g.x_max, 4 * (g.n_points - 1) + 1));
    CHECK(orthogonality_residual(f4, 0.25) < 1e-5);
}

TEST_CASE("orthogonality across the 1-D catalog", "[lemma1]") {
    const std::vector<DistributionSpec> catalog{
        Gaussian{0.0, 1.0}, Gaussian{0.5, 0.5},
        GaussianMixture{{{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}}},
        GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}}};
    for (const auto& spec : catalog)
        CHECK(orthogonality_residual(materialize(spec), 1.0) < 1e-5);
    const GridDensity lap =
        materialize(DistributionSpec{Laplace{0.0, 1.0}}, GridSpec(-31.2448, 31.2448, 8193));
    CHECK(orthogonality_residual(lap, 1.0) < 1e-5);
}

TEST_CASE("Bayesian variance identity", "[channel]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    // a=1, t=0.1: cond_var = s2 - s2^2 J(X) with X = N + sqrt(t) W
    CheckResult r = bayesian_var_identities(f, 1.0, 0.1, 1e-6);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.lhs == Catch::Approx(0.1 - 0.01 / 1.1).margin(1e-6));

    CheckResult tiny = bayesian_var_identities(f, 1.0, 1e-6, 1e-8);
    CHECK(tiny.verdict == Verdict::pass);

    const DistributionSpec gmm = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    CheckResult g = bayesian_var_identities(materialize(gmm), 2.0, 0.05, 1e-4);
    CHECK(g.verdict == Verdict::pass);
    CHECK(g.gap < 1e-4);
}
