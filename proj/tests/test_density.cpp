#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"

using namespace gridinfo;

namespace {

constexpr double kPi = 3.14159265358979323846;

double gauss_pdf(double x, double mu, double var) {
    return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2.0 * kPi * var);
}

}  // namespace

TEST_CASE("spec validation rejects bad parameters", "[distribution]") {
    CHECK_THROWS_AS(validate(DistributionSpec{Gaussian{0.0, -1.0}}), ValidationError);
    CHECK_THROWS_AS(validate(DistributionSpec{Laplace{0.0, 0.0}}), ValidationError);
    CHECK_THROWS_AS(
        validate(DistributionSpec{GaussianMixture{{{0.6, 0.0, 1.0}, {0.6, 1.0, 1.0}}}}),
        ValidationError);  // weights sum to 1.2
    CHECK_THROWS_AS(validate(DistributionSpec{Gaussian2D{{0.0, 0.0}, {1.0, 2.0, 2.0, 1.0}}}),
                    ValidationError);  // not positive definite
    CHECK_NOTHROW(validate(DistributionSpec{Gaussian{0.0, 1.0}}));
}

TEST_CASE("spec moments", "[distribution]") {
    const DistributionSpec gmm = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    const double mu = 0.3 * -1.5 + 0.7 * 0.8;
    CHECK(mean_of(gmm) == Catch::Approx(mu));
    const double var =
        0.3 * (0.7 + 1.5 * 1.5) + 0.7 * (1.1 + 0.8 * 0.8) - mu * mu;
    CHECK(variance_of(gmm) == Catch::Approx(var));
    CHECK(variance_of(DistributionSpec{Laplace{0.0, 1.0}}) == Catch::Approx(2.0));
}

TEST_CASE("materialize normalizes to unit mass", "[density]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    std::vector<double> v = f.values;
    CHECK(simpson(v, f.step()) == Catch::Approx(1.0).margin(1e-12));
    CHECK(mean(f) == Catch::Approx(0.0).margin(1e-9));
    CHECK(variance(f) == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("materialize rejects grids that clip the density", "[density]") {
    CHECK_THROWS_AS(materialize(DistributionSpec{Gaussian{0.0, 1.0}}, GridSpec(-3.0, 3.0, 101)),
                    SupportTooNarrow);
}

TEST_CASE("density moments match the spec for mixtures", "[density]") {
    const DistributionSpec spec = GaussianMixture{{{0.3, -1.5, 0.7}, {0.7, 0.8, 1.1}}};
    const GridDensity f = materialize(spec);
    CHECK(mean(f) == Catch::Approx(mean_of(spec)).margin(1e-8));
    CHECK(variance(f) == Catch::Approx(variance_of(spec)).epsilon(1e-8));
    CHECK(moment(f, 3) != 0.0);  // asymmetric mixture
}

TEST_CASE("convolution of Gaussians is Gaussian with summed moments", "[density]") {
    // Equal steps (same span and n) so the pair is commensurate.
    const GridSpec g1(0.5 - 12.0, 0.5 + 12.0, 1025);
    const GridSpec g2(-0.25 - 12.0, -0.25 + 12.0, 1025);
    const GridDensity a = materialize(DistributionSpec{Gaussian{0.5, 1.0}}, g1);
    const GridDensity b = materialize(DistributionSpec{Gaussian{-0.25, 0.5}}, g2);
    const GridDensity c = convolve(a, b);
    CHECK(mean(c) == Catch::Approx(0.25).margin(1e-8));
    CHECK(variance(c) == Catch::Approx(1.5).epsilon(1e-8));
    // pointwise against the analytic N(0.25, 1.5)
    double sup = 0.0;
    for (int i = 0; i < c.n(); ++i)
        sup = std::max(sup, std::abs(c.values[i] - gauss_pdf(c.grid.x(i), 0.25, 1.5)));
    CHECK(sup < 1e-8);
}

TEST_CASE("convolve requires commensurate grids", "[density]") {
    const GridDensity a = materialize(DistributionSpec{Gaussian{0.0, 1.0}},
                                      GridSpec(-12.0, 12.0, 1025));
    const GridDensity b = materialize(DistributionSpec{Gaussian{0.0, 1.0}},
                                      GridSpec(-12.0, 12.0, 1027));
    CHECK_THROWS_AS(convolve(a, b), GridMismatch);
}

TEST_CASE("affine push rescales support and moments", "[density]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}});
    const GridDensity g = affine_push(f, 2.0, 1.0);  // 2X + 1
    CHECK(mean(g) == Catch::Approx(1.0).margin(1e-8));
    CHECK(variance(g) == Catch::Approx(4.0).epsilon(1e-8));
    CHECK(g.step() == Catch::Approx(2.0 * f.step()));
    CHECK_THROWS_AS(affine_push(f, 0.0, 0.0), ZeroScale);
}

TEST_CASE("differential entropy closed forms", "[density]") {
    const GridDensity g = materialize(DistributionSpec{Gaussian{0.0, 2.0}});
    CHECK(differential_entropy(g) ==
          Catch::Approx(0.5 * std::log(2.0 * kPi * std::exp(1.0) * 2.0)).epsilon(1e-8));
    const GridDensity l =
        materialize(DistributionSpec{Laplace{0.0, 1.0}}, GridSpec(-31.2448, 31.2448, 8193));
    CHECK(differential_entropy(l) == Catch::Approx(1.0 + std::log(2.0)).epsilon(1e-5));
}

TEST_CASE("l1 distance between known densities", "[density]") {
    const GridSpec g(-14.0, 14.0, 1401);
    const GridDensity a = materialize(DistributionSpec{Gaussian{0.0, 1.0}}, g);
    const GridDensity b = materialize(DistributionSpec{Gaussian{0.0, 1.0}}, g);
    CHECK(l1_distance(a, b) == Catch::Approx(0.0).margin(1e-14));
    // L1 between N(0,1) and N(1,1) = 2*(2*Phi(1/2)-1) = 2*erf(1/(2*sqrt 2))
    const GridDensity c = materialize(DistributionSpec{Gaussian{1.0, 1.0}},
                                      GridSpec(-13.0, 15.0, 1401));
    const GridDensity c_on_g = regrid(c, g);
    // |a - c| has a kink at x = 1/2, so Simpson converges at reduced order
    CHECK(l1_distance(a, c_on_g) ==
          Catch::Approx(2.0 * std::erf(0.5 / std::sqrt(2.0))).epsilon(2e-4));
}

TEST_CASE("quintic regrid reproduces smooth densities", "[density]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}},
                                      GridSpec(-12.0, 12.0, 1025));
    const GridDensity r = regrid(f, GridSpec(-10.0, 10.0, 777));
    double sup = 0.0;
    for (int i = 0; i < r.n(); ++i)
        sup = std::max(sup, std::abs(r.values[i] - gauss_pdf(r.grid.x(i), 0.0, 1.0)));
    CHECK(sup < 1e-9);
}

TEST_CASE("refine keeps the density and halves the step", "[density]") {
    const GridDensity f = materialize(DistributionSpec{Gaussian{0.0, 1.0}},
                                      GridSpec(-12.0, 12.0, 513));
    const GridDensity r = refine(f, 2);
    CHECK(r.grid.n_points == 1025);
    CHECK(r.step() == Catch::Approx(0.5 * f.step()));
    CHECK(variance(r) == Catch::Approx(1.0).epsilon(1e-8));
}
