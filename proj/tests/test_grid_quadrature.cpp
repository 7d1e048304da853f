#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gridinfo/errors.hpp"
#include "gridinfo/extrapolate.hpp"
#include "gridinfo/fft.hpp"
#include "gridinfo/grid.hpp"
#include "gridinfo/quadrature.hpp"

using namespace gridinfo;

TEST_CASE("GridSpec basics", "[grid]") {
    const GridSpec g(-2.0, 2.0, 41);
    CHECK(g.step() == Catch::Approx(0.1));
    CHECK(g.x(0) == Catch::Approx(-2.0));
    CHECK(g.x(40) == Catch::Approx(2.0));
    CHECK(g.size() == 41);

    CHECK_THROWS_AS(GridSpec(1.0, -1.0, 41), ValidationError);   // inverted
    CHECK_THROWS_AS(GridSpec(-1.0, 1.0, 40), ValidationError);   // even n
    CHECK_THROWS_AS(GridSpec(-1.0, 1.0, 31), ValidationError);   // too few points
}

TEST_CASE("commensurate steps and convolution grid", "[grid]") {
    const GridSpec a(-2.0, 2.0, 41);
    const GridSpec b(-1.6, 1.6, 33);       // same step 0.1
    const GridSpec c(-1.0, 1.0, 41);       // step 0.05
    CHECK(steps_commensurate(a, b));
    CHECK_FALSE(steps_commensurate(a, c));
    CHECK_THROWS_AS(require_commensurate(a, c, "test"), GridMismatch);

    const GridSpec conv = convolution_grid(a, b);
    CHECK(conv.x_min == Catch::Approx(-3.6));
    CHECK(conv.x_max == Catch::Approx(3.6));
    CHECK(conv.n_points == 73);  // n_a + n_b - 1
}

TEST_CASE("kernel grid is symmetric and respects minimum size", "[grid]") {
    const GridSpec k = kernel_grid(3.0, 0.1);
    CHECK(k.x_min == Catch::Approx(-k.x_max));
    CHECK(k.n_points == 61);
    CHECK(k.step() == Catch::Approx(0.1));

    // Tiny half-width still yields at least 16 half-points.
    const GridSpec tiny = kernel_grid(0.05, 0.1);
    CHECK(tiny.n_points == 33);
}

TEST_CASE("Simpson weights sum to interval length", "[quadrature]") {
    const auto w = simpson_weights(9);
    double s = 0.0;
    for (double x : w) s += x;
    CHECK(s == Catch::Approx(8.0));  // (n-1) cells of unit width
}

TEST_CASE("Simpson integrates low-order polynomials exactly", "[quadrature]") {
    const int n = 101;
    const double h = 0.01;
    std::vector<double> cubic(n);
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        cubic[i] = x * x * x - 2.0 * x;
    }
    // integral of x^3 - 2x over [0,1] = 1/4 - 1 = -3/4
    CHECK(simpson(cubic, h) == Catch::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("Simpson converges at fourth order on smooth integrands", "[quadrature]") {
    const auto integrate_sin = [](int n) {
        const double h = 1.0 / (n - 1);
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = std::sin(i * h);
        return simpson(f, h);
    };
    const double exact = 1.0 - std::cos(1.0);
    const double e1 = std::abs(integrate_sin(65) - exact);
    const double e2 = std::abs(integrate_sin(129) - exact);
    CHECK(e2 < e1 / 12.0);  // ~16x drop expected at 4th order
}

TEST_CASE("masked Simpson matches plain Simpson on a full mask", "[quadrature]") {
    const int n = 65;
    const double h = 0.05;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::exp(-i * h);
    const std::vector<char> full(n, 1);
    CHECK(simpson_masked(f, full, h) == Catch::Approx(simpson(f, h)));

    // Zeroed tail: masked integral only covers the live region.
    std::vector<char> mask(n, 1);
    for (int i = 40; i < n; ++i) mask[i] = 0;
    std::vector<double> g = f;
    for (int i = 40; i < n; ++i) g[i] = 0.0;
    CHECK(simpson_masked(f, mask, h) == Catch::Approx(simpson_masked(g, mask, h)));
}

TEST_CASE("linear convolution of small sequences", "[fft]") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{4.0, 5.0};
    const std::vector<double> c = linear_convolve(a, b);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == Catch::Approx(4.0));
    CHECK(c[1] == Catch::Approx(13.0));
    CHECK(c[2] == Catch::Approx(22.0));
    CHECK(c[3] == Catch::Approx(15.0));
}

TEST_CASE("linear convolution matches direct sum on random data", "[fft]") {
    std::vector<double> a(57), b(101);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sin(0.37 * static_cast<double>(i));
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::cos(0.11 * static_cast<double>(i));
    const std::vector<double> fast = linear_convolve(a, b);
    REQUIRE(fast.size() == a.size() + b.size() - 1);
    for (std::size_t k = 0; k < fast.size(); k += 13) {
        double direct = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (k >= i && k - i < b.size()) direct += a[i] * b[k - i];
        CHECK(fast[k] == Catch::Approx(direct).margin(1e-10));
    }
}

TEST_CASE("Aitken extrapolation accelerates geometric sequences", "[extrapolate]") {
    // s_k = L + c r^k converges to L exactly under Aitken.
    std::vector<double> seq;
    for (int k = 0; k < 6; ++k) seq.push_back(2.0 + 0.3 * std::pow(0.5, k));
    CHECK(aitken_limit(seq) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("sweep validation", "[extrapolate]") {
    CHECK_NOTHROW(require_decreasing_sweep({0.1, 0.05, 0.025}));
    CHECK_THROWS_AS(require_decreasing_sweep({0.1, 0.2, 0.05}), ValidationError);
    CHECK_THROWS_AS(require_decreasing_sweep({0.1, -0.05, 0.025}), ValidationError);
    CHECK_THROWS_AS(require_decreasing_sweep({0.1, 0.05}), TSweepTooShort);
}
