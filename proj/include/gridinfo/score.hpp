#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gridinfo/density.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/fft.hpp"
#include "gridinfo/joint.hpp"
#include "gridinfo/quadrature.hpp"

namespace gridinfo {

// d/dx ln f on the grid. valid_mask is false where f <= tail_floor, within
// two points of such a point (4th-order stencil contamination), or in the
// two-point stencil margin at each end.
struct ScoreField {
    GridSpec grid;
    std::vector<double> values;
    std::vector<char> valid_mask;
    double weighted_mean = 0.0;  // int rho f over the valid region
};

namespace detail {

inline std::vector<char> low_density_mask(const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<char> ok(n, 1);
    for (int i = 0; i < n; ++i)
        if (f[i] <= kTailFloor)
            for (int k = std::max(0, i - 2); k <= std::min(n - 1, i + 2); ++k) ok[k] = 0;
    ok[0] = ok[1] = ok[n - 2] = ok[n - 1] = 0;
    return ok;
}

}  // namespace detail

inline ScoreField score(const GridDensity& f) {
    const int n = f.n();
    const double h = f.step();
    std::vector<double> lf(n);
    for (int i = 0; i < n; ++i) lf[i] = std::log(std::max(f.values[i], kTailFloor));
    std::vector<double> d(n, 0.0);
    for (int i = 2; i + 2 < n; ++i)
        d[i] = (-lf[i + 2] + 8.0 * lf[i + 1] - 8.0 * lf[i - 1] + lf[i - 2]) / (12.0 * h);
    std::vector<char> mask = detail::low_density_mask(f.values);
    int valid = 0;
    for (char m : mask) valid += m;
    // Convolution outputs legitimately carry wide dead tails (the span is the
    // sum of the inputs' spans), so only guard against a starved live region.
    if (valid < std::max(16, n / 10))
        throw DegenerateDensity("score: fewer than 10% of grid points are valid");
    std::vector<double> rf(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (mask[i]) rf[i] = d[i] * f.values[i];
    const double wm = simpson_masked(rf, mask, h);
    if (std::abs(wm) > kScoreMeanTol)
        throw DegenerateDensity("score: weighted mean " + std::to_string(wm) +
                                " exceeds score_mean_tol; tails are unusable");
    return ScoreField{f.grid, std::move(d), std::move(mask), wm};
}

// J(X) = E[rho^2]: Simpson integral of rho^2 f over the valid region. The
// score has zero mean, so the raw second moment is the variance; the
// zero-mean property is enforced separately in score().
inline double fisher_information(const GridDensity& f) {
    const ScoreField s = score(f);
    std::vector<double> integrand(f.values.size(), 0.0);
    for (int i = 0; i < f.n(); ++i)
        if (s.valid_mask[i]) integrand[i] = s.values[i] * s.values[i] * f.values[i];
    return simpson_masked(integrand, s.valid_mask, f.step());
}

struct FisherMatrix2 {
    // [ j11 j12 ; j12 j22 ]
    double j11 = 0.0, j12 = 0.0, j22 = 0.0;

    double quad_form(double a, double b) const {
        return a * a * j11 + 2.0 * a * b * j12 + b * b * j22;
    }
    double min_eigenvalue() const {
        const double tr = j11 + j22;
        const double disc = std::sqrt(std::max(0.0, (j11 - j22) * (j11 - j22) + 4.0 * j12 * j12));
        return 0.5 * (tr - disc);
    }
};

// E[grad ln f (grad ln f)^t] by 2-D Simpson over the valid region; gradients
// are 4th-order central differences along each axis.
inline FisherMatrix2 fisher_matrix(const JointDensity2D& j) {
    const int n1 = j.grid1.n_points, n2 = j.grid2.n_points;
    const double h1 = j.grid1.step(), h2 = j.grid2.step();
    std::vector<double> lf(j.values.size());
    for (std::size_t i = 0; i < j.values.size(); ++i)
        lf[i] = std::log(std::max(j.values[i], kTailFloor));
    auto L = [&](int i, int k) { return lf[i * n2 + k]; };

    std::vector<char> mask(j.values.size(), 1);
    for (int i = 0; i < n1; ++i)
        for (int k = 0; k < n2; ++k)
            if (j.at(i, k) <= kTailFloor)
                for (int a = std::max(0, i - 2); a <= std::min(n1 - 1, i + 2); ++a)
                    for (int b = std::max(0, k - 2); b <= std::min(n2 - 1, k + 2); ++b)
                        mask[a * n2 + b] = 0;
    for (int i = 0; i < n1; ++i)
        for (int k = 0; k < n2; ++k)
            if (i < 2 || i >= n1 - 2 || k < 2 || k >= n2 - 2) mask[i * n2 + k] = 0;

    const auto w1 = simpson_weights(n1), w2 = simpson_weights(n2);
    double j11 = 0.0, j12 = 0.0, j22 = 0.0;
    long valid = 0;
    for (int i = 2; i < n1 - 2; ++i) {
        for (int k = 2; k < n2 - 2; ++k) {
            if (!mask[i * n2 + k]) continue;
            ++valid;
            const double g1 =
                (-L(i + 2, k) + 8.0 * L(i + 1, k) - 8.0 * L(i - 1, k) + L(i - 2, k)) / (12.0 * h1);
            const double g2 =
                (-L(i, k + 2) + 8.0 * L(i, k + 1) - 8.0 * L(i, k - 1) + L(i, k - 2)) / (12.0 * h2);
            const double w = w1[i] * w2[k] * j.at(i, k);
            j11 += w * g1 * g1;
            j12 += w * g1 * g2;
            j22 += w * g2 * g2;
        }
    }
    // 12-sigma square grids leave ~30% of points above tail_floor for a
    // Gaussian; require a tenth as a sanity floor.
    if (valid < static_cast<long>(j.values.size()) / 10)
        throw DegenerateDensity("fisher_matrix: too few valid points");
    const double scale = h1 * h2;
    FisherMatrix2 out{j11 * scale, j12 * scale, j22 * scale};
    if (out.min_eigenvalue() < -1e-8)
        throw DegenerateDensity("fisher_matrix: result is not positive semi-definite");
    return out;
}

// Residual of the conditional-mean representation of the sum's score:
// rho_S(s) vs E[rho_{N1}(N1) | N1+N2 = s]. The conditional expectation is
// (rho_1 f_1) * f_2 / f_S on the lattice; the residual is the f_S-weighted
// L2 distance over the valid region of f_S.
inline double score_conditional_mean_residual(const GridDensity& f1, const GridDensity& f2) {
    require_commensurate(f1.grid, f2.grid, "score_conditional_mean_residual");
    const ScoreField s1 = score(f1);
    std::vector<double> rf(f1.values.size(), 0.0);
    for (int i = 0; i < f1.n(); ++i)
        if (s1.valid_mask[i]) rf[i] = s1.values[i] * f1.values[i];

    const double h = f1.step();
    std::vector<double> num = linear_convolve(rf, f2.values);
    std::vector<double> den = linear_convolve(f1.values, f2.values);
    for (auto& x : num) x *= h;
    for (auto& x : den) x *= h;

    const GridDensity fs = convolve(f1, f2);
    const ScoreField ss = score(fs);

    double acc = 0.0, wsum = 0.0;
    const int n = fs.n();
    for (int i = 0; i < n; ++i) {
        if (!ss.valid_mask[i] || den[i] <= kTailFloor) continue;
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double diff = num[i] / den[i] - ss.values[i];
        acc += w * fs.values[i] * diff * diff;
        wsum += w * fs.values[i];
    }
    if (!(wsum > 0.0)) throw DegenerateDensity("score_conditional_mean_residual: empty valid region");
    return std::sqrt(acc / wsum);
}

}  // namespace gridinfo
