#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/fft.hpp"
#include "gridinfo/grid.hpp"
#include "gridinfo/quadrature.hpp"

namespace gridinfo {

// A probability density sampled on a uniform grid. Immutable by convention:
// every operation returns a new value. Construction normalizes to unit
// Simpson mass and enforces non-negativity and cold boundaries.
struct GridDensity {
    GridSpec grid;
    std::vector<double> values;

    GridDensity(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n_points)
            throw ValidationError("GridDensity: values size does not match grid");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ValidationError("GridDensity: values must be finite and non-negative");
        if (values.front() > kTailFloor || values.back() > kTailFloor)
            throw SupportTooNarrow("GridDensity: boundary value above tail_floor (" +
                                   std::to_string(std::max(values.front(), values.back())) + ")");
        const double mass = simpson(values, grid.step());
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw DegenerateDensity("GridDensity: non-positive mass");
        for (auto& x : values) x /= mass;
    }

    double step() const { return grid.step(); }
    int n() const { return grid.n_points; }
    double mass() const { return simpson(values, grid.step()); }
};

inline GridDensity materialize(const DistributionSpec& spec, const GridSpec& grid) {
    validate(spec);
    const double mu = mean_of(spec);
    const double sd = std::sqrt(variance_of(spec));
    if (grid.x_min > mu - 10.0 * sd || grid.x_max < mu + 10.0 * sd)
        throw SupportTooNarrow("materialize: grid must cover mean +- 10 standard deviations");
    std::vector<double> v(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) v[i] = pdf1d(spec, grid.x(i));
    if (v.front() > kTailFloor || v.back() > kTailFloor)
        throw SupportTooNarrow("materialize: density exceeds tail_floor at the grid boundary");
    return GridDensity(grid, std::move(v));
}

inline GridDensity materialize(const DistributionSpec& spec) {
    return materialize(spec, default_grid(spec));
}

// Density of the sum of independent variables. Discrete linear convolution
// scaled by the step, then renormalized (the rectangle-rule mass defect is
// O(h^2) at a slope discontinuity and ~1e-16 for smooth inputs).
inline GridDensity convolve(const GridDensity& f, const GridDensity& g) {
    const GridSpec out_grid = convolution_grid(f.grid, g.grid);
    std::vector<double> out = linear_convolve(f.values, g.values);
    const double h = f.step();
    double raw_mass = 0.0;
    for (auto& x : out) {
        x *= h;
        if (x < 0.0) x = 0.0;  // FFT ringing at the 1e-17 level
    }
    raw_mass = simpson(out, out_grid.step());
    if (std::abs(raw_mass - 1.0) > 1e-3)
        throw DegenerateDensity("convolve: mass defect " + std::to_string(raw_mass - 1.0));
    return GridDensity(out_grid, std::move(out));
}

// Density of scale*X + shift. Pure relabeling of the grid plus the Jacobian
// factor; no interpolation.
inline GridDensity affine_push(const GridDensity& f, double scale, double shift) {
    if (scale == 0.0) throw ZeroScale("affine_push: scale must be nonzero");
    const double lo = scale * f.grid.x_min + shift;
    const double hi = scale * f.grid.x_max + shift;
    std::vector<double> v(f.values);
    if (scale < 0.0) std::reverse(v.begin(), v.end());
    for (auto& x : v) x /= std::abs(scale);
    return GridDensity(GridSpec(std::min(lo, hi), std::max(lo, hi), f.n()), std::move(v));
}

// -int f ln f, with the 0*ln(0) := 0 convention below tail_floor.
inline double differential_entropy(const GridDensity& f) {
    std::vector<double> integrand(f.values.size(), 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] > kTailFloor) integrand[i] = -f.values[i] * std::log(f.values[i]);
    return simpson(integrand, f.step());
}

inline double moment(const GridDensity& f, int order) {
    if (order < 1 || order > 8)
        throw ValidationError("moment: order must be in 1..8, got " + std::to_string(order));
    std::vector<double> integrand(f.values.size());
    for (int i = 0; i < f.n(); ++i)
        integrand[i] = f.values[i] * std::pow(f.grid.x(i), order);
    return simpson(integrand, f.step());
}

inline double mean(const GridDensity& f) { return moment(f, 1); }

inline double variance(const GridDensity& f) {
    const double m = moment(f, 1);
    return moment(f, 2) - m * m;
}

inline double l1_distance(const GridDensity& f, const GridDensity& g) {
    if (!(f.grid == g.grid)) throw GridMismatch("l1_distance: grids must be identical");
    std::vector<double> d(f.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(f.values[i] - g.values[i]);
    return simpson(d, f.step());
}

namespace detail {

// Quintic Lagrange interpolation of tabulated values at x; zero outside the
// table's span. Smooth inputs only -- interpolation across a slope
// discontinuity degrades to O(h * jump).
inline double interp_quintic(const GridSpec& g, const std::vector<double>& v, double x) {
    if (x < g.x_min || x > g.x_max) return 0.0;
    const double h = g.step();
    int i0 = static_cast<int>(std::floor((x - g.x_min) / h)) - 2;
    i0 = std::clamp(i0, 0, g.n_points - 6);
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) {
        double lj = 1.0;
        const double xj = g.x(i0 + j);
        for (int k = 0; k < 6; ++k) {
            if (k == j) continue;
            lj *= (x - g.x(i0 + k)) / (xj - g.x(i0 + k));
        }
        acc += lj * v[i0 + j];
    }
    return acc;
}

}  // namespace detail

// Resample a (smooth) density onto another grid by quintic interpolation.
inline GridDensity regrid(const GridDensity& f, const GridSpec& target) {
    std::vector<double> v(target.n_points);
    for (int i = 0; i < target.n_points; ++i)
        v[i] = std::max(0.0, detail::interp_quintic(f.grid, f.values, target.x(i)));
    return GridDensity(target, std::move(v));
}

// Same span, (n-1)*factor + 1 points.
inline GridDensity refine(const GridDensity& f, int factor) {
    if (factor <= 1) return f;
    return regrid(f, GridSpec(f.grid.x_min, f.grid.x_max, (f.n() - 1) * factor + 1));
}

}  // namespace gridinfo
