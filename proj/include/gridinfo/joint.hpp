#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/grid.hpp"
#include "gridinfo/quadrature.hpp"

namespace gridinfo {

inline double pdf(const Gaussian2D& g, double x1, double x2) {
    const double det = g.cov[0] * g.cov[3] - g.cov[1] * g.cov[2];
    const double d1 = x1 - g.mean[0], d2 = x2 - g.mean[1];
    const double q = (g.cov[3] * d1 * d1 - 2.0 * g.cov[1] * d1 * d2 + g.cov[0] * d2 * d2) / det;
    return std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(det));
}

inline double pdf2d(const DistributionSpec& spec, double x1, double x2) {
    if (const auto* g = std::get_if<Gaussian2D>(&spec)) return pdf(*g, x1, x2);
    if (const auto* m = std::get_if<Mixture2D>(&spec)) {
        double s = 0.0;
        for (const auto& c : m->components) s += c.weight * pdf(c.component, x1, x2);
        return s;
    }
    throw ValidationError("pdf2d: spec is not two-dimensional");
}

// Joint density of (N1, N2) on a product grid; values[i1 * grid2.n + i2].
struct JointDensity2D {
    GridSpec grid1;
    GridSpec grid2;
    std::vector<double> values;

    JointDensity2D(GridSpec g1, GridSpec g2, std::vector<double> v)
        : grid1(g1), grid2(g2), values(std::move(v)) {
        const int n1 = grid1.n_points, n2 = grid2.n_points;
        if (static_cast<int>(values.size()) != n1 * n2)
            throw ValidationError("JointDensity2D: values size does not match grids");
        double boundary_max = 0.0;
        for (int i = 0; i < n1; ++i)
            boundary_max = std::max({boundary_max, values[i * n2], values[i * n2 + n2 - 1]});
        for (int j = 0; j < n2; ++j)
            boundary_max = std::max({boundary_max, values[j], values[(n1 - 1) * n2 + j]});
        if (boundary_max > kTailFloor)
            throw SupportTooNarrow("JointDensity2D: boundary above tail_floor");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ValidationError("JointDensity2D: values must be finite and non-negative");
        const double m = mass_raw();
        if (!(m > 0.0)) throw DegenerateDensity("JointDensity2D: non-positive mass");
        for (auto& x : values) x /= m;
    }

    double at(int i1, int i2) const { return values[i1 * grid2.n_points + i2]; }

    double mass_raw() const {
        const auto w1 = simpson_weights(grid1.n_points);
        const auto w2 = simpson_weights(grid2.n_points);
        double acc = 0.0;
        for (int i = 0; i < grid1.n_points; ++i) {
            double row = 0.0;
            for (int j = 0; j < grid2.n_points; ++j) row += w2[j] * at(i, j);
            acc += w1[i] * row;
        }
        return acc * grid1.step() * grid2.step();
    }
};

// Square default grid: one half-width serving both axes so the steps match
// (sum_density_of_joint needs commensurate axes).
inline std::pair<GridSpec, GridSpec> default_joint_grids(const DistributionSpec& spec,
                                                         int n_points = kDefaultNPoints2D) {
    double c1, c2, r = 0.0;
    if (const auto* g = std::get_if<Gaussian2D>(&spec)) {
        c1 = g->mean[0];
        c2 = g->mean[1];
        r = 12.0 * std::sqrt(std::max(g->cov[0], g->cov[3]));
    } else if (const auto* m = std::get_if<Mixture2D>(&spec)) {
        double w1 = 0.0, w2 = 0.0;
        c1 = c2 = 0.0;
        for (const auto& c : m->components) {
            c1 += c.weight * c.component.mean[0];
            c2 += c.weight * c.component.mean[1];
        }
        for (const auto& c : m->components) {
            w1 = std::max(w1, std::abs(c.component.mean[0] - c1) + 12.0 * std::sqrt(c.component.cov[0]));
            w2 = std::max(w2, std::abs(c.component.mean[1] - c2) + 12.0 * std::sqrt(c.component.cov[3]));
        }
        r = std::max(w1, w2);
    } else {
        throw ValidationError("default_joint_grids: spec is not two-dimensional");
    }
    return {GridSpec(c1 - r, c1 + r, n_points), GridSpec(c2 - r, c2 + r, n_points)};
}

inline JointDensity2D materialize2d(const DistributionSpec& spec, const GridSpec& g1,
                                    const GridSpec& g2) {
    validate(spec);
    std::vector<double> v(static_cast<std::size_t>(g1.n_points) * g2.n_points);
    for (int i = 0; i < g1.n_points; ++i)
        for (int j = 0; j < g2.n_points; ++j)
            v[i * g2.n_points + j] = pdf2d(spec, g1.x(i), g2.x(j));
    return JointDensity2D(g1, g2, std::move(v));
}

inline JointDensity2D materialize2d(const DistributionSpec& spec) {
    auto [g1, g2] = default_joint_grids(spec);
    return materialize2d(spec, g1, g2);
}

inline JointDensity2D product_joint(const GridDensity& f1, const GridDensity& f2) {
    std::vector<double> v(static_cast<std::size_t>(f1.n()) * f2.n());
    for (int i = 0; i < f1.n(); ++i)
        for (int j = 0; j < f2.n(); ++j) v[i * f2.n() + j] = f1.values[i] * f2.values[j];
    return JointDensity2D(f1.grid, f2.grid, std::move(v));
}

// Density of N1 + N2: rectangle-rule integration along anti-diagonals of the
// lattice (identical arithmetic to `convolve` when the joint is a product),
// then renormalized.
inline GridDensity sum_density_of_joint(const JointDensity2D& j) {
    require_commensurate(j.grid1, j.grid2, "sum_density_of_joint");
    const int n1 = j.grid1.n_points, n2 = j.grid2.n_points;
    const GridSpec out_grid(j.grid1.x_min + j.grid2.x_min, j.grid1.x_max + j.grid2.x_max,
                            n1 + n2 - 1);
    const double h = j.grid1.step();
    std::vector<double> out(n1 + n2 - 1, 0.0);
    for (int i = 0; i < n1; ++i)
        for (int k = 0; k < n2; ++k) out[i + k] += j.at(i, k);
    for (auto& x : out) x *= h;
    const double raw = simpson(out, out_grid.step());
    if (std::abs(raw - 1.0) > 1e-3)
        throw DegenerateDensity("sum_density_of_joint: mass defect " + std::to_string(raw - 1.0));
    return GridDensity(out_grid, std::move(out));
}

inline GridDensity marginal(const JointDensity2D& j, int axis) {
    const int n1 = j.grid1.n_points, n2 = j.grid2.n_points;
    if (axis == 0) {
        const auto w2 = simpson_weights(n2);
        std::vector<double> v(n1, 0.0);
        for (int i = 0; i < n1; ++i) {
            double acc = 0.0;
            for (int k = 0; k < n2; ++k) acc += w2[k] * j.at(i, k);
            v[i] = acc * j.grid2.step();
        }
        return GridDensity(j.grid1, std::move(v));
    }
    if (axis == 1) {
        const auto w1 = simpson_weights(n1);
        std::vector<double> v(n2, 0.0);
        for (int k = 0; k < n2; ++k) {
            double acc = 0.0;
            for (int i = 0; i < n1; ++i) acc += w1[i] * j.at(i, k);
            v[k] = acc * j.grid1.step();
        }
        return GridDensity(j.grid2, std::move(v));
    }
    throw ValidationError("marginal: axis must be 0 or 1");
}

}  // namespace gridinfo
