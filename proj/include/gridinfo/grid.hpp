#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "gridinfo/errors.hpp"

namespace gridinfo {

// Library-wide constants. Overridable per call where an operation takes them
// explicitly; these are the documented defaults.
inline constexpr double kTailFloor = 1e-12;
inline constexpr double kMassTol = 1e-6;
inline constexpr double kScoreMeanTol = 1e-4;
inline constexpr int kDefaultNPoints = 1025;
inline constexpr int kDefaultNPoints2D = 257;

// Uniform 1-D grid: n_points samples from x_min to x_max inclusive.
// n_points is odd (composite Simpson wants an even panel count) and >= 33.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;

    GridSpec() = default;
    GridSpec(double lo, double hi, int n) : x_min(lo), x_max(hi), n_points(n) {
        if (!(x_min < x_max))
            throw ValidationError("GridSpec: x_min must be < x_max");
        if (n_points < 33 || n_points % 2 == 0)
            throw ValidationError("GridSpec: n_points must be odd and >= 33, got " +
                                  std::to_string(n_points));
    }

    double step() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return x_min + step() * i; }
    int size() const { return n_points; }

    bool operator==(const GridSpec& o) const {
        return x_min == o.x_min && x_max == o.x_max && n_points == o.n_points;
    }
};

inline bool steps_commensurate(const GridSpec& a, const GridSpec& b) {
    return std::abs(a.step() - b.step()) <= 1e-12 * a.step();
}

inline void require_commensurate(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!steps_commensurate(a, b))
        throw GridMismatch(std::string(where) + ": grid steps differ by more than 1e-12 relative (" +
                           std::to_string(a.step()) + " vs " + std::to_string(b.step()) + ")");
}

// Grid of the linear convolution of two commensurate grids.
inline GridSpec convolution_grid(const GridSpec& a, const GridSpec& b) {
    require_commensurate(a, b, "convolve");
    return GridSpec(a.x_min + b.x_min, a.x_max + b.x_max, a.n_points + b.n_points - 1);
}

// Symmetric step-h grid centered at 0 with at least the requested half-width.
// Used for noise kernels; keeps the result commensurate with the signal grid.
inline GridSpec kernel_grid(double half_width, double h, int min_half_points = 16) {
    int k = static_cast<int>(std::ceil(half_width / h));
    if (k < min_half_points) k = min_half_points;
    return GridSpec(-k * h, k * h, 2 * k + 1);
}

}  // namespace gridinfo
