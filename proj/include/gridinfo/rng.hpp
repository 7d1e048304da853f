#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gridinfo/density.hpp"
#include "gridinfo/errors.hpp"

namespace gridinfo {

// Counter-based generator: draw i is a pure function of (seed, i), so any
// sample range can be regenerated or partitioned across threads with results
// independent of scheduling. SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform on the open interval (0,1): 52-bit mantissa offset by half an ulp,
// never exactly 0 or 1 (the inverse normal CDF needs an open interval).
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(splitmix64(seed, counter) >> 12) + 0.5) * 0x1p-52;
}

// Inverse of the standard normal CDF, Wichura's PPND16 rational
// approximation (algorithm AS 241), |error| < 1e-15 over (0,1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("inverse_normal_cdf: p must be in (0,1)");
    static constexpr std::array<double, 8> a{
        3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static constexpr std::array<double, 7> b{
        4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
        2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
        5.2264952788528545610e3};
    static constexpr std::array<double, 8> c{
        1.42343711074968357734e0,  4.63033784615654529590e0,  5.76949722146069140550e0,
        3.64784832476320460504e0,  1.27045825245236838258e0,  2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr std::array<double, 7> d{
        2.05319162663775882187e0,  1.67638483018380384940e0,  6.89767334985100004550e-1,
        1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
        1.05075007164441684324e-9};
    static constexpr std::array<double, 8> e{
        6.65790464350110377720e0,  5.46378491116411436990e0,  1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr std::array<double, 7> f{
        5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
        7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
        2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        double num = a[7], den = b[6];
        for (int i = 6; i >= 0; --i) num = num * r + a[i];
        for (int i = 5; i >= 0; --i) den = den * r + b[i];
        return q * num / (den * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        double num = c[7], den = d[6];
        for (int i = 6; i >= 0; --i) num = num * r + c[i];
        for (int i = 5; i >= 0; --i) den = den * r + d[i];
        val = num / (den * r + 1.0);
    } else {
        r -= 5.0;
        double num = e[7], den = f[6];
        for (int i = 6; i >= 0; --i) num = num * r + e[i];
        for (int i = 5; i >= 0; --i) den = den * r + f[i];
        val = num / (den * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

inline double standard_normal(std::uint64_t seed, std::uint64_t counter) {
    return inverse_normal_cdf(uniform01(seed, counter));
}

// Inverse-CDF sampler for a grid density. The pdf is taken piecewise linear
// between nodes, so each cell's CDF segment is a quadratic solved exactly.
class DensitySampler {
  public:
    explicit DensitySampler(const GridDensity& f) : grid_(f.grid), values_(f.values) {
        const int n = grid_.n_points;
        cdf_.resize(n, 0.0);
        const double h = grid_.step();
        for (int i = 1; i < n; ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * (values_[i - 1] + values_[i]) * h;
        total_ = cdf_.back();
        if (!(total_ > 0.0)) throw DegenerateDensity("DensitySampler: zero mass");
    }

    double sample(double u) const {
        const double target = u * total_;
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        int idx = static_cast<int>(it - cdf_.begin()) - 1;
        idx = std::clamp(idx, 0, grid_.n_points - 2);
        const double h = grid_.step();
        const double rem = target - cdf_[idx];
        const double f0 = values_[idx];
        const double slope = (values_[idx + 1] - f0) / h;
        double d;
        if (std::abs(slope) > 1e-14 * std::max(f0, 1e-300)) {
            const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * rem);
            d = (std::sqrt(disc) - f0) / slope;
        } else {
            d = (f0 > 0.0) ? rem / f0 : 0.5 * h;
        }
        return grid_.x(idx) + std::clamp(d, 0.0, h);
    }

  private:
    GridSpec grid_;
    std::vector<double> values_;
    std::vector<double> cdf_;
    double total_;
};

}  // namespace gridinfo
