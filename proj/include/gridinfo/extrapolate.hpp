#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gridinfo/errors.hpp"

namespace gridinfo {

// Aitken delta-squared acceleration on the last three terms of a sequence
// converging like L + c*r^k. Unlike fixed-ratio Richardson, this needs no
// prior knowledge of r, which varies here (smooth noise gives r ~ t, a slope
// discontinuity gives r ~ sqrt(t)).
inline double aitken_limit(const std::vector<double>& seq) {
    if (seq.size() < 3) throw TSweepTooShort("aitken_limit: need at least three sweep values");
    const double a0 = seq[seq.size() - 3], a1 = seq[seq.size() - 2], a2 = seq[seq.size() - 1];
    const double denom = a2 - 2.0 * a1 + a0;
    if (std::abs(denom) < 1e-14 * (std::abs(a2) + std::abs(a0)))
        return a2;  // already flat to machine precision
    return a2 - (a2 - a1) * (a2 - a1) / denom;
}

inline void require_decreasing_sweep(const std::vector<double>& t_values) {
    if (t_values.size() < 3)
        throw TSweepTooShort("t-sweep needs at least three values");
    for (std::size_t i = 1; i < t_values.size(); ++i) {
        if (!(t_values[i] > 0.0) || !(t_values[i] < t_values[i - 1]))
            throw ValidationError("t-sweep values must be positive and strictly decreasing");
    }
}

}  // namespace gridinfo
