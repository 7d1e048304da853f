#pragma once

#include <vector>

#include "gridinfo/grid.hpp"

namespace gridinfo {

// Composite Simpson weights (1,4,2,...,2,4,1)/3; caller multiplies by step.
inline std::vector<double> simpson_weights(int n) {
    std::vector<double> w(n, 1.0);
    for (int i = 1; i + 1 < n; i += 2) w[i] = 4.0;
    for (int i = 2; i + 1 < n; i += 2) w[i] = 2.0;
    for (auto& v : w) v /= 3.0;
    return w;
}

inline double simpson(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    double odd = 0.0, even = 0.0;
    for (int i = 1; i + 1 < n; i += 2) odd += f[i];
    for (int i = 2; i + 1 < n; i += 2) even += f[i];
    return h * (f.front() + f.back() + 4.0 * odd + 2.0 * even) / 3.0;
}

// Simpson sum restricted to a mask: masked-out points contribute zero.
inline double simpson_masked(const std::vector<double>& f, const std::vector<char>& mask, double h) {
    const int n = static_cast<int>(f.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f[i];
    }
    return acc * h / 3.0;
}

}  // namespace gridinfo
