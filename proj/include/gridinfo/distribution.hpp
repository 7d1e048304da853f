#pragma once

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gridinfo/errors.hpp"
#include "gridinfo/grid.hpp"

namespace gridinfo {

struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

struct GmmComponent {
    double weight;
    double mean;
    double variance;
};

struct GaussianMixture {
    std::vector<GmmComponent> components;
};

struct Laplace {
    double location = 0.0;
    double scale = 1.0;  // pdf = exp(-|x-location|/scale) / (2*scale)
};

struct Gaussian2D {
    std::array<double, 2> mean{0.0, 0.0};
    // row-major symmetric covariance [[c00,c01],[c01,c11]]
    std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};
};

struct Mixture2DComponent {
    double weight;
    Gaussian2D component;
};

struct Mixture2D {
    std::vector<Mixture2DComponent> components;
};

using DistributionSpec = std::variant<Gaussian, GaussianMixture, Laplace, Gaussian2D, Mixture2D>;

inline void validate(const DistributionSpec& spec) {
    struct V {
        void check_weights(const std::vector<double>& w) const {
            double s = 0.0;
            for (double x : w) {
                if (!(x > 0.0)) throw ValidationError("mixture weights must be positive");
                s += x;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw ValidationError("mixture weights must sum to 1 within 1e-12, got " +
                                      std::to_string(s));
        }
        void check_cov(const std::array<double, 4>& c) const {
            if (std::abs(c[1] - c[2]) > 1e-15)
                throw ValidationError("2-D covariance must be symmetric");
            const double det = c[0] * c[3] - c[1] * c[2];
            if (!(c[0] > 0.0) || !(det > 0.0))
                throw ValidationError("2-D covariance must be positive definite");
        }
        void operator()(const Gaussian& g) const {
            if (!(g.variance > 0.0)) throw ValidationError("Gaussian variance must be > 0");
        }
        void operator()(const GaussianMixture& m) const {
            if (m.components.empty()) throw ValidationError("mixture needs components");
            std::vector<double> w;
            for (const auto& c : m.components) {
                if (!(c.variance > 0.0)) throw ValidationError("mixture component variance must be > 0");
                w.push_back(c.weight);
            }
            check_weights(w);
        }
        void operator()(const Laplace& l) const {
            if (!(l.scale > 0.0)) throw ValidationError("Laplace scale must be > 0");
        }
        void operator()(const Gaussian2D& g) const { check_cov(g.cov); }
        void operator()(const Mixture2D& m) const {
            if (m.components.empty()) throw ValidationError("mixture needs components");
            std::vector<double> w;
            for (const auto& c : m.components) {
                check_cov(c.component.cov);
                w.push_back(c.weight);
            }
            check_weights(w);
        }
    };
    std::visit(V{}, spec);
}

inline double pdf(const Gaussian& g, double x) {
    const double d = x - g.mean;
    return std::exp(-0.5 * d * d / g.variance) / std::sqrt(2.0 * M_PI * g.variance);
}

inline double pdf(const GaussianMixture& m, double x) {
    double s = 0.0;
    for (const auto& c : m.components)
        s += c.weight * pdf(Gaussian{c.mean, c.variance}, x);
    return s;
}

inline double pdf(const Laplace& l, double x) {
    return std::exp(-std::abs(x - l.location) / l.scale) / (2.0 * l.scale);
}

inline double pdf1d(const DistributionSpec& spec, double x) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return pdf(*g, x);
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) return pdf(*m, x);
    if (const auto* l = std::get_if<Laplace>(&spec)) return pdf(*l, x);
    throw ValidationError("pdf1d: spec is not one-dimensional");
}

inline bool is_1d(const DistributionSpec& spec) {
    return !std::holds_alternative<Gaussian2D>(spec) && !std::holds_alternative<Mixture2D>(spec);
}

inline double mean_of(const DistributionSpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return g->mean;
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        double s = 0.0;
        for (const auto& c : m->components) s += c.weight * c.mean;
        return s;
    }
    if (const auto* l = std::get_if<Laplace>(&spec)) return l->location;
    throw ValidationError("mean_of: spec is not one-dimensional");
}

inline double variance_of(const DistributionSpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return g->variance;
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        double mu = mean_of(spec), ex2 = 0.0;
        for (const auto& c : m->components) ex2 += c.weight * (c.variance + c.mean * c.mean);
        return ex2 - mu * mu;
    }
    if (const auto* l = std::get_if<Laplace>(&spec)) return 2.0 * l->scale * l->scale;
    throw ValidationError("variance_of: spec is not one-dimensional");
}

// Half-width of the default support, centered on the mean. Gaussian-family
// tails sit below 1e-30 at 12 sigma; the Laplace tail decays only like
// exp(-r/b), so its radius is widened until the boundary value clears
// tail_floor with an order of magnitude to spare.
inline double default_half_width(const DistributionSpec& spec) {
    const double sigma = std::sqrt(variance_of(spec));
    double r = 12.0 * sigma;
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        const double mu = mean_of(spec);
        for (const auto& c : m->components)
            r = std::max(r, std::abs(c.mean - mu) + 12.0 * std::sqrt(c.variance));
    } else if (const auto* l = std::get_if<Laplace>(&spec)) {
        r = std::max(r, l->scale * std::log(1.0 / (2.0 * l->scale * 1e-13)) + 2.0 * l->scale);
    }
    return r;
}

inline GridSpec default_grid(const DistributionSpec& spec, int n_points = kDefaultNPoints) {
    const double mu = mean_of(spec);
    const double r = default_half_width(spec);
    return GridSpec(mu - r, mu + r, n_points);
}

// Density of scale*X + shift for a 1-D spec; all families are closed under
// affine maps, which the sweep code uses to build exact noise kernels.
inline DistributionSpec affine_spec(const DistributionSpec& spec, double scale, double shift) {
    if (scale == 0.0) throw ZeroScale("affine_spec: scale must be nonzero");
    if (const auto* g = std::get_if<Gaussian>(&spec))
        return Gaussian{scale * g->mean + shift, scale * scale * g->variance};
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        GaussianMixture out;
        for (const auto& c : m->components)
            out.components.push_back({c.weight, scale * c.mean + shift, scale * scale * c.variance});
        return out;
    }
    if (const auto* l = std::get_if<Laplace>(&spec))
        return Laplace{scale * l->location + shift, std::abs(scale) * l->scale};
    throw ValidationError("affine_spec: spec is not one-dimensional");
}

// Smallest per-component standard deviation: the resolvability scale a grid
// must support to sample this density (or a kernel built from it) faithfully.
inline double min_feature_sigma(const DistributionSpec& spec) {
    if (const auto* g = std::get_if<Gaussian>(&spec)) return std::sqrt(g->variance);
    if (const auto* m = std::get_if<GaussianMixture>(&spec)) {
        double s = std::sqrt(m->components.front().variance);
        for (const auto& c : m->components) s = std::min(s, std::sqrt(c.variance));
        return s;
    }
    if (const auto* l = std::get_if<Laplace>(&spec)) return std::sqrt(2.0) * l->scale;
    throw ValidationError("min_feature_sigma: spec is not one-dimensional");
}

inline std::string kind_name(const DistributionSpec& spec) {
    struct V {
        std::string operator()(const Gaussian&) const { return "gaussian"; }
        std::string operator()(const GaussianMixture&) const { return "gmm"; }
        std::string operator()(const Laplace&) const { return "laplace"; }
        std::string operator()(const Gaussian2D&) const { return "gaussian2d"; }
        std::string operator()(const Mixture2D&) const { return "mixture2d"; }
    };
    return std::visit(V{}, spec);
}

}  // namespace gridinfo
