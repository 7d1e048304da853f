#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gridinfo/check.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/fft.hpp"
#include "gridinfo/quadrature.hpp"
#include "gridinfo/rng.hpp"
#include "gridinfo/score.hpp"

namespace gridinfo {

enum class ChannelMode { communications, bayesian };

// Carries the gains and time parameter of the two additive-noise models.
// The mode tag keeps the two time scalings apart: the communications model
// scales the signal by gain*sqrt(t), the Bayesian model adds noise of
// variance gain*t. For the Bayesian mode noise_variance_i == gain_i * t.
struct ChannelModel {
    ChannelMode mode = ChannelMode::bayesian;
    double gain_a = 1.0;
    double gain_b = 1.0;
    double t = 1.0;
    double noise_variance_1 = 1.0;
    double noise_variance_2 = 1.0;

    static ChannelModel bayesian(double a, double b, double t) {
        ChannelModel m{ChannelMode::bayesian, a, b, t, a * t, b * t};
        m.validate();
        return m;
    }

    static ChannelModel communications(double a, double b, double t, double var1, double var2) {
        ChannelModel m{ChannelMode::communications, a, b, t, var1, var2};
        m.validate();
        return m;
    }

    void validate() const {
        if (!(t > 0.0)) throw ValidationError("ChannelModel: t must be positive");
        if (!(gain_a >= 0.0) || !(gain_b >= 0.0))
            throw ValidationError("ChannelModel: gains must be non-negative");
        if (!(noise_variance_1 > 0.0) || !(noise_variance_2 > 0.0))
            throw ValidationError("ChannelModel: noise variances must be positive");
        if (mode == ChannelMode::bayesian) {
            const auto close = [](double u, double v) {
                return std::abs(u - v) <= 1e-12 * std::max(std::abs(u), std::abs(v));
            };
            if (!close(noise_variance_1, gain_a * t) || !close(noise_variance_2, gain_b * t))
                throw ValidationError("ChannelModel: Bayesian mode requires noise_variance_i = gain_i * t");
        }
    }
};

namespace detail {

// A Gaussian kernel narrower than ~1.25 grid steps cannot be represented on
// the lattice without aliasing; refine the density by a power of two first.
inline constexpr double kKernelResolveRatio = 1.25;
inline constexpr int kMaxRefineFactor = 1024;

inline GridDensity resolve_for_kernel(const GridDensity& f, double sigma) {
    const double h = f.grid.step();
    if (sigma >= kKernelResolveRatio * h) return f;
    const double need = kKernelResolveRatio * h / sigma;
    int factor = 1;
    while (factor < kMaxRefineFactor && static_cast<double>(factor) < need) factor <<= 1;
    if (static_cast<double>(factor) < need)
        throw DegenerateDensity("noise kernel too narrow to resolve even after maximal grid refinement");
    return refine(f, factor);
}

inline GridDensity gaussian_kernel_density(double sigma2, double h) {
    const double sigma = std::sqrt(sigma2);
    const GridSpec g = kernel_grid(12.0 * sigma, h);
    std::vector<double> v(g.size());
    const Gaussian k{0.0, sigma2};
    for (int i = 0; i < g.n_points; ++i) v[i] = pdf(k, g.x(i));
    return GridDensity(g, std::move(v));
}

}  // namespace detail

// Posterior of N from the observation X = N + W, W ~ Gaussian(0, sigma2).
// mean/var are E[N|X=x] and VAR[N|X=x]; both are zero (and flagged invalid)
// where the raw marginal falls below tail_floor.
struct PosteriorField {
    GridSpec grid;
    std::vector<double> mean;
    std::vector<double> var;
    GridDensity fx;
    std::vector<char> valid;
};

namespace detail {

// Assumes fN is already fine enough for the kernel (see resolve_for_kernel).
inline PosteriorField posterior_resolved(const GridDensity& fN, double sigma2) {
    const double h = fN.grid.step();
    const GridDensity fk = gaussian_kernel_density(sigma2, h);
    const GridSpec gx = convolution_grid(fN.grid, fk.grid);

    const std::size_t n = fN.values.size();
    std::vector<double> w1(n), w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = fN.grid.x(static_cast<int>(i));
        w1[i] = fN.values[i] * x;
        w2[i] = fN.values[i] * x * x;
    }
    std::vector<double> m0 = linear_convolve(fN.values, fk.values);
    std::vector<double> m1 = linear_convolve(w1, fk.values);
    std::vector<double> m2 = linear_convolve(w2, fk.values);

    const std::size_t nx = gx.size();
    std::vector<double> mean(nx, 0.0), var(nx, 0.0), fx_raw(nx, 0.0);
    std::vector<char> valid(nx, 0);
    for (std::size_t i = 0; i < nx; ++i) {
        const double f = m0[i] * h;
        fx_raw[i] = std::max(f, 0.0);
        if (f > kTailFloor) {
            valid[i] = 1;
            mean[i] = m1[i] / m0[i];
            var[i] = std::max(0.0, m2[i] / m0[i] - mean[i] * mean[i]);
        }
    }
    return PosteriorField{gx, std::move(mean), std::move(var), GridDensity(gx, std::move(fx_raw)),
                          std::move(valid)};
}

}  // namespace detail

inline PosteriorField posterior(const GridDensity& fN, double sigma2) {
    if (!(sigma2 > 0.0)) throw ValidationError("posterior: sigma2 must be positive");
    const GridDensity fr = detail::resolve_for_kernel(fN, std::sqrt(sigma2));
    return detail::posterior_resolved(fr, sigma2);
}

struct ConditionalMoments {
    double cond_var = 0.0;  // VAR[N | N+W] averaged over the observation
};

inline ConditionalMoments conditional_variance(const GridDensity& fN, double sigma2) {
    const PosteriorField p = posterior(fN, sigma2);
    const std::size_t n = p.fx.values.size();
    std::vector<double> integrand(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) integrand[i] = p.var[i] * p.fx.values[i];
    return ConditionalMoments{simpson_masked(integrand, p.valid, p.grid.step())};
}

// Relative residual of J(N+W) = (sigma2 - VAR[N|N+W]) / sigma2^2, computing
// the two sides through independent pipelines (score-based vs posterior).
inline double lemma1_residual(const GridDensity& fN, double sigma2) {
    if (!(sigma2 > 0.0)) throw ValidationError("lemma1_residual: sigma2 must be positive");
    const GridDensity fr = detail::resolve_for_kernel(fN, std::sqrt(sigma2));
    const GridDensity fx = convolve(fr, detail::gaussian_kernel_density(sigma2, fr.grid.step()));
    const double j = fisher_information(fx);
    const double cv = conditional_variance(fr, sigma2).cond_var;
    const double rhs = (sigma2 - cv) / (sigma2 * sigma2);
    return std::abs(j - rhs) / j;
}

// f_X-weighted L2 distance between the score of the marginal and the
// posterior-mean form (E[N|X=x] - x) / sigma2.
inline double score_mmse_identity_residual(const GridDensity& fN, double sigma2) {
    if (!(sigma2 > 0.0)) throw ValidationError("score_mmse_identity_residual: sigma2 must be positive");
    const GridDensity fr = detail::resolve_for_kernel(fN, std::sqrt(sigma2));
    const PosteriorField p = detail::posterior_resolved(fr, sigma2);
    const ScoreField s = score(p.fx);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.fx.values.size(); ++i) {
        if (!p.valid[i] || !s.valid_mask[i]) continue;
        const double rhs = (p.mean[i] - p.grid.x(static_cast<int>(i))) / sigma2;
        const double d = s.values[i] - rhs;
        num += d * d * p.fx.values[i];
        den += p.fx.values[i];
    }
    if (!(den > 0.0)) throw DegenerateDensity("score_mmse_identity_residual: empty valid region");
    return std::sqrt(num / den);
}

// |E[(E[N|X]-X)(N-E[N|X])]| by 2-D quadrature over (n, x). The inner moments
// use Simpson weights in n against the raw kernel, so the quantity is not a
// tautology of the posterior-mean quadrature.
inline double orthogonality_residual(const GridDensity& fN, double sigma2) {
    if (!(sigma2 > 0.0)) throw ValidationError("orthogonality_residual: sigma2 must be positive");
    const GridDensity fr = detail::resolve_for_kernel(fN, std::sqrt(sigma2));
    const PosteriorField p = detail::posterior_resolved(fr, sigma2);

    const int nn = fr.grid.n_points;
    const int nx = p.grid.n_points;
    const double h = fr.grid.step();
    std::vector<double> wn = simpson_weights(nn);
    std::vector<double> wf0(nn), wf1(nn);
    for (int i = 0; i < nn; ++i) {
        wf0[i] = wn[i] * h * fr.values[i];
        wf1[i] = wf0[i] * fr.grid.x(i);
    }
    // phi(x_j - n_i) on the common lattice: offsets run from
    // (x_min - n_max) to (x_max - n_min) in steps of h.
    const double off0 = (p.grid.x_min - fr.grid.x_min) - (nn - 1) * h;
    std::vector<double> kerv(static_cast<std::size_t>(nx + nn - 1));
    const Gaussian kg{0.0, sigma2};
    for (std::size_t k = 0; k < kerv.size(); ++k)
        kerv[k] = pdf(kg, off0 + h * static_cast<double>(k));
    const std::vector<double> c0 = linear_convolve(wf0, kerv);
    const std::vector<double> c1 = linear_convolve(wf1, kerv);

    std::vector<double> integrand(static_cast<std::size_t>(nx), 0.0);
    for (int j = 0; j < nx; ++j) {
        const double m0 = c0[static_cast<std::size_t>(nn - 1 + j)];
        const double m1 = c1[static_cast<std::size_t>(nn - 1 + j)];
        const double inner = m1 - p.mean[static_cast<std::size_t>(j)] * m0;
        integrand[static_cast<std::size_t>(j)] =
            (p.mean[static_cast<std::size_t>(j)] - p.grid.x(j)) * inner;
    }
    return std::abs(simpson_masked(integrand, p.valid, p.grid.step()));
}

// VAR[N|X] = gain*t - gain^2 t^2 J(X) for X = N + Gaussian(0, gain*t):
// left side from the posterior pipeline, right side from the score pipeline.
inline CheckResult bayesian_var_identities(const GridDensity& fN, double gain, double t,
                                           double tol = 1e-4) {
    if (!(gain * t > 0.0)) throw ValidationError("bayesian_var_identities: gain*t must be positive");
    const double s2 = gain * t;
    const GridDensity fr = detail::resolve_for_kernel(fN, std::sqrt(s2));
    const double lhs = conditional_variance(fr, s2).cond_var;
    const GridDensity fx = convolve(fr, detail::gaussian_kernel_density(s2, fr.grid.step()));
    const double j = fisher_information(fx);
    const double rhs = s2 - s2 * s2 * j;
    CheckResult r = equality_check("bayesian-var-identity", lhs, rhs, tol);
    r.diagnostics["gain"] = gain;
    r.diagnostics["t"] = t;
    r.diagnostics["sigma2"] = s2;
    r.diagnostics["fisher_x"] = j;
    r.diagnostics["n_points"] = static_cast<double>(fr.grid.n_points);
    return r;
}

namespace detail {

inline constexpr int kMcBinsPerAxis = 64;
inline constexpr int kMcMinBinCount = 30;
inline constexpr double kMcMinCoverage = 0.99;
inline constexpr std::int64_t kMcBlock = 1 << 18;

// Runs body(block_index, begin, end) over fixed-size blocks. Blocks are
// assigned statically and partials must be merged in block order by the
// caller, so results are identical for any thread count.
template <typename Fn>
inline void run_blocks(std::int64_t n, int n_threads, Fn&& body) {
    const std::int64_t nb = (n + kMcBlock - 1) / kMcBlock;
    if (n_threads <= 1) {
        for (std::int64_t b = 0; b < nb; ++b)
            body(b, b * kMcBlock, std::min(n, (b + 1) * kMcBlock));
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int tdx = 0; tdx < n_threads; ++tdx) {
        pool.emplace_back([&, tdx]() {
            for (std::int64_t b = tdx; b < nb; b += n_threads)
                body(b, b * kMcBlock, std::min(n, (b + 1) * kMcBlock));
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Monte Carlo check that VAR[N1+N2|X1,X2] = VAR[N1|X1] + VAR[N2|X2] in the
// Bayesian model X_i = N_i + sqrt(gain_i t) W_i with everything independent.
// The left side is a binned 2-D regression estimate; the right side is the
// quadrature sum of the two 1-D conditional variances. All randomness is a
// pure function of (seed, sample index), so any thread count reproduces the
// same report byte for byte.
inline CheckResult var_additivity_mc_check(const GridDensity& f1, const GridDensity& f2,
                                           const ChannelModel& model, std::int64_t n_samples,
                                           std::uint64_t seed, int n_threads = 1) {
    model.validate();
    if (model.mode != ChannelMode::bayesian)
        throw ValidationError("var_additivity_mc_check: requires a Bayesian-mode ChannelModel");
    if (n_samples < 1'000'000)
        throw ValidationError("var_additivity_mc_check: n_samples must be at least 1e6");

    const double sd1 = std::sqrt(model.noise_variance_1);
    const double sd2 = std::sqrt(model.noise_variance_2);
    const DensitySampler samp1(f1), samp2(f2);
    const auto draw_x1 = [&](std::int64_t i) {
        const std::uint64_t c = static_cast<std::uint64_t>(i) * 4;
        return samp1.sample(uniform01(seed, c)) + sd1 * standard_normal(seed, c + 2);
    };
    const auto draw_x2 = [&](std::int64_t i) {
        const std::uint64_t c = static_cast<std::uint64_t>(i) * 4;
        return samp2.sample(uniform01(seed, c + 1)) + sd2 * standard_normal(seed, c + 3);
    };
    const auto draw_all = [&](std::int64_t i, double& x1, double& x2, double& s) {
        const std::uint64_t c = static_cast<std::uint64_t>(i) * 4;
        const double n1 = samp1.sample(uniform01(seed, c));
        const double n2 = samp2.sample(uniform01(seed, c + 1));
        x1 = n1 + sd1 * standard_normal(seed, c + 2);
        x2 = n2 + sd2 * standard_normal(seed, c + 3);
        s = n1 + n2;
    };

    // Pass 1: marginal quantile edges (equal-probability bins are valid
    // because X1 and X2 are independent here).
    const int K = detail::kMcBinsPerAxis;
    std::vector<double> edges1(static_cast<std::size_t>(K - 1));
    std::vector<double> edges2(static_cast<std::size_t>(K - 1));
    {
        std::vector<double> buf(static_cast<std::size_t>(n_samples));
        detail::run_blocks(n_samples, n_threads, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t i = lo; i < hi; ++i) buf[static_cast<std::size_t>(i)] = draw_x1(i);
        });
        std::sort(buf.begin(), buf.end());
        for (int q = 1; q < K; ++q)
            edges1[static_cast<std::size_t>(q - 1)] =
                buf[static_cast<std::size_t>(n_samples * q / K)];
        detail::run_blocks(n_samples, n_threads, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t i = lo; i < hi; ++i) buf[static_cast<std::size_t>(i)] = draw_x2(i);
        });
        std::sort(buf.begin(), buf.end());
        for (int q = 1; q < K; ++q)
            edges2[static_cast<std::size_t>(q - 1)] =
                buf[static_cast<std::size_t>(n_samples * q / K)];
    }
    const auto bin_of = [K](const std::vector<double>& e, double x) {
        return static_cast<int>(std::upper_bound(e.begin(), e.end(), x) - e.begin());
    };

    // Pass 2: per-bin first/second-moment sums, accumulated per block and
    // merged in block order.
    const int nbins = K * K;
    constexpr int S = 10;  // cnt, x1, x2, s, x1x1, x2x2, x1x2, sx1, sx2, ss
    const std::int64_t n_blocks = (n_samples + detail::kMcBlock - 1) / detail::kMcBlock;
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_blocks));
    detail::run_blocks(n_samples, n_threads, [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
        std::vector<double> acc(static_cast<std::size_t>(nbins * S), 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
            double x1, x2, s;
            draw_all(i, x1, x2, s);
            const int bin = bin_of(edges1, x1) * K + bin_of(edges2, x2);
            double* a = acc.data() + static_cast<std::size_t>(bin) * S;
            a[0] += 1.0;
            a[1] += x1;
            a[2] += x2;
            a[3] += s;
            a[4] += x1 * x1;
            a[5] += x2 * x2;
            a[6] += x1 * x2;
            a[7] += s * x1;
            a[8] += s * x2;
            a[9] += s * s;
        }
        partial[static_cast<std::size_t>(b)] = std::move(acc);
    });
    std::vector<double> sums(static_cast<std::size_t>(nbins * S), 0.0);
    for (std::int64_t b = 0; b < n_blocks; ++b)
        for (int k = 0; k < nbins * S; ++k)
            sums[static_cast<std::size_t>(k)] += partial[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
    partial.clear();

    // Per-bin centered least squares s ~ beta1*x1 + beta2*x2.
    std::vector<double> mean_x1(static_cast<std::size_t>(nbins)), mean_x2(static_cast<std::size_t>(nbins)),
        mean_s(static_cast<std::size_t>(nbins)), beta1(static_cast<std::size_t>(nbins), 0.0),
        beta2(static_cast<std::size_t>(nbins), 0.0), vb(static_cast<std::size_t>(nbins), 0.0);
    std::vector<char> keep(static_cast<std::size_t>(nbins), 0);
    std::int64_t used = 0, dropped = 0;
    for (int bidx = 0; bidx < nbins; ++bidx) {
        const double* a = sums.data() + static_cast<std::size_t>(bidx) * S;
        const std::int64_t nb = static_cast<std::int64_t>(a[0]);
        if (nb == 0) continue;
        if (nb < detail::kMcMinBinCount) {
            dropped += nb;
            continue;
        }
        const double dn = a[0];
        const double mx1 = a[1] / dn, mx2 = a[2] / dn, ms = a[3] / dn;
        const double a11 = a[4] - dn * mx1 * mx1;
        const double a22 = a[5] - dn * mx2 * mx2;
        const double a12 = a[6] - dn * mx1 * mx2;
        const double c1 = a[7] - dn * mx1 * ms;
        const double c2 = a[8] - dn * mx2 * ms;
        const double syy = a[9] - dn * ms * ms;
        const double det = a11 * a22 - a12 * a12;
        double b1 = 0.0, b2 = 0.0;
        if (det > 1e-12 * std::max(a11 * a22, 1e-300)) {
            b1 = (a22 * c1 - a12 * c2) / det;
            b2 = (a11 * c2 - a12 * c1) / det;
        }
        const double ssr = std::max(0.0, syy - b1 * c1 - b2 * c2);
        const std::size_t u = static_cast<std::size_t>(bidx);
        mean_x1[u] = mx1;
        mean_x2[u] = mx2;
        mean_s[u] = ms;
        beta1[u] = b1;
        beta2[u] = b2;
        vb[u] = ssr / static_cast<double>(nb - 3);
        keep[u] = 1;
        used += nb;
    }
    if (static_cast<double>(used) < detail::kMcMinCoverage * static_cast<double>(n_samples))
        throw InsufficientSamples(
            "var_additivity_mc_check: bins below the per-bin floor cover more than 1% of samples");

    // Pass 3: within-bin residual fourth moments for the delta-method SE.
    std::vector<std::vector<double>> partial4(static_cast<std::size_t>(n_blocks));
    detail::run_blocks(n_samples, n_threads, [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
        std::vector<double> acc(static_cast<std::size_t>(nbins), 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
            double x1, x2, s;
            draw_all(i, x1, x2, s);
            const int bin = bin_of(edges1, x1) * K + bin_of(edges2, x2);
            const std::size_t u = static_cast<std::size_t>(bin);
            if (!keep[u]) continue;
            const double r = (s - mean_s[u]) - beta1[u] * (x1 - mean_x1[u]) -
                             beta2[u] * (x2 - mean_x2[u]);
            acc[u] += r * r * r * r;
        }
        partial4[static_cast<std::size_t>(b)] = std::move(acc);
    });
    std::vector<double> sum4(static_cast<std::size_t>(nbins), 0.0);
    for (std::int64_t b = 0; b < n_blocks; ++b)
        for (int k = 0; k < nbins; ++k)
            sum4[static_cast<std::size_t>(k)] += partial4[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
    partial4.clear();

    double est_num = 0.0, wsum = 0.0, varvar = 0.0;
    for (int bidx = 0; bidx < nbins; ++bidx) {
        const std::size_t u = static_cast<std::size_t>(bidx);
        if (!keep[u]) continue;
        const double nb = sums[u * S];
        const double m4 = sum4[u] / nb;
        const double ratio = nb / (nb - 3.0);
        const double spread = std::max(0.0, m4 - vb[u] * vb[u] * (nb - 3.0) / nb);
        est_num += nb * vb[u];
        wsum += nb;
        varvar += ratio * ratio * spread * nb;
    }
    const double mc = est_num / wsum;
    const double se = std::sqrt(varvar) / wsum;

    const double cv1 = conditional_variance(f1, model.noise_variance_1).cond_var;
    const double cv2 = conditional_variance(f2, model.noise_variance_2).cond_var;
    const double quad = cv1 + cv2;

    CheckResult r = equality_check("var-additivity-mc", mc, quad, 3.0 * se);
    r.diagnostics["mc_se"] = se;
    r.diagnostics["n_samples"] = static_cast<double>(n_samples);
    r.diagnostics["seed"] = static_cast<double>(seed);
    r.diagnostics["dropped_samples"] = static_cast<double>(dropped);
    r.diagnostics["coverage"] = static_cast<double>(used) / static_cast<double>(n_samples);
    r.diagnostics["cond_var_1"] = cv1;
    r.diagnostics["cond_var_2"] = cv2;
    r.diagnostics["gain_a"] = model.gain_a;
    r.diagnostics["gain_b"] = model.gain_b;
    r.diagnostics["t"] = model.t;
    r.diagnostics["n_points_1"] = static_cast<double>(f1.grid.n_points);
    r.diagnostics["n_points_2"] = static_cast<double>(f2.grid.n_points);
    return r;
}

}  // namespace gridinfo
