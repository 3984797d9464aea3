#pragma once

// One mode dX = -gamma X dt + beta dZ. The stochastic convolution
// Y_t = int_0^t e^{-gamma (t-s)} beta dZ_s has E exp(ihY_t) = exp(-int_0^t psi(e^{-gamma s} beta h) ds).

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "levyou/levy_measure.hpp"
#include "levyou/numerics.hpp"
#include "levyou/random.hpp"
#include "levyou/stable.hpp"

namespace levyou {

struct OUParams {
    double gamma = 1.0;
    double beta = 1.0;
    std::shared_ptr<const SymmetricLevyMeasure> measure;
};

namespace detail {

inline const StableFamily& require_stable(const OUParams& p) {
    if (!p.measure) throw std::invalid_argument("OUParams: measure missing");
    const auto* s = p.measure->as<StableFamily>();
    if (!s) throw std::invalid_argument("stable-only operation called with a non-stable measure");
    return *s;
}

}  // namespace detail

/// sigma with sigma^alpha = c_alpha coef beta^alpha (1 - e^{-alpha gamma t}) / (alpha gamma); t may be +inf.
inline double convolution_scale(const OUParams& p, double t) {
    const auto& s = detail::require_stable(p);
    if (t < 0.0) throw std::invalid_argument("convolution_scale: t must be >= 0");
    if (t == 0.0 || p.beta == 0.0) return 0.0;
    const double a = s.alpha;
    const double growth = std::isinf(t) ? 1.0 : -std::expm1(-a * p.gamma * t);
    const double sigma_a = p.measure->stable_constant() * s.coef * std::pow(p.beta, a) * growth / (a * p.gamma);
    return std::pow(sigma_a, 1.0 / a);
}

inline double invariant_scale(const OUParams& p) { return convolution_scale(p, kInf); }

inline StableLaw convolution_law(const OUParams& p, double t) {
    return StableLaw{detail::require_stable(p).alpha, convolution_scale(p, t)};
}

inline StableLaw invariant_law(const OUParams& p) { return convolution_law(p, kInf); }

/// exp(-int_0^t psi(e^{-gamma s} beta h) ds) by quadrature in sigma = gamma s.
inline double cf_convolution(const OUParams& p, double h, double t) {
    if (!p.measure) throw std::invalid_argument("OUParams: measure missing");
    if (t < 0.0) throw std::invalid_argument("cf_convolution: t must be >= 0");
    if (h == 0.0 || t == 0.0) return 1.0;
    const double upper = std::isinf(t) ? kInf : p.gamma * t;
    std::vector<double> pts{0.0};
    for (double x = 1.0; x < std::min(upper, 64.0); x *= 2.0) pts.push_back(x);
    pts.push_back(upper);
    const double bh = p.beta * h;
    auto f = [&](double sigma) { return psi(*p.measure, std::exp(-sigma) * bh); };
    const double integral = integrate(f, pts, QuadratureOptions{1e-13, 1e-11, 400000}).value / p.gamma;
    return std::exp(-integral);
}

inline double ou_step_exact_stable(double x, double dt, const OUParams& p, Rng& rng) {
    if (dt < 0.0) throw std::invalid_argument("ou_step: step must be >= 0");
    const auto& s = detail::require_stable(p);
    if (dt == 0.0) return x;
    return std::exp(-p.gamma * dt) * x + sas_sample(s.alpha, convolution_scale(p, dt), rng);
}

/// Variance of the optional Gaussian stand-in for jumps of size <= eps.
inline double small_jump_variance(const OUParams& p, double eps, double dt) {
    return p.beta * p.beta * psi0(*p.measure, eps) * (-std::expm1(-2.0 * p.gamma * dt)) / (2.0 * p.gamma);
}

/// Exact decay plus every jump larger than the sampler's eps, each discounted
/// from its arrival time; smaller jumps are dropped or replaced by a Gaussian
/// surrogate.
inline double ou_step_general(double x, double dt, const OUParams& p, const JumpSampler& jumps_of, Rng& rng,
                              bool gaussian_surrogate = false) {
    if (!p.measure) throw std::invalid_argument("OUParams: measure missing");
    if (dt < 0.0) throw std::invalid_argument("ou_step: step must be >= 0");
    if (dt == 0.0) return x;
    auto jumps = jumps_of(dt, rng);
    std::stable_sort(jumps.begin(), jumps.end(),
                     [](const JumpRecord& a, const JumpRecord& b) { return a.time < b.time; });
    double y = std::exp(-p.gamma * dt) * x;
    for (const auto& j : jumps) y += std::exp(-p.gamma * (dt - j.time)) * p.beta * j.size;
    if (gaussian_surrogate) y += std::sqrt(small_jump_variance(p, jumps_of.eps(), dt)) * rng.normal();
    return y;
}

inline double ou_step_general(double x, double dt, const OUParams& p, double eps, Rng& rng,
                              bool gaussian_surrogate = false) {
    if (!p.measure) throw std::invalid_argument("OUParams: measure missing");
    return ou_step_general(x, dt, p, JumpSampler(*p.measure, eps), rng, gaussian_surrogate);
}

}  // namespace levyou
