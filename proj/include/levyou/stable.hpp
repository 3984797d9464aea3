#pragma once

// Symmetric alpha-stable laws with characteristic function exp(-sigma^alpha |h|^alpha):
// Chambers-Mallows-Stuck sampling and a distribution function from the
// Zolotarev integral representation, tabulated once per alpha.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "levyou/numerics.hpp"
#include "levyou/random.hpp"

namespace levyou {

/// Standard (sigma = 1) symmetric stable variate.
inline double standard_sas_sample(double alpha, Rng& rng) {
    const double v = kPi * (rng.uniform() - 0.5);
    if (alpha == 1.0) return std::tan(v);
    const double w = rng.exponential();
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

inline double sas_sample(double alpha, double sigma, Rng& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("sas_sample: alpha must lie in (0,2]");
    if (sigma < 0.0) throw std::invalid_argument("sas_sample: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    return sigma * standard_sas_sample(alpha, rng);
}

namespace detail {

// 1/2 + (1/(pi alpha)) sum_k (-1)^k Gamma((2k+1)/alpha) x^{2k+1} / (2k+1)!, convergent for alpha > 1
// and asymptotic for alpha < 1. Empty unless the smallest term reaches double precision.
inline std::optional<double> stable_cdf_series(double alpha, double x) {
    if (!(x > 0.0 && x < 0.5)) return std::nullopt;
    const double lx = std::log(x);
    double sum = 0.0, prev = kInf;
    for (int k = 0; k < 400; ++k) {
        const double n = 2.0 * k + 1.0;
        const double mag = std::exp(std::lgamma(n / alpha) + n * lx - std::lgamma(n + 1.0));
        if (mag > prev) return std::nullopt;
        sum += (k % 2 == 0 ? mag : -mag);
        if (mag < 1e-17 * std::abs(sum)) return 0.5 + sum / (kPi * alpha);
        prev = mag;
    }
    return std::nullopt;
}

}  // namespace detail

/// P(S <= x) for the standard symmetric stable law: a power series near 0, otherwise quadrature of
/// the Zolotarev integral.
inline double stable_cdf_exact(double alpha, double x) {
    if (x == 0.0) return 0.5;
    if (x < 0.0) return 1.0 - stable_cdf_exact(alpha, -x);
    if (std::isinf(x)) return 1.0;
    if (alpha == 1.0) return 0.5 + std::atan(x) / kPi;
    if (alpha == 2.0) return 0.5 * std::erfc(-x / 2.0);
    if (const auto near = detail::stable_cdf_series(alpha, x)) return *near;
    const double a = alpha / (alpha - 1.0);
    const double lx = a * std::log(x);
    auto exponent = [&](double th) {
        const double c = std::cos(th);
        const double sa = std::sin(alpha * th);
        return lx + a * (std::log(c) - std::log(sa)) + std::log(std::cos((alpha - 1.0) * th)) - std::log(c);
    };
    auto integrand = [&](double th) {
        const double c = std::cos(th);
        const double sa = std::sin(alpha * th);
        if (c <= 0.0 || sa <= 0.0) return alpha > 1.0 ? (c <= 0.0 ? 1.0 : 0.0) : (c <= 0.0 ? 0.0 : 1.0);
        const double e = exponent(th);
        if (e > 700.0) return 0.0;
        return std::exp(-std::exp(e));
    };
    // The exponent is monotone in theta; the integrand drops from 1 to 0 where it passes through
    // [-6, 4], which can be an arbitrarily thin layer at extreme x.
    std::vector<double> pts{0.0};
    const double lo_th = 1e-300, hi_th = 0.5 * kPi * (1.0 - 1e-16);
    const bool rising = exponent(hi_th) > exponent(lo_th);
    for (double level : {-6.0, -2.0, 0.0, 1.0, 2.5, 4.0}) {
        double l = lo_th, r = hi_th;
        if ((exponent(l) - level) * (exponent(r) - level) > 0.0) continue;
        for (int it = 0; it < 200 && r - l > 1e-16 * r; ++it) {
            const double m = 0.5 * (l + r);
            ((exponent(m) < level) == rising ? l : r) = m;
        }
        const double th = 0.5 * (l + r);
        if (th > pts.back() && th < 0.5 * kPi) pts.push_back(th);
    }
    pts.push_back(0.5 * kPi);
    const double integral = integrate(integrand, pts, QuadratureOptions{1e-13, 1e-11, 200000}).value;
    double f = alpha < 1.0 ? 0.5 + integral / kPi : 1.0 - integral / kPi;
    return std::clamp(f, 0.0, 1.0);
}

/// Tabulated standard CDF in z = asinh(x) with cubic Hermite interpolation;
/// arguments outside the table fall back to the exact integral.
class StableCdfTable {
public:
    explicit StableCdfTable(double alpha) : alpha_(alpha), values_(kNodes) {
        for (std::size_t i = 0; i < kNodes; ++i) values_[i] = stable_cdf_exact(alpha, std::sinh(i * kStep));
    }

    double alpha() const noexcept { return alpha_; }

    double operator()(double x) const {
        if (std::isnan(x)) return x;
        if (x < 0.0) return 1.0 - (*this)(-x);
        const double z = std::asinh(x);
        const double pos = z / kStep;
        if (!(pos < static_cast<double>(kNodes - 2))) return stable_cdf_exact(alpha_, x);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double u = pos - static_cast<double>(i);
        const double y0 = values_[i], y1 = values_[i + 1];
        // Neighbour across 0 follows from symmetry: F(-x) = 1 - F(x).
        const double ym = i == 0 ? 1.0 - values_[1] : values_[i - 1];
        const double y2 = values_[i + 2];
        const double m0 = 0.5 * (y1 - ym), m1 = 0.5 * (y2 - y0);
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    }

    /// Shared immutable table per alpha.
    static std::shared_ptr<const StableCdfTable> get(double alpha) {
        static std::mutex mutex;
        static std::map<double, std::shared_ptr<const StableCdfTable>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto& slot = cache[alpha];
        if (!slot) slot = std::make_shared<const StableCdfTable>(alpha);
        return slot;
    }

private:
    static constexpr std::size_t kNodes = 16001;
    static constexpr double kStep = 1e-3;  // z up to 16, x up to about 4.4e6
    double alpha_;
    std::vector<double> values_;
};

/// Symmetric alpha-stable law with scale sigma (sigma = 0 is the point mass at 0).
struct StableLaw {
    double alpha = 1.0;
    double sigma = 1.0;

    double cdf(double x) const {
        if (sigma == 0.0) return x >= 0.0 ? 1.0 : 0.0;
        return (*StableCdfTable::get(alpha))(x / sigma);
    }

    double sample(Rng& rng) const { return sas_sample(alpha, sigma, rng); }

    /// Median absolute deviation of the law: sigma * F^{-1}(3/4).
    double median_abs_deviation() const { return sigma * quantile(0.75); }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("StableLaw::quantile: p must lie in (0,1)");
        if (sigma == 0.0) return 0.0;
        if (p == 0.5) return 0.0;
        if (p < 0.5) return -quantile(1.0 - p);
        const auto table = StableCdfTable::get(alpha);
        double lo = 0.0, hi = 1.0;
        while ((*table)(hi) < p) { lo = hi; hi *= 2.0; }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((*table)(mid) < p ? lo : hi) = mid;
        }
        return sigma * 0.5 * (lo + hi);
    }
};

/// sup_x |P(mu + A <= x) - P(B <= x)| for A ~ S(alpha, sigma_a), B ~ S(alpha, sigma_b),
/// found by a grid scan in asinh(x) and golden-section refinement of every local peak.
inline double stable_ks_distance(double alpha, double mu, double sigma_a, double sigma_b) {
    const StableLaw la{alpha, sigma_a}, lb{alpha, sigma_b};
    auto gap = [&](double x) { return std::abs(la.cdf(x - mu) - lb.cdf(x)); };
    double best = 0.0;
    if (sigma_a == 0.0 || sigma_b == 0.0) {
        // Jump of the point mass at its atom.
        const double atom = sigma_a == 0.0 ? mu : 0.0;
        const StableLaw& other = sigma_a == 0.0 ? lb : la;
        const double shift = sigma_a == 0.0 ? 0.0 : mu;
        if (sigma_a == 0.0 && sigma_b == 0.0) return mu == 0.0 ? 0.0 : 1.0;
        const double f = other.cdf(atom - shift);
        best = std::max(f, 1.0 - f);
        return best;
    }
    const double scale = std::max({sigma_a, sigma_b, std::abs(mu)});
    const int n = 801;
    const double zmax = std::asinh(1e6);
    const double h = 2.0 * zmax / (n - 1);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = gap(scale * std::sinh(-zmax + h * i));
        best = std::max(best, g[i]);
    }
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < n; ++i) {
        const bool peak = (i == 0 || g[i] >= g[i - 1]) && (i == n - 1 || g[i] >= g[i + 1]);
        if (!peak || g[i] == 0.0) continue;
        const double z = -zmax + h * i;
        double a = z - h, b = z + h;
        double c = b - r * (b - a), d = a + r * (b - a);
        double gc = gap(scale * std::sinh(c)), gd = gap(scale * std::sinh(d));
        for (int it = 0; it < 80; ++it) {
            if (gc > gd) { b = d; d = c; gd = gc; c = b - r * (b - a); gc = gap(scale * std::sinh(c)); }
            else { a = c; c = d; gc = gd; d = a + r * (b - a); gd = gap(scale * std::sinh(d)); }
        }
        best = std::max({best, gc, gd});
    }
    return best;
}

}  // namespace levyou
