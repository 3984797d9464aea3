#pragma once

// Symmetric one-dimensional Levy measures, stored by their restriction to
// (0, inf). The full measure is that restriction plus its mirror image, so
// every representable measure is symmetric and has no atom at 0.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "levyou/numerics.hpp"
#include "levyou/random.hpp"

namespace levyou {

/// One-sided density coef * y^{-1-alpha}.
struct StableFamily {
    double alpha = 1.0;
    double coef = 1.0;
};

/// One-sided density coef * e^{-lambda y} y^{-1-alpha}.
struct TemperedStable {
    double alpha = 1.0;
    double lambda = 1.0;
    double coef = 1.0;
};

struct Atom {
    double location;  // > 0, mirrored to -location
    double mass;      // > 0
};

/// Finitely many atoms; the empty list is the zero measure.
struct CompoundPoissonSymmetric {
    std::vector<Atom> atoms;
};

/// Piecewise one-sided density.
///   (0, knots[0]]         near_zero: coef * y^{-1-exponent}, or 0 when absent
///   [knots[i], knots[i+1]] values interpolated as a power law when both ends
///                          are positive, linearly otherwise
///   (knots.back(), inf)   tail: coef * y^{-1-exponent} * (log y)^{-log_power}, or 0
struct TableDensity {
    struct NearZero {
        double coef;
        double exponent;  // < 2
    };
    struct Tail {
        double coef;
        double exponent;        // >= 0
        double log_power = 0.0; // >= 0; exponent == 0 requires log_power > 1
    };
    std::vector<double> knots;
    std::vector<double> values;
    std::optional<NearZero> near_zero;
    std::optional<Tail> tail;
};

struct JumpRecord {
    double time;
    double size;
};

class SymmetricLevyMeasure {
public:
    using Family = std::variant<StableFamily, TemperedStable, CompoundPoissonSymmetric, TableDensity>;

    explicit SymmetricLevyMeasure(Family family);

    static SymmetricLevyMeasure stable(double alpha, double coef = 1.0) {
        return SymmetricLevyMeasure(StableFamily{alpha, coef});
    }
    static SymmetricLevyMeasure tempered(double alpha, double lambda, double coef = 1.0) {
        return SymmetricLevyMeasure(TemperedStable{alpha, lambda, coef});
    }
    static SymmetricLevyMeasure compound_poisson(std::vector<Atom> atoms) {
        return SymmetricLevyMeasure(CompoundPoissonSymmetric{std::move(atoms)});
    }
    static SymmetricLevyMeasure zero() { return compound_poisson({}); }

    const Family& family() const noexcept { return family_; }
    template <class T>
    const T* as() const noexcept { return std::get_if<T>(&family_); }

    bool is_stable() const noexcept { return as<StableFamily>() != nullptr; }
    bool has_density() const noexcept { return as<CompoundPoissonSymmetric>() == nullptr; }

    /// For the stable family: psi(h) = stable_constant() * coef * |h|^alpha,
    /// where the constant is the integral of (1 - cos y)|y|^{-1-alpha} over R.
    double stable_constant() const;

    /// One-sided density at y > 0 (zero for compound Poisson).
    double density(double y) const;

    std::string kind() const;

private:
    Family family_;
    double c_alpha_ = std::numeric_limits<double>::quiet_NaN();
};

// ---------------------------------------------------------------------------
namespace detail {

inline QuadratureOptions measure_quad() { return {1e-13, 1e-11, 2000000}; }

inline double table_density(const TableDensity& t, double y) {
    if (!(y > 0.0)) return 0.0;
    if (y <= t.knots.front()) {
        if (!t.near_zero) return 0.0;
        return t.near_zero->coef * std::pow(y, -1.0 - t.near_zero->exponent);
    }
    if (y > t.knots.back()) {
        if (!t.tail) return 0.0;
        double v = t.tail->coef * std::pow(y, -1.0 - t.tail->exponent);
        if (t.tail->log_power != 0.0) v *= std::pow(std::log(y), -t.tail->log_power);
        return v;
    }
    auto it = std::upper_bound(t.knots.begin(), t.knots.end(), y);
    std::size_t i = static_cast<std::size_t>(it - t.knots.begin());
    if (i >= t.knots.size()) i = t.knots.size() - 1;
    const std::size_t lo = i - 1;
    const double a = t.knots[lo], b = t.knots[i];
    const double pa = t.values[lo], pb = t.values[i];
    if (pa > 0.0 && pb > 0.0) {
        const double s = std::log(pb / pa) / std::log(b / a);
        return pa * std::pow(y / a, s);
    }
    return pa + (pb - pa) * (y - a) / (b - a);
}

inline void validate(const StableFamily& s) {
    if (!(s.alpha > 0.0 && s.alpha < 2.0)) throw std::invalid_argument("stable: alpha must lie in (0,2)");
    if (!(s.coef > 0.0 && std::isfinite(s.coef))) throw std::invalid_argument("stable: coef must be positive");
}
inline void validate(const TemperedStable& s) {
    if (!(s.alpha > 0.0 && s.alpha < 2.0)) throw std::invalid_argument("tempered: alpha must lie in (0,2)");
    if (!(s.lambda > 0.0 && std::isfinite(s.lambda))) throw std::invalid_argument("tempered: lambda must be positive");
    if (!(s.coef > 0.0 && std::isfinite(s.coef))) throw std::invalid_argument("tempered: coef must be positive");
}
inline void validate(const CompoundPoissonSymmetric& c) {
    for (const auto& a : c.atoms) {
        if (!(a.location > 0.0 && std::isfinite(a.location)))
            throw std::invalid_argument("cp: atom locations must be positive and finite");
        if (!(a.mass > 0.0 && std::isfinite(a.mass)))
            throw std::invalid_argument("cp: atom masses must be positive and finite");
    }
}
inline void validate(const TableDensity& t) {
    if (t.knots.empty()) throw std::invalid_argument("table: at least one knot required");
    if (t.knots.size() != t.values.size()) throw std::invalid_argument("table: knots/values size mismatch");
    for (std::size_t i = 0; i < t.knots.size(); ++i) {
        if (!(t.knots[i] > 0.0 && std::isfinite(t.knots[i]))) throw std::invalid_argument("table: knots must be positive");
        if (i > 0 && !(t.knots[i] > t.knots[i - 1])) throw std::invalid_argument("table: knots must increase");
        if (!(t.values[i] >= 0.0 && std::isfinite(t.values[i]))) throw std::invalid_argument("table: values must be >= 0");
    }
    if (t.near_zero) {
        if (!(t.near_zero->coef >= 0.0)) throw std::invalid_argument("table: near-zero coef must be >= 0");
        if (!(t.near_zero->exponent < 2.0)) throw std::invalid_argument("table: near-zero exponent must be < 2");
    }
    if (t.tail) {
        const auto& tl = *t.tail;
        if (!(tl.coef >= 0.0)) throw std::invalid_argument("table: tail coef must be >= 0");
        if (!(tl.exponent >= 0.0) || !(tl.log_power >= 0.0))
            throw std::invalid_argument("table: tail exponents must be >= 0");
        if (tl.exponent == 0.0 && !(tl.log_power > 1.0))
            throw std::invalid_argument("table: tail with exponent 0 needs log_power > 1");
        if (tl.log_power > 0.0 && !(t.knots.back() > 1.0))
            throw std::invalid_argument("table: logarithmic tail needs last knot > 1");
    }
}

// c * e^{-kappa t} * t^{-eta} * t^{k} integrated over [t1, t2], t2 possibly inf.
inline double log_tail_integral(double coef, double kappa, double eta, double k, double t1, double t2) {
    if (coef == 0.0 || !(t2 > t1)) return 0.0;
    auto f = [=](double t) {
        if (t <= 0.0 && (eta != 0.0 || k != 0.0)) return 0.0;
        double v = coef * std::exp(-kappa * t);
        if (eta != 0.0) v *= std::pow(t, -eta);
        if (k != 0.0) v *= std::pow(t, k);
        return v;
    };
    if (std::isfinite(t2)) return integrate(f, t1, t2, measure_quad()).value;
    if (kappa > 0.0) return integrate(f, t1, kInf, measure_quad()).value;
    // Algebraic decay t^{k-eta}: t = t1 w^{-q} turns it into a smooth integrand on (0,1].
    const double decay = eta - k;
    if (!(decay > 1.0) || !(t1 > 0.0)) return kInf;
    const double q = 2.0 / (decay - 1.0);
    auto g = [=](double w) {
        const double t = t1 * std::pow(w, -q);
        return f(t) * q * t / w;
    };
    return integrate(g, 0.0, 1.0, measure_quad()).value;
}

// Integral of G(y) * density over (a, b] for the stable and tempered families,
// split at 1: near zero via y = e^{-t}, above 1 via y = e^t.
// g(y) * coef * y^{-1-s}, with the power formed in log space.
inline double weighted_power(double gy, double coef, double s, double y) {
    if (gy == 0.0 || coef == 0.0) return 0.0;
    const double mag = std::exp(std::log(std::abs(gy) * coef) - (1.0 + s) * std::log(y));
    return gy > 0.0 ? mag : -mag;
}

template <class G>
double power_family_integral(double alpha, double lambda, double coef, G g, double a, double b) {
    double total = 0.0;
    const double lo_end = std::min(b, 1.0);
    if (a < lo_end) {
        auto f = [&](double y) { return weighted_power(g(y), coef, alpha, y) * std::exp(-lambda * y); };
        if (a == 0.0) total += integrate_from_zero(f, lo_end, measure_quad()).value;
        else {
            auto ft = [&](double t) { const double y = std::exp(t); return f(y) * y; };
            total += integrate(ft, std::log(a), std::log(lo_end), measure_quad()).value;
        }
    }
    const double hi_start = std::max(a, 1.0);
    if (b > hi_start) {
        auto ft = [&](double t) {
            const double y = std::exp(t);
            if (!std::isfinite(y)) return 0.0;
            return g(y) * coef * std::exp(-alpha * t - lambda * y);
        };
        total += integrate(ft, std::log(hi_start), std::isfinite(b) ? std::log(b) : kInf, measure_quad()).value;
    }
    return total;
}

// Integral of G(y) * density over (a, b] for a table density. `tail_k` is the
// power of t = log y that G grows like in the tail (0 for constants, 1 for
// log y); `g_of_t` evaluates G(e^t) without forming e^t.
template <class G, class GT>
double table_integral(const TableDensity& t, G g, GT g_of_t, double tail_k, double a, double b) {
    double total = 0.0;
    const double y0 = t.knots.front();
    if (t.near_zero && t.near_zero->coef > 0.0 && a < std::min(b, y0)) {
        const double hi = std::min(b, y0);
        const auto nz = *t.near_zero;
        auto f = [&](double y) { return weighted_power(g(y), nz.coef, nz.exponent, y); };
        if (a == 0.0) total += integrate_from_zero(f, hi, measure_quad()).value;
        else {
            auto ft = [&](double s) { const double y = std::exp(s); return f(y) * y; };
            total += integrate(ft, std::log(a), std::log(hi), measure_quad()).value;
        }
    }
    for (std::size_t i = 0; i + 1 < t.knots.size(); ++i) {
        const double lo = std::max(a, t.knots[i]), hi = std::min(b, t.knots[i + 1]);
        if (!(hi > lo)) continue;
        auto f = [&](double y) { return g(y) * table_density(t, y); };
        total += integrate(f, lo, hi, measure_quad()).value;
    }
    const double yk = t.knots.back();
    if (t.tail && t.tail->coef > 0.0 && b > std::max(a, yk)) {
        const double t1 = std::log(std::max(a, yk));
        const double t2 = std::isfinite(b) ? std::log(b) : kInf;
        const auto& tl = *t.tail;
        if (tail_k >= 0.0 && std::isinf(t2)) {
            // g_of_t grows like t^{tail_k}; fold it into the closed-form weight.
            const double v = log_tail_integral(tl.coef, tl.exponent, tl.log_power, tail_k, t1, t2);
            if (std::isinf(v)) return kInf;
            total += v;
        } else {
            auto f = [&](double s) {
                double v = tl.coef * std::exp(-tl.exponent * s) * g_of_t(s);
                if (tl.log_power != 0.0) v *= std::pow(s, -tl.log_power);
                return v;
            };
            total += integrate(f, t1, t2, measure_quad()).value;
        }
    }
    return total;
}

// Generic one-sided integral over (a, b] for density families.
template <class G, class GT>
double density_integral(const SymmetricLevyMeasure& m, G g, GT g_of_t, double tail_k, double a, double b) {
    if (const auto* s = m.as<StableFamily>()) return power_family_integral(s->alpha, 0.0, s->coef, g, a, b);
    if (const auto* s = m.as<TemperedStable>()) return power_family_integral(s->alpha, s->lambda, s->coef, g, a, b);
    if (const auto* t = m.as<TableDensity>()) return table_integral(*t, g, g_of_t, tail_k, a, b);
    throw std::logic_error("density_integral: measure has no density");
}

// psi(h) for density families: 2 * [ int_(0,A] (1-cos hy) p + mass(A,inf) - int_A^inf cos(hy) p ].
inline double psi_density(const SymmetricLevyMeasure& m, double h) {
    h = std::abs(h);
    if (h == 0.0) return 0.0;
    double tail_start = 1.0;
    if (const auto* t = m.as<TableDensity>()) tail_start = t->knots.back();
    else tail_start = std::max(1.0, kPi / h);
    auto one_minus_cos = [h](double y) { const double s = std::sin(0.5 * h * y); return 2.0 * s * s; };
    const double head = density_integral(m, one_minus_cos, [](double) { return 0.0; }, -1.0, 0.0, tail_start);
    const double mass = density_integral(m, [](double) { return 1.0; }, [](double) { return 1.0; }, 0.0,
                                         tail_start, kInf);
    double osc = 0.0;
    bool tail_present = true;
    if (const auto* t = m.as<TableDensity>()) tail_present = t->tail && t->tail->coef > 0.0;
    if (tail_present) {
        auto p = [&m](double y) { return m.density(y); };
        osc = integrate_cos_tail(p, tail_start, h, {1e-13, 1e-11, 2000000}).value;
    }
    return 2.0 * (head + mass - osc);
}

}  // namespace detail

namespace detail {

// Integral of (1 - cos y)|y|^{-1-alpha} over R.
inline double stable_psi_constant(double alpha) {
    const double split = kPi;
    auto one_minus_cos = [](double y) { const double s = std::sin(0.5 * y); return 2.0 * s * s; };
    const double head = power_family_integral(alpha, 0.0, 1.0, one_minus_cos, 0.0, split);
    const double mass = std::pow(split, -alpha) / alpha;
    auto p = [alpha](double y) { return std::pow(y, -1.0 - alpha); };
    const double osc = integrate_cos_tail(p, split, 1.0, {1e-14, 1e-12, 2000000}).value;
    return 2.0 * (head + mass - osc);
}

}  // namespace detail

inline SymmetricLevyMeasure::SymmetricLevyMeasure(Family family) : family_(std::move(family)) {
    std::visit([](const auto& f) { detail::validate(f); }, family_);
    if (const auto* s = as<StableFamily>()) c_alpha_ = detail::stable_psi_constant(s->alpha);
}

inline double SymmetricLevyMeasure::stable_constant() const {
    if (!is_stable()) throw std::logic_error("stable_constant: not a stable measure");
    return c_alpha_;
}

inline double SymmetricLevyMeasure::density(double y) const {
    y = std::abs(y);
    if (!(y > 0.0)) return 0.0;
    if (const auto* s = as<StableFamily>()) return s->coef * std::pow(y, -1.0 - s->alpha);
    if (const auto* s = as<TemperedStable>()) return s->coef * std::exp(-s->lambda * y) * std::pow(y, -1.0 - s->alpha);
    if (const auto* t = as<TableDensity>()) return detail::table_density(*t, y);
    return 0.0;
}

inline std::string SymmetricLevyMeasure::kind() const {
    switch (family_.index()) {
        case 0: return "stable";
        case 1: return "tempered";
        case 2: return "cp";
        default: return "table";
    }
}

// ---------------------------------------------------------------------------
// One-sided functionals of nu restricted to (0, inf).

/// nu((a, inf)) on the positive half-line.
inline double mass_above(const SymmetricLevyMeasure& m, double a) {
    if (const auto* s = m.as<StableFamily>()) return a > 0.0 ? s->coef * std::pow(a, -s->alpha) / s->alpha : kInf;
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms) if (at.location > a) v += at.mass;
        return v;
    }
    if (a <= 0.0) {
        if (m.as<TemperedStable>()) return kInf;
        const auto* t = m.as<TableDensity>();
        if (t->near_zero && t->near_zero->coef > 0.0 && t->near_zero->exponent >= 0.0) return kInf;
        a = 0.0;
    }
    return detail::density_integral(m, [](double) { return 1.0; }, [](double) { return 1.0; }, 0.0, a, kInf);
}

/// Integral of y^2 over (0, b] on the positive half-line.
inline double second_moment_upto(const SymmetricLevyMeasure& m, double b) {
    if (!(b > 0.0)) return 0.0;
    if (const auto* s = m.as<StableFamily>()) return s->coef * std::pow(b, 2.0 - s->alpha) / (2.0 - s->alpha);
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms) if (at.location <= b) v += at.mass * at.location * at.location;
        return v;
    }
    return detail::density_integral(m, [](double y) { return y * y; }, [](double t) { return std::exp(2.0 * t); },
                                    -1.0, 0.0, b);
}

/// Integral of log y over (a, b] on the positive half-line, a >= 1.
inline double log_moment_between(const SymmetricLevyMeasure& m, double a, double b) {
    a = std::max(a, 1.0);
    if (!(b > a)) return 0.0;
    if (const auto* s = m.as<StableFamily>()) {
        // antiderivative of log(y) y^{-1-alpha}: -y^{-alpha}(alpha log y + 1)/alpha^2
        const double al = s->alpha;
        auto F = [al](double y) {
            if (std::isinf(y)) return 0.0;
            return -std::pow(y, -al) * (al * std::log(y) + 1.0) / (al * al);
        };
        return s->coef * (F(b) - F(a));
    }
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms)
            if (at.location > a && at.location <= b) v += at.mass * std::log(at.location);
        return v;
    }
    if (const auto* t = m.as<TableDensity>(); t && std::isinf(b) && t->tail && t->tail->coef > 0.0) {
        // Declared tail decides finiteness: c y^{-1}(log y)^{-eta} has finite log moment iff eta > 2.
        if (t->tail->exponent == 0.0 && t->tail->log_power <= 2.0) return kInf;
    }
    return detail::density_integral(m, [](double y) { return std::log(y); }, [](double t) { return t; }, 1.0, a, b);
}

// ---------------------------------------------------------------------------
// Two-sided functionals.

/// psi(h) = int_R (1 - cos(h y)) nu(dy).
inline double psi(const SymmetricLevyMeasure& m, double h) {
    h = std::abs(h);
    if (h == 0.0) return 0.0;
    if (const auto* s = m.as<StableFamily>()) return m.stable_constant() * s->coef * std::pow(h, s->alpha);
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms) {
            const double sn = std::sin(0.5 * h * at.location);
            v += 2.0 * at.mass * 2.0 * sn * sn;
        }
        return v;
    }
    return detail::psi_density(m, h);
}

/// psi_0(u) = int_{|y| <= u} y^2 nu(dy).
inline double psi0(const SymmetricLevyMeasure& m, double u) {
    if (u < 0.0) throw std::invalid_argument("psi0: u must be >= 0");
    return 2.0 * second_moment_upto(m, u);
}

/// psi_1(u) = nu({|y| > u}).
inline double psi1(const SymmetricLevyMeasure& m, double u) {
    if (u < 0.0) throw std::invalid_argument("psi1: u must be >= 0");
    const double v = 2.0 * mass_above(m, u);
    if (std::isinf(v)) throw std::domain_error("psi1: infinite total mass");
    return v;
}

/// Quadrature of the density for psi_0 / psi_1, bypassing closed forms.
/// Compound Poisson measures have no density and fall back to atom sums.
inline double psi0_quadrature(const SymmetricLevyMeasure& m, double u) {
    if (!m.has_density()) return psi0(m, u);
    if (!(u > 0.0)) return 0.0;
    return 2.0 * detail::density_integral(m, [](double y) { return y * y; },
                                          [](double t) { return std::exp(2.0 * t); }, -1.0, 0.0, u);
}

inline double psi1_quadrature(const SymmetricLevyMeasure& m, double u) {
    if (!m.has_density()) return psi1(m, u);
    if (!(u > 0.0)) return psi1(m, u);
    return 2.0 * detail::density_integral(m, [](double) { return 1.0; }, [](double) { return 1.0; }, 0.0, u, kInf);
}

/// psi_0(u) / u^2 with u = e^{log_u}, safe for log_u far beyond the double range of u.
inline double psi0_scaled_at_log(const SymmetricLevyMeasure& m, double log_u) {
    if (const auto* s = m.as<StableFamily>()) return 2.0 * s->coef * std::exp(-s->alpha * log_u) / (2.0 - s->alpha);
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms)
            if (std::log(at.location) <= log_u)
                v += 2.0 * at.mass * std::exp(2.0 * (std::log(at.location) - log_u));
        return v;
    }
    if (log_u < 300.0) {
        const double u = std::exp(log_u);
        return psi0(m, u) / (u * u);
    }
    if (const auto* s = m.as<TemperedStable>()) {
        const double total = 2.0 * s->coef * std::pow(s->lambda, s->alpha - 2.0) * std::tgamma(2.0 - s->alpha);
        return total * std::exp(-2.0 * log_u);
    }
    const auto& t = *m.as<TableDensity>();
    const double yk = t.knots.back();
    double v = psi0(m, yk) * std::exp(-2.0 * log_u);
    if (t.tail && t.tail->coef > 0.0) {
        // 2c int_{log yk}^{L} e^{(2-kappa)s - 2L} s^{-eta} ds, with tau = L - s
        const auto tl = *t.tail;
        const double L = log_u;
        auto f = [&](double tau) {
            const double s = L - tau;
            double w = std::exp(-tl.exponent * L - (2.0 - tl.exponent) * tau);
            if (tl.log_power != 0.0) w *= std::pow(s, -tl.log_power);
            return 2.0 * tl.coef * w;
        };
        v += integrate(f, 0.0, L - std::log(yk), detail::measure_quad()).value;
    }
    return v;
}

/// psi_1(e^{log_u}), safe for very large log_u.
inline double psi1_at_log(const SymmetricLevyMeasure& m, double log_u) {
    if (const auto* s = m.as<StableFamily>()) return 2.0 * s->coef * std::exp(-s->alpha * log_u) / s->alpha;
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        double v = 0.0;
        for (const auto& at : c->atoms) if (std::log(at.location) > log_u) v += 2.0 * at.mass;
        return v;
    }
    if (log_u < 300.0) return psi1(m, std::exp(log_u));
    if (m.as<TemperedStable>()) return 0.0;
    const auto& t = *m.as<TableDensity>();
    if (!t.tail || t.tail->coef == 0.0) return 0.0;
    return 2.0 * detail::log_tail_integral(t.tail->coef, t.tail->exponent, t.tail->log_power, 0.0, log_u, kInf);
}

/// int_{(1, inf)} log(y) nu(dy) on the positive half-line (one-sided, as the
/// log-moment condition is displayed). +inf when divergent.
inline double log_tail_moment(const SymmetricLevyMeasure& m) { return log_moment_between(m, 1.0, kInf); }

/// int (1 ^ y^2) nu(dy) = psi_0(1) + psi_1(1).
inline double levy_integral(const SymmetricLevyMeasure& m) { return psi0(m, 1.0) + psi1(m, 1.0); }

/// True iff nu((0, delta)) > 0 for every delta > 0; decided from the representation.
inline bool supports_zero(const SymmetricLevyMeasure& m) {
    if (m.as<StableFamily>() || m.as<TemperedStable>()) return true;
    if (m.as<CompoundPoissonSymmetric>()) return false;
    const auto& t = *m.as<TableDensity>();
    return t.near_zero.has_value() && t.near_zero->coef > 0.0;
}

/// Image of nu under y -> beta*y.
inline SymmetricLevyMeasure image_under_scaling(const SymmetricLevyMeasure& m, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("image_under_scaling: beta must be positive");
    if (const auto* s = m.as<StableFamily>())
        return SymmetricLevyMeasure(StableFamily{s->alpha, s->coef * std::pow(beta, s->alpha)});
    if (const auto* s = m.as<TemperedStable>())
        return SymmetricLevyMeasure(TemperedStable{s->alpha, s->lambda / beta, s->coef * std::pow(beta, s->alpha)});
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        auto atoms = c->atoms;
        for (auto& a : atoms) a.location *= beta;
        return SymmetricLevyMeasure(CompoundPoissonSymmetric{std::move(atoms)});
    }
    TableDensity t = *m.as<TableDensity>();
    if (t.tail && t.tail->log_power != 0.0)
        throw std::invalid_argument("image_under_scaling: logarithmic tails are not closed under scaling");
    for (std::size_t i = 0; i < t.knots.size(); ++i) {
        t.knots[i] *= beta;
        t.values[i] /= beta;
    }
    if (t.near_zero) t.near_zero->coef *= std::pow(beta, t.near_zero->exponent);
    if (t.tail) t.tail->coef *= std::pow(beta, t.tail->exponent);
    return SymmetricLevyMeasure(std::move(t));
}

// ---------------------------------------------------------------------------
// Jump sampling.

namespace detail {

// Draw from density proportional to y^s on [a, b] (b may be inf when s < -1).
inline double sample_power(double s, double a, double b, Rng& rng) {
    const double u = rng.uniform();
    if (std::isinf(b)) return a * std::pow(u, 1.0 / (s + 1.0));
    if (std::abs(s + 1.0) < 1e-12) return a * std::pow(b / a, u);
    const double pa = std::pow(a, s + 1.0), pb = std::pow(b, s + 1.0);
    return std::pow(pa + u * (pb - pa), 1.0 / (s + 1.0));
}

class TableMagnitudeSampler {
public:
    TableMagnitudeSampler(const SymmetricLevyMeasure& m, double eps) : t_(*m.as<TableDensity>()) {
        // Segment masses above eps use the same quadrature as psi_1.
        auto seg_mass = [&](double a, double b) {
            return density_integral(m, [](double) { return 1.0; }, [](double) { return 1.0; }, 0.0, a, b);
        };
        const double y0 = t_.knots.front();
        if (t_.near_zero && t_.near_zero->coef > 0.0 && eps < y0)
            add({Kind::NearZero, eps, y0, -1.0 - t_.near_zero->exponent}, seg_mass(eps, y0));
        for (std::size_t i = 0; i + 1 < t_.knots.size(); ++i) {
            const double a = std::max(eps, t_.knots[i]), b = t_.knots[i + 1];
            if (!(b > a)) continue;
            const double pa = t_.values[i], pb = t_.values[i + 1];
            if (pa > 0.0 && pb > 0.0)
                add({Kind::Power, a, b, std::log(pb / pa) / std::log(t_.knots[i + 1] / t_.knots[i])}, seg_mass(a, b));
            else
                add({Kind::Linear, a, b, std::max(pa, pb)}, seg_mass(a, b));
        }
        if (t_.tail && t_.tail->coef > 0.0) {
            const double a = std::max(eps, t_.knots.back());
            add({Kind::Tail, a, kInf, 0.0}, seg_mass(a, kInf));
        }
    }

    double operator()(Rng& rng) const {
        const double pick = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick);
        if (it == cumulative_.end()) --it;
        const Seg& s = segs_[static_cast<std::size_t>(it - cumulative_.begin())];
        switch (s.kind) {
            case Kind::NearZero:
            case Kind::Power: return sample_power(s.param, s.a, s.b, rng);
            case Kind::Linear:
                for (;;) {
                    const double y = rng.uniform(s.a, s.b);
                    if (rng.uniform() * s.param <= table_density(t_, y)) return y;
                }
            case Kind::Tail: break;
        }
        const auto& tl = *t_.tail;
        if (tl.log_power == 0.0) return sample_power(-1.0 - tl.exponent, s.a, kInf, rng);
        const double t1 = std::log(s.a);
        double tt;
        if (tl.exponent > 0.0) {
            // density in t = log y is e^{-kappa t} t^{-eta}: exponential envelope, accept (t1/t)^eta
            do { tt = t1 + rng.exponential() / tl.exponent; } while (rng.uniform() > std::pow(t1 / tt, tl.log_power));
        } else {
            tt = t1 * std::pow(rng.uniform(), -1.0 / (tl.log_power - 1.0));
        }
        return std::min(std::exp(tt), 1e300);
    }

private:
    enum class Kind { NearZero, Power, Linear, Tail };
    struct Seg { Kind kind; double a, b, param; };
    void add(Seg s, double mass) {
        if (!(mass > 0.0)) return;
        segs_.push_back(s);
        cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + mass);
    }
    const TableDensity& t_;
    std::vector<Seg> segs_;
    std::vector<double> cumulative_;
};

}  // namespace detail

/// Draws the jumps of size |y| > eps of a Levy process with measure m. Set-up
/// (rates, segment masses) happens once; the measure must outlive the sampler.
class JumpSampler {
public:
    JumpSampler(const SymmetricLevyMeasure& m, double eps) : m_(&m), eps_(eps) {
        if (!(eps > 0.0)) throw std::invalid_argument("sample_jumps: eps must be positive");
        rate_ = psi1(m, eps);
        if (rate_ == 0.0) return;
        if (m.as<TableDensity>()) table_.emplace(m, eps);
        if (const auto* cp = m.as<CompoundPoissonSymmetric>()) {
            double acc = 0.0;
            for (const auto& a : cp->atoms) {
                if (a.location > eps) acc += a.mass;
                cp_cumulative_.push_back(acc);
            }
        }
    }

    double eps() const noexcept { return eps_; }
    /// Total intensity psi_1(eps) of the retained jumps.
    double rate() const noexcept { return rate_; }

    /// Jumps on [0, horizon], sorted by time; the count is Poisson with mean horizon * rate().
    std::vector<JumpRecord> operator()(double horizon, Rng& rng) const {
        if (!(horizon > 0.0)) throw std::invalid_argument("sample_jumps: horizon must be positive");
        std::vector<JumpRecord> out;
        if (rate_ == 0.0) return out;
        double time = 0.0;
        for (;;) {
            time += rng.exponential() / rate_;
            if (time > horizon) break;
            const double mag = magnitude(rng);
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            out.push_back({time, sign * mag});
        }
        return out;
    }

private:
    double magnitude(Rng& rng) const {
        const double eps = eps_;
        if (const auto* s = m_->as<StableFamily>()) return eps * std::pow(rng.uniform(), -1.0 / s->alpha);
        if (const auto* s = m_->as<TemperedStable>()) {
            if (s->lambda * eps <= 1.0) {
                for (;;) {
                    const double y = eps * std::pow(rng.uniform(), -1.0 / s->alpha);
                    if (rng.uniform() <= std::exp(-s->lambda * (y - eps))) return y;
                }
            }
            for (;;) {
                const double y = eps + rng.exponential() / s->lambda;
                if (rng.uniform() <= std::pow(y / eps, -1.0 - s->alpha)) return y;
            }
        }
        if (const auto* cp = m_->as<CompoundPoissonSymmetric>()) {
            const double pick = rng.uniform() * cp_cumulative_.back();
            const auto it = std::upper_bound(cp_cumulative_.begin(), cp_cumulative_.end(), pick);
            return cp->atoms[static_cast<std::size_t>(it - cp_cumulative_.begin())].location;
        }
        return (*table_)(rng);
    }

    const SymmetricLevyMeasure* m_;
    double eps_;
    double rate_ = 0.0;
    std::vector<double> cp_cumulative_;
    std::optional<detail::TableMagnitudeSampler> table_;
};

/// Jumps of size |y| > eps on [0, horizon], sorted by time.
inline std::vector<JumpRecord> sample_jumps(const SymmetricLevyMeasure& m, double eps, double horizon, Rng& rng) {
    return JumpSampler(m, eps)(horizon, rng);
}

}  // namespace levyou
