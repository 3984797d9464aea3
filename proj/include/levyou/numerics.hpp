#pragma once

// Numerical plumbing shared by every other module. Quadrature and series
// classification live here next to the Monte Carlo diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levyou {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846264338327950288;

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult best)
        : std::runtime_error(what), best_(best) {}
    const QuadratureResult& best_estimate() const noexcept { return best_; }

private:
    QuadratureResult best_;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_evaluations = 400000;
};

namespace detail {

// 21-point Kronrod rule with embedded 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600647171180, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    std::array<double, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j)
        resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    resk *= half;
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    if (!std::isfinite(resk)) err = kInf;
    return {a, b, resk, err};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration over the finite pieces delimited by
/// `points` (sorted, at least two entries). A trailing +inf is mapped to a
/// finite interval with u = a + s/(1-s). Endpoints are never evaluated, so
/// integrable endpoint singularities are allowed.
inline QuadratureResult integrate(const RealFunction& f, std::span<const double> points,
                                  const QuadratureOptions& opt = {}) {
    if (points.size() < 2) throw std::invalid_argument("integrate: need at least two points");
    if (!(opt.abs_tol > 0.0) || !(opt.rel_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1]) || std::isinf(points[i]))
            throw std::invalid_argument("integrate: points must increase, only the last may be +inf");

    const bool semi_infinite = std::isinf(points.back());
    const double tail_start = semi_infinite ? points[points.size() - 2] : 0.0;
    std::size_t evals = 0;
    // Finite panels live in the original variable; the semi-infinite piece in s in [0,1].
    auto finite_f = [&](double x) { ++evals; return f(x); };
    auto tail_f = [&](double s) {
        ++evals;
        const double w = 1.0 - s;
        const double x = tail_start + s / w;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (w * w);
    };

    struct Tagged {
        detail::Panel p;
        bool tail;
        bool operator<(const Tagged& o) const { return p < o.p; }
    };
    std::priority_queue<Tagged> heap;
    double total = 0.0, total_err = 0.0;
    const std::size_t finite_end = semi_infinite ? points.size() - 2 : points.size() - 1;
    for (std::size_t i = 0; i < finite_end; ++i) {
        auto p = detail::gk21(finite_f, points[i], points[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push({p, false});
    }
    if (semi_infinite) {
        auto p = detail::gk21(tail_f, 0.0, 1.0);
        total += p.value;
        total_err += p.error;
        heap.push({p, true});
    }

    std::vector<Tagged> frozen;  // panels too narrow to split further
    auto done = [&] { return total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    while (!done() && !heap.empty()) {
        if (evals >= opt.max_evaluations) break;
        Tagged worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.p.a + worst.p.b);
        if (!(mid > worst.p.a && mid < worst.p.b) ||
            std::abs(worst.p.b - worst.p.a) <= 1e-13 * std::max(1.0, std::abs(mid))) {
            frozen.push_back(worst);
            continue;
        }
        detail::Panel l, r;
        if (worst.tail) {
            l = detail::gk21(tail_f, worst.p.a, mid);
            r = detail::gk21(tail_f, mid, worst.p.b);
        } else {
            l = detail::gk21(finite_f, worst.p.a, mid);
            r = detail::gk21(finite_f, mid, worst.p.b);
        }
        total += l.value + r.value - worst.p.value;
        total_err += l.error + r.error - worst.p.error;
        heap.push({l, worst.tail});
        heap.push({r, worst.tail});
    }
    // Re-sum to shed accumulated rounding from the incremental updates.
    double sum = 0.0, err = 0.0;
    for (const auto& t : frozen) { sum += t.p.value; err += t.p.error; }
    while (!heap.empty()) { sum += heap.top().p.value; err += heap.top().p.error; heap.pop(); }
    QuadratureResult res{sum, std::max(0.0, err), std::max<std::size_t>(evals, 1)};
    if (!std::isfinite(sum) || err > std::max(opt.abs_tol, opt.rel_tol * std::abs(sum)))
        throw QuadratureError("quadrature failed to reach tolerance", res);
    return res;
}

inline QuadratureResult integrate(const RealFunction& f, double a, double b,
                                  const QuadratureOptions& opt = {}) {
    if (!(a < b)) {
        if (a == b) return {0.0, 0.0, 1};
        throw std::invalid_argument("integrate: require a < b");
    }
    const std::array<double, 2> pts{a, b};
    return integrate(f, std::span<const double>(pts), opt);
}

inline QuadratureResult integrate(const RealFunction& f, double a, double b, double abs_tol,
                                  double rel_tol) {
    return integrate(f, a, b, QuadratureOptions{abs_tol, rel_tol});
}

/// Integral over (0, b] of a function with an integrable power-type
/// singularity at 0, computed after y = b e^{-t}.
inline QuadratureResult integrate_from_zero(const RealFunction& f, double b,
                                            const QuadratureOptions& opt = {}) {
    if (!(b > 0.0)) return {0.0, 0.0, 1};
    auto g = [&](double t) {
        const double y = b * std::exp(-t);
        if (y == 0.0) return 0.0;
        const double v = f(y) * y;
        // 0 * inf from underflow against a power singularity deep inside (0, 1e-150).
        return std::isnan(v) ? 0.0 : v;
    };
    return integrate(g, 0.0, kInf, opt);
}

// ---------------------------------------------------------------------------
// Wynn epsilon extrapolation of a sequence of partial sums.

struct Extrapolation {
    double value;
    double error;
};

inline double wynn_epsilon_estimate(std::span<const double> s) {
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    if (n < 3) return s.back();
    // prev = column j-1, cur = column j
    std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
    double best = s.back();
    for (std::size_t col = 1; cur.size() > 1; ++col) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
            const double diff = cur[k + 1] - cur[k];
            if (diff == 0.0) return (col % 2 == 1) ? cur[k + 1] : best;
            next[k] = prev[k + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0 && std::isfinite(cur.back())) best = cur.back();
    }
    return best;
}

inline Extrapolation wynn_epsilon(std::span<const double> partial_sums) {
    const std::size_t n = partial_sums.size();
    const double a = wynn_epsilon_estimate(partial_sums);
    if (n < 4) return {a, kInf};
    const double b = wynn_epsilon_estimate(partial_sums.first(n - 1));
    const double c = wynn_epsilon_estimate(partial_sums.first(n - 2));
    return {a, std::max(std::abs(a - b), std::abs(b - c))};
}

/// Integral of g(y) cos(omega y) over [a, inf) for g eventually monotone and
/// decaying to zero. Sums half-period panels between zeros of the cosine and
/// extrapolates the alternating partial sums.
inline QuadratureResult integrate_cos_tail(const RealFunction& g, double a, double omega,
                                           const QuadratureOptions& opt = {}) {
    if (omega == 0.0) throw std::invalid_argument("integrate_cos_tail: omega must be nonzero");
    omega = std::abs(omega);
    auto f = [&](double y) { return g(y) * std::cos(omega * y); };
    const double half_period = kPi / omega;
    double k0 = std::ceil(a / half_period - 0.5);
    double z = (k0 + 0.5) * half_period;
    if (z <= a) z += half_period;
    QuadratureOptions panel_opt = opt;
    panel_opt.abs_tol = opt.abs_tol * 1e-2;
    std::size_t evals = 0;
    double running = 0.0;
    if (z > a) {
        auto r = integrate(f, a, z, panel_opt);
        running += r.value;
        evals += r.evaluations;
    }
    std::vector<double> partial{running};
    double last_value = running, last_err = kInf;
    constexpr std::size_t kMaxPanels = 600;
    for (std::size_t k = 0; k < kMaxPanels; ++k) {
        auto r = integrate(f, z, z + half_period, panel_opt);
        evals += r.evaluations;
        running += r.value;
        partial.push_back(running);
        z += half_period;
        if (partial.size() >= 8) {
            // Wynn extrapolation over the trailing window.
            const std::size_t w = std::min<std::size_t>(partial.size(), 24);
            auto ex = wynn_epsilon(std::span<const double>(partial).last(w));
            last_value = ex.value;
            last_err = ex.error;
            if (last_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(last_value)))
                return {last_value, last_err, evals};
        }
    }
    throw QuadratureError("oscillatory tail did not converge", {last_value, last_err, evals});
}

// ---------------------------------------------------------------------------
// Series classification.

enum class Verdict { Converged, Diverged, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "Converged";
        case Verdict::Diverged: return "Diverged";
        default: return "Inconclusive";
    }
}

struct SeriesVerdict {
    Verdict verdict = Verdict::Inconclusive;
    double partial_sum = 0.0;
    std::optional<double> tail_bound;
    std::size_t terms_used = 0;
    std::string note;
};

/// Analytic knowledge about a series supplied by the caller. A convergent
/// certificate must return an upper bound on sum_{n > N} term(n).
struct TailCertificate {
    enum class Kind { Convergent, Divergent };
    Kind kind = Kind::Convergent;
    std::function<double(std::size_t)> tail_bound;
    std::string note;
};

inline SeriesVerdict classify_terms(std::span<const double> terms, double tol, bool monotone_hint,
                                    const std::optional<TailCertificate>& cert = std::nullopt) {
    SeriesVerdict out;
    double sum = 0.0, comp = 0.0;
    for (double t : terms) {
        if (!(t >= 0.0)) throw std::invalid_argument("classify_series: negative or NaN term");
        const double y = t - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    out.partial_sum = sum;
    out.terms_used = terms.size();
    const std::size_t n = terms.size();
    if (n == 0) return out;

    if (cert) {
        if (cert->kind == TailCertificate::Kind::Divergent) {
            out.verdict = Verdict::Diverged;
            out.note = cert->note;
            return out;
        }
        const double tail = cert->tail_bound(n);
        out.tail_bound = tail;
        out.note = cert->note;
        out.verdict = tail < tol ? Verdict::Converged : Verdict::Inconclusive;
        if (out.verdict == Verdict::Inconclusive)
            out.note += "; analytic tail bound exceeds tol at n_max";
        return out;
    }
    if (!monotone_hint) {
        out.note = "no tail certificate";
        return out;
    }
    // Terms must actually be nonincreasing over the second half for the
    // integral test to be meaningful.
    for (std::size_t i = n / 2; i + 1 < n; ++i) {
        if (terms[i + 1] > terms[i] * (1.0 + 1e-12) + 1e-300) {
            out.note = "monotone hint contradicted by the terms";
            return out;
        }
    }
    const double last = terms[n - 1];
    if (last == 0.0) {
        out.verdict = Verdict::Converged;
        out.tail_bound = 0.0;
        out.note = "monotone terms reached zero";
        return out;
    }
    const std::size_t half = n / 2;
    const double t_half = terms[half - 1];
    const double exponent = std::log(t_half / last) / std::log(static_cast<double>(n) / half);
    if (!(exponent > 1.0 + 1e-9)) {
        out.verdict = Verdict::Diverged;
        out.note = "integral test: local decay exponent " + std::to_string(exponent) + " <= 1";
        return out;
    }
    double tail = last * static_cast<double>(n) / (exponent - 1.0);
    const double prev = terms[n - 2];
    if (prev > 0.0) {
        const double r = last / prev;
        if (r < 1.0 && n >= 3 && terms[n - 3] > 0.0) {
            const double r_prev = prev / terms[n - 3];
            if (r <= r_prev * (1.0 + 1e-12)) tail = std::min(tail, last * r / (1.0 - r));
        }
    }
    out.tail_bound = tail;
    out.verdict = tail < tol ? Verdict::Converged : Verdict::Inconclusive;
    out.note = "integral test with extrapolated decay exponent " + std::to_string(exponent);
    return out;
}

inline SeriesVerdict classify_series(const std::function<double(std::size_t)>& term,
                                     std::size_t n_max, double tol, bool monotone_hint,
                                     const std::optional<TailCertificate>& cert = std::nullopt) {
    if (n_max < 16) throw std::invalid_argument("classify_series: n_max must be >= 16");
    std::vector<double> terms(n_max);
    for (std::size_t i = 0; i < n_max; ++i) terms[i] = term(i + 1);
    return classify_terms(terms, tol, monotone_hint, cert);
}

// ---------------------------------------------------------------------------
// Statistical diagnostics.

inline std::complex<double> empirical_cf(std::span<const double> samples, double h) {
    if (samples.empty()) throw std::invalid_argument("empirical_cf: empty sample");
    double re = 0.0, im = 0.0;
    for (double x : samples) {
        re += std::cos(h * x);
        im += std::sin(h * x);
    }
    const double m = static_cast<double>(samples.size());
    return {re / m, im / m};
}

/// One-sample Kolmogorov-Smirnov distance. Takes its own sorted copy.
inline double ks_distance(std::vector<double> samples, const RealFunction& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j + 1 < samples.size() && samples[j + 1] == samples[i]) ++j;
        const double f = std::clamp(cdf(samples[i]), 0.0, 1.0);
        d = std::max({d, static_cast<double>(j + 1) / m - f, f - static_cast<double>(i) / m});
        i = j + 1;
    }
    return std::clamp(d, 0.0, 1.0);
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

struct Interval {
    double low;
    double high;
};

inline Interval wilson_interval(std::size_t hits, std::size_t trials, double z = 1.959963984540054) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = hits / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Sample quantile, linear interpolation between order statistics (type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, q);
}

}  // namespace levyou
