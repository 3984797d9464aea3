#pragma once

// Diagonal model data: A e_n = -gamma_n e_n and noise intensities beta_n,
// plus the Dirichlet Laplacian on [0, pi]^d and field reconstruction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "levyou/numerics.hpp"

namespace levyou {

struct ExplicitRule {
    std::vector<double> values;
};

/// gamma_n = c * n^p  (p > 0)   or   beta_n = c * n^{-p}  (any real p).
struct PowerRule {
    double c = 1.0;
    double p = 0.0;
};

/// beta_n = c * r^n  (r > 0).
struct GeometricRule {
    double c = 1.0;
    double r = 0.5;
};

/// gamma_n = log(n + 1).
struct LogRule {};

/// gamma_j = n_1^2 + ... + n_d^2, modes ordered by eigenvalue then lexicographically.
struct LaplacianRule {
    int d = 1;
};

using GammaRule = std::variant<ExplicitRule, PowerRule, LogRule, LaplacianRule>;
using BetaRule = std::variant<ExplicitRule, PowerRule, GeometricRule>;

struct Spectrum {
    GammaRule gamma = LaplacianRule{1};
    BetaRule beta = PowerRule{1.0, 0.0};
};

struct ModeIndex {
    std::size_t n = 0;       // 1-based linear index
    std::vector<int> multi;  // multi-index for the Laplacian, empty otherwise
};

/// First N modes of a spectrum, materialized.
struct Modes {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<ModeIndex> index;
    int dimension = 0;  // d for the Laplacian, 0 for abstract spectra

    std::size_t size() const noexcept { return gamma.size(); }
};

namespace detail {

inline void enumerate_lattice(int d, long budget, std::vector<int>& cur, long used,
                              std::vector<std::vector<int>>& out) {
    const int depth = static_cast<int>(cur.size());
    if (depth == d) {
        out.push_back(cur);
        return;
    }
    const long remaining_min = d - depth - 1;  // each later coordinate contributes at least 1
    for (int n = 1; used + static_cast<long>(n) * n + remaining_min <= budget; ++n) {
        cur.push_back(n);
        enumerate_lattice(d, budget, cur, used + static_cast<long>(n) * n, out);
        cur.pop_back();
    }
}

inline long sum_squares(const std::vector<int>& j) {
    long s = 0;
    for (int n : j) s += static_cast<long>(n) * n;
    return s;
}

}  // namespace detail

/// The N smallest Dirichlet eigenvalues on [0, pi]^d with their multi-indices,
/// multiplicities listed separately, ties broken lexicographically.
inline std::vector<std::pair<ModeIndex, double>> laplacian_spectrum(int d, std::size_t N) {
    if (d < 1) throw std::invalid_argument("laplacian_spectrum: d must be >= 1");
    if (N < 1) throw std::invalid_argument("laplacian_spectrum: N must be >= 1");
    long budget = d;
    std::vector<std::vector<int>> pts;
    for (;;) {
        pts.clear();
        std::vector<int> cur;
        detail::enumerate_lattice(d, budget, cur, 0, pts);
        if (pts.size() >= N) break;
        budget *= 2;
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        const long sa = detail::sum_squares(a), sb = detail::sum_squares(b);
        return sa != sb ? sa < sb : a < b;
    });
    std::vector<std::pair<ModeIndex, double>> out;
    out.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
        out.push_back({ModeIndex{i + 1, pts[i]}, static_cast<double>(detail::sum_squares(pts[i]))});
    return out;
}

inline void validate(const Spectrum& s) {
    std::visit(
        [](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, ExplicitRule>) {
                for (double v : g.values)
                    if (!(v > 0.0 && std::isfinite(v))) throw std::invalid_argument("spectrum: gammas must be positive");
            } else if constexpr (std::is_same_v<T, PowerRule>) {
                if (!(g.c > 0.0) || !(g.p > 0.0)) throw std::invalid_argument("spectrum: power law needs c > 0, p > 0");
            } else if constexpr (std::is_same_v<T, LaplacianRule>) {
                if (g.d < 1) throw std::invalid_argument("spectrum: laplacian needs d >= 1");
            }
        },
        s.gamma);
    std::visit(
        [](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ExplicitRule>) {
                for (double v : b.values)
                    if (!(v > 0.0 && std::isfinite(v))) throw std::invalid_argument("spectrum: betas must be positive");
            } else if constexpr (std::is_same_v<T, PowerRule>) {
                if (!(b.c > 0.0) || !std::isfinite(b.p)) throw std::invalid_argument("spectrum: beta power law needs c > 0");
            } else {
                if (!(b.c > 0.0) || !(b.r > 0.0) || !std::isfinite(b.r))
                    throw std::invalid_argument("spectrum: geometric beta needs c > 0, r > 0");
            }
        },
        s.beta);
}

/// log(beta_n); stays finite where beta_n itself would underflow.
inline double log_beta_at(const BetaRule& rule, std::size_t n) {
    if (n < 1) throw std::out_of_range("beta index starts at 1");
    if (const auto* e = std::get_if<ExplicitRule>(&rule)) {
        if (n > e->values.size()) throw std::invalid_argument("explicit beta list too short");
        return std::log(e->values[n - 1]);
    }
    if (const auto* g = std::get_if<GeometricRule>(&rule))
        return std::log(g->c) + static_cast<double>(n) * std::log(g->r);
    const auto& p = std::get<PowerRule>(rule);
    return std::log(p.c) - p.p * std::log(static_cast<double>(n));
}

inline double beta_at(const BetaRule& rule, std::size_t n) {
    if (const auto* e = std::get_if<ExplicitRule>(&rule)) {
        if (n > e->values.size()) throw std::invalid_argument("explicit beta list too short");
        return e->values[n - 1];
    }
    if (const auto* p = std::get_if<PowerRule>(&rule)) return p->c * std::pow(static_cast<double>(n), -p->p);
    return std::exp(log_beta_at(rule, n));
}

inline Modes make_modes(const Spectrum& s, std::size_t N) {
    validate(s);
    Modes m;
    m.gamma.resize(N);
    m.beta.resize(N);
    m.index.resize(N);
    if (const auto* lap = std::get_if<LaplacianRule>(&s.gamma)) {
        m.dimension = lap->d;
        auto spec = laplacian_spectrum(lap->d, N);
        for (std::size_t i = 0; i < N; ++i) {
            m.index[i] = std::move(spec[i].first);
            m.gamma[i] = spec[i].second;
        }
    } else {
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t n = i + 1;
            m.index[i].n = n;
            if (const auto* e = std::get_if<ExplicitRule>(&s.gamma)) {
                if (n > e->values.size()) throw std::invalid_argument("explicit gamma list too short");
                m.gamma[i] = e->values[i];
            } else if (const auto* p = std::get_if<PowerRule>(&s.gamma)) {
                m.gamma[i] = p->c * std::pow(static_cast<double>(n), p->p);
            } else {
                m.gamma[i] = std::log(static_cast<double>(n) + 1.0);
            }
        }
    }
    for (std::size_t i = 0; i < N; ++i) m.beta[i] = beta_at(s.beta, i + 1);
    return m;
}

/// e_j(xi) = (sqrt(2/pi))^d prod_i sin(n_i xi_i); exactly 0 on the boundary.
inline double eigenfunction_eval(std::span<const int> multi, std::span<const double> xi) {
    if (multi.size() != xi.size()) throw std::invalid_argument("eigenfunction_eval: dimension mismatch");
    double v = 1.0;
    const double norm = std::sqrt(2.0 / kPi);
    for (std::size_t i = 0; i < multi.size(); ++i) {
        if (xi[i] <= 0.0 || xi[i] >= kPi) return 0.0;
        v *= norm * std::sin(multi[i] * xi[i]);
    }
    return v;
}

using GridPoint = std::vector<double>;

/// Uniform tensor grid with `points_per_axis` nodes on [0, pi] per axis, endpoints exact.
inline std::vector<GridPoint> uniform_grid(int d, std::size_t points_per_axis) {
    if (points_per_axis < 2) throw std::invalid_argument("uniform_grid: need at least 2 points per axis");
    std::vector<double> axis(points_per_axis);
    for (std::size_t i = 0; i < points_per_axis; ++i)
        axis[i] = (i + 1 == points_per_axis) ? kPi : kPi * static_cast<double>(i) / (points_per_axis - 1);
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= points_per_axis;
    std::vector<GridPoint> grid(total, GridPoint(static_cast<std::size_t>(d)));
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (int k = d - 1; k >= 0; --k) {
            grid[flat][static_cast<std::size_t>(k)] = axis[rem % points_per_axis];
            rem /= points_per_axis;
        }
    }
    return grid;
}

/// u(xi) = sum_n coords[n] e_{j(n)}(xi) on every grid point.
inline std::vector<double> field_eval(const Modes& modes, std::span<const double> coords,
                                      std::span<const GridPoint> grid) {
    if (modes.dimension < 1) throw std::invalid_argument("field_eval: modes carry no spatial basis");
    if (coords.size() > modes.size()) throw std::invalid_argument("field_eval: more coords than modes");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double u = 0.0;
        for (std::size_t n = 0; n < coords.size(); ++n) {
            if (coords[n] == 0.0) continue;
            u += coords[n] * eigenfunction_eval(modes.index[n].multi, grid[g]);
        }
        out[g] = u;
    }
    return out;
}

}  // namespace levyou
