#pragma once

// Galerkin truncation of X_t = e^{tA} x + Z_A(t) to the first N modes, with
// seeded trajectory ensembles: partial H-norm profiles, convergence to the
// invariant law, and ball-hitting (irreducibility) estimates.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyou/criteria.hpp"
#include "levyou/levy_measure.hpp"
#include "levyou/model.hpp"
#include "levyou/numerics.hpp"
#include "levyou/ou1d.hpp"
#include "levyou/parallel.hpp"
#include "levyou/random.hpp"
#include "levyou/stable.hpp"

namespace levyou {

struct SimulationOptions {
    double eps = 0.05;                // jump truncation for non-stable measures
    bool gaussian_surrogate = false;  // approximate the dropped small jumps
    bool force_general = false;       // use jump stepping even for stable measures
};

struct Model {
    Spectrum spectrum;
    std::shared_ptr<const SymmetricLevyMeasure> measure;
    SimulationOptions sim;
};

struct TruncatedState {
    double time = 0.0;
    std::vector<double> coords;
};

struct Ball {
    std::vector<double> center;
    double radius = 1.0;
};

struct EnsembleStats {
    struct NormQuantiles {
        std::size_t N;
        double time;
        double q25, q50, q75;
    };
    struct KsEntry {
        std::size_t n;  // 1-based mode index
        double time;
        double ks;
        double analytic_ks;  // NaN when no exact law is available
    };
    struct HitEntry {
        std::string label;
        std::size_t hits;
        std::size_t trials;
        Interval wilson;
    };
    std::uint64_t seed = 0;
    std::size_t trajectories = 0;
    std::vector<NormQuantiles> h_norm;
    std::vector<KsEntry> ks;
    std::vector<HitEntry> hits;
    std::vector<std::string> notes;
};

/// The model restricted to its first N modes.
class TruncatedSystem {
public:
    TruncatedSystem(Model model, std::size_t n_modes)
        : model_(std::move(model)), modes_(make_modes(model_.spectrum, n_modes)) {
        if (!model_.measure) throw std::invalid_argument("TruncatedSystem: measure missing");
        if (n_modes < 1) throw std::invalid_argument("TruncatedSystem: need at least one mode");
        exact_ = model_.measure->is_stable() && !model_.sim.force_general;
        if (!exact_) {
            if (!(model_.sim.eps > 0.0)) throw std::invalid_argument("TruncatedSystem: eps must be positive");
            jumps_.emplace(*model_.measure, model_.sim.eps);
        }
    }

    const Model& model() const noexcept { return model_; }
    const Modes& modes() const noexcept { return modes_; }
    std::size_t size() const noexcept { return modes_.size(); }
    bool exact() const noexcept { return exact_; }

    OUParams params(std::size_t i) const { return OUParams{modes_.gamma[i], modes_.beta[i], model_.measure}; }

    /// Exact law of coordinate i at time t from x0_i (stable measures only).
    StableLaw coordinate_law(std::size_t i, double t) const { return convolution_law(params(i), t); }
    StableLaw invariant_coordinate_law(std::size_t i) const { return invariant_law(params(i)); }

    /// Horizon after which mode i has forgotten its start up to a factor 1e-6.
    double invariant_horizon(std::size_t i) const { return std::log(1e6) / modes_.gamma[i]; }

    TruncatedState simulate(std::span<const double> x0, double t, Rng& rng) const {
        if (t < 0.0) throw std::invalid_argument("simulate: t must be >= 0");
        if (x0.size() > size()) throw std::invalid_argument("simulate: x0 longer than the truncation");
        TruncatedState s;
        s.coords.assign(size(), 0.0);
        std::copy(x0.begin(), x0.end(), s.coords.begin());
        step(s, t, rng);
        return s;
    }

    void step(TruncatedState& s, double h, Rng& rng) const {
        if (h < 0.0) throw std::invalid_argument("step: h must be >= 0");
        if (s.coords.size() != size()) throw std::invalid_argument("step: state has the wrong length");
        if (h == 0.0) return;
        for (std::size_t i = 0; i < size(); ++i) s.coords[i] = advance(i, s.coords[i], h, rng);
        s.time += h;
    }

    TruncatedState step(const TruncatedState& s, double h, Rng& rng) const {
        TruncatedState out = s;
        step(out, h, rng);
        return out;
    }

    /// One draw from the product invariant law: exact for stable measures,
    /// otherwise mode i is run from 0 over invariant_horizon(i).
    std::vector<double> sample_invariant(Rng& rng) const {
        std::vector<double> xi(size());
        for (std::size_t i = 0; i < size(); ++i) {
            if (exact_) xi[i] = invariant_coordinate_law(i).sample(rng);
            else xi[i] = advance(i, 0.0, invariant_horizon(i), rng);
        }
        return xi;
    }

    double advance(std::size_t i, double x, double h, Rng& rng) const {
        const OUParams p = params(i);
        if (exact_) return ou_step_exact_stable(x, h, p, rng);
        return ou_step_general(x, h, p, *jumps_, rng, model_.sim.gaussian_surrogate);
    }

private:
    Model model_;
    Modes modes_;
    bool exact_ = false;
    std::optional<JumpSampler> jumps_;
};

/// Full support of every coordinate law, decided from the Levy measure.
inline bool support_full_precheck(const SymmetricLevyMeasure& m) { return supports_zero(m); }

namespace detail {

inline std::vector<double> padded(std::span<const double> v, std::size_t n) {
    if (v.size() > n) throw std::invalid_argument("vector longer than the truncation");
    std::vector<double> out(n, 0.0);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

}  // namespace detail

/// Quantiles of S_N = sum_{n <= N} X_t(n)^2 over M trajectories for each N in N_grid.
inline EnsembleStats h_norm_profile(const TruncatedSystem& sys, std::span<const double> x0, double t,
                                    std::span<const std::size_t> N_grid, std::size_t M, std::uint64_t seed,
                                    unsigned threads = 1) {
    if (M < 100) throw std::invalid_argument("h_norm_profile: M must be >= 100");
    if (N_grid.empty()) throw std::invalid_argument("h_norm_profile: empty N grid");
    for (std::size_t k = 0; k < N_grid.size(); ++k) {
        if (N_grid[k] < 1 || N_grid[k] > sys.size()) throw std::invalid_argument("h_norm_profile: N out of range");
        if (k > 0 && !(N_grid[k] > N_grid[k - 1])) throw std::invalid_argument("h_norm_profile: N grid must increase");
    }
    const auto start = detail::padded(x0, sys.size());
    std::vector<std::vector<double>> sums(N_grid.size(), std::vector<double>(M));
    parallel_for(M, threads, [&](std::size_t m) {
        Rng rng = Rng::stream(seed, m);
        const auto state = sys.simulate(start, t, rng);
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < N_grid.size(); ++k) {
            for (; n < N_grid[k]; ++n) acc += state.coords[n] * state.coords[n];
            sums[k][m] = acc;
        }
    });
    EnsembleStats st;
    st.seed = seed;
    st.trajectories = M;
    for (std::size_t k = 0; k < N_grid.size(); ++k) {
        std::sort(sums[k].begin(), sums[k].end());
        st.h_norm.push_back({N_grid[k], t, quantile_sorted(sums[k], 0.25), quantile_sorted(sums[k], 0.5),
                             quantile_sorted(sums[k], 0.75)});
    }
    return st;
}

/// Per-time, per-coordinate KS distance between the simulated coordinate and
/// the invariant law. Stable measures use the exact invariant CDF and also
/// report the analytic KS between the exact time-t law and the invariant law;
/// other measures compare against an independent invariant sample.
inline EnsembleStats convergence_to_invariant(const TruncatedSystem& sys, std::span<const double> x0,
                                              std::span<const double> times, std::size_t n_coords, std::size_t M,
                                              std::uint64_t seed, unsigned threads = 1) {
    if (M < 1) throw std::invalid_argument("convergence_to_invariant: M must be >= 1");
    if (n_coords < 1 || n_coords > sys.size()) throw std::invalid_argument("convergence_to_invariant: bad n_coords");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0) throw std::invalid_argument("convergence_to_invariant: times must be >= 0");
        if (k > 0 && !(times[k] > times[k - 1])) throw std::invalid_argument("convergence_to_invariant: times must increase");
    }
    const auto start = detail::padded(x0, sys.size());
    const std::size_t T = times.size();
    // samples[k][i][m]
    std::vector<std::vector<std::vector<double>>> samples(T, std::vector<std::vector<double>>(n_coords, std::vector<double>(M)));
    parallel_for(M, threads, [&](std::size_t m) {
        Rng rng = Rng::stream(seed, m);
        TruncatedState s;
        s.coords = start;
        double now = 0.0;
        for (std::size_t k = 0; k < T; ++k) {
            sys.step(s, times[k] - now, rng);
            now = times[k];
            for (std::size_t i = 0; i < n_coords; ++i) samples[k][i][m] = s.coords[i];
        }
    });

    EnsembleStats st;
    st.seed = seed;
    st.trajectories = M;
    std::vector<std::vector<double>> reference;
    if (!sys.exact()) {
        reference.assign(n_coords, std::vector<double>(M));
        const std::uint64_t ref_seed = seed ^ 0x9e3779b97f4a7c15ULL;
        parallel_for(M, threads, [&](std::size_t m) {
            Rng rng = Rng::stream(ref_seed, m);
            for (std::size_t i = 0; i < n_coords; ++i)
                reference[i][m] = sys.advance(i, 0.0, sys.invariant_horizon(i), rng);
        });
        st.notes.push_back("non-stable measure: two-sample KS against an independent long-horizon invariant sample");
    }
    for (std::size_t k = 0; k < T; ++k) {
        for (std::size_t i = 0; i < n_coords; ++i) {
            double ks, analytic = std::numeric_limits<double>::quiet_NaN();
            if (sys.exact()) {
                const StableLaw inv = sys.invariant_coordinate_law(i);
                ks = ks_distance(samples[k][i], [&](double x) { return inv.cdf(x); });
                const double mu = std::exp(-sys.modes().gamma[i] * times[k]) * start[i];
                analytic = stable_ks_distance(inv.alpha, mu, sys.coordinate_law(i, times[k]).sigma, inv.sigma);
            } else {
                ks = ks_two_sample(samples[k][i], reference[i]);
            }
            st.ks.push_back({i + 1, times[k], ks, analytic});
        }
    }
    return st;
}

struct IrreducibilityResult {
    bool theorem_applies = false;
    std::string label;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double p_hat = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    double lower_bound = 0.0;  // best product P(head < eps) P(tail < r^2 - eps)
    std::size_t best_K = 0;
    double best_eps = 0.0;
    EnsembleStats stats;
};

/// Hit frequency of the open ball {|X_t - center|_N < r} with a Wilson interval,
/// plus the product lower bound over K in {1,2,4,8} and eps in {r^2/4, r^2/2, 3r^2/4}.
inline IrreducibilityResult irreducibility_estimate(const TruncatedSystem& sys, std::span<const double> x0,
                                                    const Ball& ball, double t, std::size_t M, std::uint64_t seed,
                                                    unsigned threads = 1) {
    if (!(ball.radius > 0.0)) throw std::invalid_argument("irreducibility_estimate: radius must be positive");
    if (M < 1) throw std::invalid_argument("irreducibility_estimate: M must be >= 1");
    const auto start = detail::padded(x0, sys.size());
    const auto center = detail::padded(ball.center, sys.size());
    const double r2 = ball.radius * ball.radius;
    std::vector<std::size_t> Ks;
    for (std::size_t K : {1u, 2u, 4u, 8u})
        if (K <= sys.size()) Ks.push_back(K);
    const std::array<double, 3> eps_grid{0.25 * r2, 0.5 * r2, 0.75 * r2};

    std::vector<double> total(M);
    std::vector<std::vector<double>> head(Ks.size(), std::vector<double>(M));
    parallel_for(M, threads, [&](std::size_t m) {
        Rng rng = Rng::stream(seed, m);
        const auto s = sys.simulate(start, t, rng);
        double acc = 0.0;
        std::size_t k = 0;
        for (std::size_t n = 0; n < sys.size(); ++n) {
            const double d = s.coords[n] - center[n];
            acc += d * d;
            if (k < Ks.size() && n + 1 == Ks[k]) head[k++][m] = acc;
        }
        total[m] = acc;
    });

    IrreducibilityResult r;
    r.theorem_applies = support_full_precheck(*sys.model().measure);
    r.label = r.theorem_applies ? "theorem applies" : "theorem not applicable; estimate only";
    r.trials = M;
    for (double v : total) r.hits += v < r2;
    r.p_hat = static_cast<double>(r.hits) / static_cast<double>(M);
    const Interval w = wilson_interval(r.hits, M);
    r.wilson_low = w.low;
    r.wilson_high = w.high;
    for (std::size_t k = 0; k < Ks.size(); ++k) {
        for (double e : eps_grid) {
            std::size_t a = 0, b = 0;
            for (std::size_t m = 0; m < M; ++m) {
                a += head[k][m] < e;
                b += (total[m] - head[k][m]) < r2 - e;
            }
            const double prod = (static_cast<double>(a) / M) * (static_cast<double>(b) / M);
            if (prod > r.lower_bound) {
                r.lower_bound = prod;
                r.best_K = Ks[k];
                r.best_eps = e;
            }
        }
    }
    r.stats.seed = seed;
    r.stats.trajectories = M;
    r.stats.hits.push_back({"ball", r.hits, M, w});
    r.stats.notes.push_back(r.label);
    return r;
}

}  // namespace levyou
