#pragma once

// Stochastic heat equation on [0, pi]^d with Dirichlet boundary conditions,
// driven by cylindrical symmetric Levy noise in the sine basis.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyou/criteria.hpp"
#include "levyou/cylindrical.hpp"
#include "levyou/model.hpp"

namespace levyou {

struct HeatScenario {
    int d = 1;
    std::size_t n_modes = 64;
    std::shared_ptr<const SymmetricLevyMeasure> measure;
    BetaRule beta = PowerRule{1.0, 0.0};
    std::vector<double> x0;              // initial datum in the sine basis
    std::size_t grid_points = 33;        // per axis, endpoints included
    std::size_t criterion_terms = 4096;
    double tol = 1e-3;
    SimulationOptions sim;
};

struct HeatResult {
    CriterionReport criterion;
    std::vector<double> times;
    std::vector<GridPoint> grid;
    std::vector<std::vector<double>> snapshots;  // trajectory 0, one field per time
    EnsembleStats stats;
};

/// Runs the OU criterion and M trajectories. Field snapshots come from
/// trajectory 0; partial-norm quantiles use N in {n/4, n/2, n}.
inline HeatResult run_scenario(const HeatScenario& s, std::span<const double> times, std::size_t M,
                               std::uint64_t seed, unsigned threads = 1) {
    if (!s.measure) throw std::invalid_argument("heat: measure missing");
    if (M < 1) throw std::invalid_argument("heat: M must be >= 1");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0) throw std::invalid_argument("heat: times must be >= 0");
        if (k > 0 && !(times[k] > times[k - 1])) throw std::invalid_argument("heat: times must increase");
    }
    const Spectrum spectrum{LaplacianRule{s.d}, s.beta};
    HeatResult out;
    out.criterion = ou_criterion(*s.measure, spectrum, s.criterion_terms, s.tol, 1.0, threads);
    out.times.assign(times.begin(), times.end());
    const TruncatedSystem sys(Model{spectrum, s.measure, s.sim}, s.n_modes);
    out.grid = uniform_grid(s.d, s.grid_points);
    const auto start = detail::padded(s.x0, sys.size());

    std::vector<std::size_t> Ns;
    for (std::size_t N : {s.n_modes / 4, s.n_modes / 2, s.n_modes})
        if (N >= 1 && (Ns.empty() || N > Ns.back())) Ns.push_back(N);

    const std::size_t T = times.size();
    std::vector<std::vector<std::vector<double>>> sums(T, std::vector<std::vector<double>>(Ns.size(), std::vector<double>(M)));
    std::vector<std::vector<double>> flagged(T);
    parallel_for(M, threads, [&](std::size_t m) {
        Rng rng = Rng::stream(seed, m);
        TruncatedState st;
        st.coords = start;
        double now = 0.0;
        for (std::size_t k = 0; k < T; ++k) {
            sys.step(st, times[k] - now, rng);
            now = times[k];
            double acc = 0.0;
            std::size_t n = 0;
            for (std::size_t j = 0; j < Ns.size(); ++j) {
                for (; n < Ns[j]; ++n) acc += st.coords[n] * st.coords[n];
                sums[k][j][m] = acc;
            }
            if (m == 0) flagged[k] = st.coords;
        }
    });
    for (std::size_t k = 0; k < T; ++k) out.snapshots.push_back(field_eval(sys.modes(), flagged[k], out.grid));

    out.stats.seed = seed;
    out.stats.trajectories = M;
    for (std::size_t k = 0; k < T; ++k)
        for (std::size_t j = 0; j < Ns.size(); ++j) {
            auto& v = sums[k][j];
            std::sort(v.begin(), v.end());
            out.stats.h_norm.push_back({Ns[j], times[k], quantile_sorted(v, 0.25), quantile_sorted(v, 0.5),
                                        quantile_sorted(v, 0.75)});
        }
    out.stats.notes.push_back(std::string("OU criterion verdict: ") + to_string(out.criterion.verdict.verdict));
    return out;
}

}  // namespace levyou
