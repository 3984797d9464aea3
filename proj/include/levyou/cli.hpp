#pragma once

// Command-line front end: check | simulate | invariant | irreducibility | heat.
// Exit codes: 0 ok, 2 configuration error, 3 diverged, 4 inconclusive,
// 5 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levyou/config.hpp"
#include "levyou/criteria.hpp"
#include "levyou/cylindrical.hpp"
#include "levyou/heat_example.hpp"

namespace levyou {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDiverged = 3, kExitInconclusive = 4, kExitNumerical = 5 };

namespace cli_detail {

inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json num_json(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

/// CSV writer: a comment line with seed and config hash, then the body.
class Csv {
public:
    Csv(const std::filesystem::path& path, std::uint64_t seed, const std::string& hash, const std::string& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << "# seed=" << seed << " config_hash=" << hash << "\n" << header << "\n";
    }
    template <class... Cells>
    void row(const Cells&... cells) {
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cells), ...);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline json verdict_json(const SeriesVerdict& v) {
    json j{{"verdict", to_string(v.verdict)}, {"partial_sum", num_json(v.partial_sum)}, {"terms_used", v.terms_used},
           {"note", v.note}};
    j["tail_bound"] = v.tail_bound ? num_json(*v.tail_bound) : json(nullptr);
    return j;
}

inline json report_json(const CriterionReport& r) {
    return json{{"kind", to_string(r.kind)}, {"verdict", verdict_json(r.verdict)}, {"notes", r.notes}};
}

inline json sufficient_json(const SufficientReport& s) {
    return json{{"beta_bounded", s.beta_bounded},
                {"log_moment_finite", s.log_moment_finite},
                {"log_moment", num_json(s.log_moment)},
                {"inv_gamma_summable", verdict_json(s.inv_gamma_summable)},
                {"applies", s.applies},
                {"notes", s.notes}};
}

inline void write_series_csv(const std::filesystem::path& p, const RunConfig& rc, const std::string& hash,
                             const CriterionReport& r) {
    Csv csv(p, rc.seed, hash, "n,term,partial_sum");
    for (std::size_t i = 0; i < r.terms.size(); ++i) csv.row(i + 1, num(r.terms[i]), num(r.partial_sums[i]));
}

inline void write_stats_csv(const std::filesystem::path& p, const RunConfig& rc, const std::string& hash,
                            const EnsembleStats& st) {
    Csv csv(p, rc.seed, hash, "quantity,n_or_N,time,value");
    for (const auto& q : st.h_norm) {
        csv.row("h_norm_q25", q.N, num(q.time), num(q.q25));
        csv.row("h_norm_q50", q.N, num(q.time), num(q.q50));
        csv.row("h_norm_q75", q.N, num(q.time), num(q.q75));
    }
    for (const auto& k : st.ks) {
        csv.row("ks", k.n, num(k.time), num(k.ks));
        if (!std::isnan(k.analytic_ks)) csv.row("analytic_ks", k.n, num(k.time), num(k.analytic_ks));
    }
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command, const RunConfig& rc,
                           const std::string& hash, json extra) {
    json m{{"command", command}, {"seed", rc.seed}, {"config_hash", hash}, {"config", rc.resolved}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

inline int verdict_exit(Verdict v, bool sufficient_applies) {
    if (v == Verdict::Converged) return kExitOk;
    if (v == Verdict::Diverged) return kExitDiverged;
    return sufficient_applies ? kExitOk : kExitInconclusive;
}

struct Context {
    RunConfig rc;
    std::string hash;
    std::filesystem::path out;
    unsigned threads = 0;
};

inline int cmd_check(const Context& c, std::ostream& log) {
    const auto& rc = c.rc;
    const auto cyl = cylindrical_criterion(*rc.measure, rc.spectrum.beta, rc.n_max, rc.tol, c.threads);
    const auto ou = ou_criterion(*rc.measure, rc.spectrum, rc.n_max, rc.tol, rc.t0, c.threads);
    const auto suff = sufficient_check(*rc.measure, rc.spectrum, rc.n_max);
    write_series_csv(c.out / "cylindrical.csv", rc, c.hash, cyl);
    write_series_csv(c.out / "ou.csv", rc, c.hash, ou);
    json report{{"seed", rc.seed},
                {"config_hash", c.hash},
                {"cylindrical", report_json(cyl)},
                {"ou", report_json(ou)},
                {"sufficient", sufficient_json(suff)}};
    std::ofstream(c.out / "check.json") << report.dump(2) << "\n";
    write_manifest(c.out, "check", rc, c.hash,
                   json{{"outputs", {"check.json", "cylindrical.csv", "ou.csv"}},
                        {"ou_verdict", to_string(ou.verdict.verdict)},
                        {"cylindrical_verdict", to_string(cyl.verdict.verdict)},
                        {"sufficient_applies", suff.applies}});
    log << "cylindrical: " << to_string(cyl.verdict.verdict) << "\nou: " << to_string(ou.verdict.verdict)
        << "\nsufficient condition applies: " << (suff.applies ? "yes" : "no") << "\n";
    return verdict_exit(ou.verdict.verdict, suff.applies);
}

inline int cmd_simulate(const Context& c, std::ostream& log) {
    const auto& rc = c.rc;
    if (rc.m < 100) throw ConfigError("m: simulate needs at least 100 trajectories");
    const TruncatedSystem sys(Model{rc.spectrum, rc.measure, rc.sim}, rc.n_modes);
    const auto st = h_norm_profile(sys, rc.x0, rc.t, rc.n_grid, rc.m, rc.seed, c.threads);
    write_stats_csv(c.out / "simulate.csv", rc, c.hash, st);
    json extra{{"outputs", {"simulate.csv"}}, {"exact_stable_stepping", sys.exact()}};
    if (!sys.exact()) {
        extra["approximation"] = rc.sim.gaussian_surrogate ? "jumps above eps plus Gaussian small-jump surrogate"
                                                           : "jumps above eps only; smaller jumps dropped";
        extra["dropped_psi0_eps"] = num_json(psi0(*rc.measure, rc.sim.eps));
    }
    write_manifest(c.out, "simulate", rc, c.hash, extra);
    log << "simulated " << rc.m << " trajectories in " << rc.n_modes << " modes\n";
    return kExitOk;
}

inline int cmd_invariant(const Context& c, std::ostream& log) {
    const auto& rc = c.rc;
    const TruncatedSystem sys(Model{rc.spectrum, rc.measure, rc.sim}, rc.n_modes);
    const auto suff = sufficient_check(*rc.measure, rc.spectrum, std::max<std::size_t>(rc.n_max, 16));
    const auto st = convergence_to_invariant(sys, rc.x0, rc.times, rc.n_coords, rc.m, rc.seed, c.threads);
    write_stats_csv(c.out / "invariant.csv", rc, c.hash, st);
    json extra{{"outputs", {"invariant.csv"}}, {"sufficient", sufficient_json(suff)}, {"notes", st.notes}};
    if (!suff.applies) extra["warning"] = "sufficient condition for an invariant measure not verified";
    write_manifest(c.out, "invariant", rc, c.hash, extra);
    log << "invariant-law KS distances written for " << rc.times.size() << " times\n";
    return kExitOk;
}

inline int cmd_irreducibility(const Context& c, std::ostream& log) {
    const auto& rc = c.rc;
    if (!rc.ball) throw ConfigError("ball: irreducibility needs a ball {center, radius}");
    const TruncatedSystem sys(Model{rc.spectrum, rc.measure, rc.sim}, rc.n_modes);
    const auto r = irreducibility_estimate(sys, rc.x0, *rc.ball, rc.t, rc.m, rc.seed, c.threads);
    {
        Csv csv(c.out / "irreducibility.csv", rc.seed, c.hash, "quantity,n_or_N,time,value");
        csv.row("hits", rc.n_modes, num(rc.t), r.hits);
        csv.row("p_hat", rc.n_modes, num(rc.t), num(r.p_hat));
        csv.row("wilson_low", rc.n_modes, num(rc.t), num(r.wilson_low));
        csv.row("wilson_high", rc.n_modes, num(rc.t), num(r.wilson_high));
        csv.row("product_lower_bound", r.best_K, num(rc.t), num(r.lower_bound));
        csv.row("product_best_eps", r.best_K, num(rc.t), num(r.best_eps));
    }
    write_manifest(c.out, "irreducibility", rc, c.hash,
                   json{{"outputs", {"irreducibility.csv"}},
                        {"label", r.label},
                        {"theorem_applies", r.theorem_applies},
                        {"p_hat", r.p_hat},
                        {"wilson_low", r.wilson_low},
                        {"wilson_high", r.wilson_high},
                        {"lower_bound", r.lower_bound}});
    log << r.label << "\np_hat = " << r.p_hat << " [" << r.wilson_low << ", " << r.wilson_high << "]\n";
    return kExitOk;
}

inline int cmd_heat(const Context& c, std::ostream& log) {
    const auto& rc = c.rc;
    const auto* lap = std::get_if<LaplacianRule>(&rc.spectrum.gamma);
    if (!lap) throw ConfigError("spectrum: heat needs a laplacian spectrum");
    HeatScenario s;
    s.d = lap->d;
    s.n_modes = rc.n_modes;
    s.measure = rc.measure;
    s.beta = rc.spectrum.beta;
    s.x0 = rc.x0;
    s.grid_points = rc.grid;
    s.criterion_terms = rc.n_max;
    s.tol = rc.tol;
    s.sim = rc.sim;
    const auto res = run_scenario(s, rc.times, rc.m, rc.seed, c.threads);
    std::vector<std::string> outputs{"heat.csv"};
    std::string header;
    for (int k = 1; k <= s.d; ++k) header += "xi" + std::to_string(k) + ",";
    header += "u";
    for (std::size_t k = 0; k < res.times.size(); ++k) {
        const std::string name = "snapshot_" + std::to_string(k) + ".csv";
        outputs.push_back(name);
        std::ofstream out(c.out / name);
        out << "# seed=" << rc.seed << " config_hash=" << c.hash << " time=" << num(res.times[k]) << "\n"
            << header << "\n";
        for (std::size_t g = 0; g < res.grid.size(); ++g) {
            for (double x : res.grid[g]) out << num(x) << ",";
            out << num(res.snapshots[k][g]) << "\n";
        }
    }
    write_stats_csv(c.out / "heat.csv", rc, c.hash, res.stats);
    write_manifest(c.out, "heat", rc, c.hash,
                   json{{"outputs", outputs},
                        {"ou_criterion", report_json(res.criterion)},
                        {"times", res.times},
                        {"snapshot_trajectory", 0}});
    log << "heat d=" << s.d << ": OU verdict " << to_string(res.criterion.verdict.verdict) << ", "
        << res.times.size() << " snapshots\n";
    return kExitOk;
}

inline void error_json(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace cli_detail

/// Runs the command line; never throws.
inline int run_cli(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Ornstein-Uhlenbeck processes driven by cylindrical symmetric Levy noise"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string config_path, out_dir = "levyou_out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads, 0 = all cores (never changes results)");
    app.add_option("--out", out_dir, "output directory");
    const std::vector<std::string> names{"check", "simulate", "invariant", "irreducibility", "heat"};
    for (const auto& n : names) app.add_subcommand(n);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        log << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        cli_detail::error_json(err, "usage", e.what());
        return kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    cli_detail::Context ctx;
    try {
        json user = config_path.empty() ? json::object() : load_json_file(config_path);
        if (seed) {
            if (!user.is_object()) throw ConfigError("config: top level must be an object");
            user["seed"] = *seed;
        }
        ctx.rc = parse_config(user);
        ctx.hash = config_hash(ctx.rc.resolved);
        ctx.out = out_dir;
        ctx.threads = threads;
        std::filesystem::create_directories(ctx.out);
    } catch (const ConfigError& e) {
        cli_detail::error_json(err, "config", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        cli_detail::error_json(err, "config", e.what());
        return kExitConfig;
    }
    try {
        if (command == "check") return cli_detail::cmd_check(ctx, log);
        if (command == "simulate") return cli_detail::cmd_simulate(ctx, log);
        if (command == "invariant") return cli_detail::cmd_invariant(ctx, log);
        if (command == "irreducibility") return cli_detail::cmd_irreducibility(ctx, log);
        return cli_detail::cmd_heat(ctx, log);
    } catch (const ConfigError& e) {
        cli_detail::error_json(err, "config", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        cli_detail::error_json(err, "config", e.what());
        return kExitConfig;
    } catch (const QuadratureError& e) {
        cli_detail::error_json(err, "numerical", std::string(e.what()) + " (best estimate " +
                                                     cli_detail::num(e.best_estimate().value) + ", error " +
                                                     cli_detail::num(e.best_estimate().error_estimate) + ")");
        return kExitNumerical;
    } catch (const std::exception& e) {
        cli_detail::error_json(err, "numerical", e.what());
        return kExitNumerical;
    }
}

}  // namespace levyou
