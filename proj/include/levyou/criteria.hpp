#pragma once

// Series criteria for H-valuedness of the cylindrical noise and of the OU
// process, together with the log-moment sufficient condition and the
// weighted-space construction built on the f0 identities.
//
// Terms are evaluated from log(beta). Verdicts are certified through analytic
// envelopes  a_low * b(n) <= T(beta_n) <= a_up * b(n)  where T is the
// cylindrical term and b(n) is n^{-q} or rho^n; OU terms are then sandwiched
// by b(n)/gamma_n up to constants. Where no envelope is known, the
// integral-test heuristic runs on monotone terms and everything else is
// reported as Inconclusive.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levyou/levy_measure.hpp"
#include "levyou/model.hpp"
#include "levyou/numerics.hpp"
#include "levyou/parallel.hpp"

namespace levyou {

enum class CriterionKind { Cylindrical, OU, Sufficient };

inline const char* to_string(CriterionKind k) {
    switch (k) {
        case CriterionKind::Cylindrical: return "Cylindrical";
        case CriterionKind::OU: return "OU";
        default: return "Sufficient";
    }
}

struct CriterionReport {
    CriterionKind kind = CriterionKind::Cylindrical;
    std::vector<double> terms;
    std::vector<double> partial_sums;
    SeriesVerdict verdict;
    std::vector<std::string> notes;
};

/// K with psi_0(u)/u^2 + psi_1(u) = K u^{-alpha} for the stable family.
inline double stable_cylindrical_constant(const StableFamily& s) {
    return s.coef * (2.0 / (2.0 - s.alpha) + 2.0 / s.alpha);
}

// ---------------------------------------------------------------------------
// Single terms.

inline double cylindrical_term_log(const SymmetricLevyMeasure& m, double log_beta) {
    return psi0_scaled_at_log(m, -log_beta) + psi1_at_log(m, -log_beta);
}

/// beta^2 psi_0(1/beta) + psi_1(1/beta).
inline double cylindrical_term(const SymmetricLevyMeasure& m, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("cylindrical_term: beta must be positive");
    return cylindrical_term_log(m, std::log(beta));
}

/// (1/gamma) * int_0^{gamma t0} [psi_0(u)/u^2 + psi_1(u)] d sigma with u = e^sigma / beta,
/// which is the OU term after the substitution u = e^{gamma s}/beta.
/// With from_density the functionals are integrated from the density instead
/// of using their closed forms.
inline double ou_term_quadrature_log(const SymmetricLevyMeasure& m, double log_beta, double gamma,
                                     double t0 = 1.0, bool from_density = false) {
    if (!(gamma > 0.0) || !(t0 > 0.0)) throw std::invalid_argument("ou_term: gamma and t0 must be positive");
    const double upper = gamma * t0;
    std::vector<double> pts{0.0};
    for (double p = 1.0; p < upper; p *= 2.0) pts.push_back(p);
    auto add_break = [&](double log_y) {
        const double s = log_y + log_beta;
        if (s > 0.0 && s < upper) pts.push_back(s);
    };
    if (const auto* c = m.as<CompoundPoissonSymmetric>())
        for (const auto& a : c->atoms) add_break(std::log(a.location));
    if (const auto* t = m.as<TableDensity>())
        for (double k : t->knots) add_break(std::log(k));
    pts.push_back(upper);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto f = [&](double sigma) {
        const double lu = sigma - log_beta;
        if (from_density && m.has_density() && lu < 300.0) {
            const double u = std::exp(lu);
            return psi0_quadrature(m, u) / (u * u) + psi1_quadrature(m, u);
        }
        return psi0_scaled_at_log(m, lu) + psi1_at_log(m, lu);
    };
    QuadratureOptions opt{1e-14 * std::min(1.0, upper), 1e-11, 2000000};
    return integrate(f, pts, opt).value / gamma;
}

inline double ou_term_quadrature(const SymmetricLevyMeasure& m, double beta, double gamma, double t0 = 1.0,
                                 bool from_density = false) {
    if (!(beta > 0.0)) throw std::invalid_argument("ou_term: beta must be positive");
    return ou_term_quadrature_log(m, std::log(beta), gamma, t0, from_density);
}

/// (1/gamma) int_{1/beta}^{e^{gamma t0}/beta} (psi_0(u)/u^3 + psi_1(u)/u) du.
inline double ou_term_log(const SymmetricLevyMeasure& m, double log_beta, double gamma, double t0 = 1.0) {
    if (!(gamma > 0.0) || !(t0 > 0.0)) throw std::invalid_argument("ou_term: gamma and t0 must be positive");
    if (const auto* s = m.as<StableFamily>()) {
        const double a = s->alpha;
        return 4.0 * s->coef / (a * a * (2.0 - a)) * std::exp(a * log_beta) * (-std::expm1(-a * gamma * t0)) / gamma;
    }
    if (const auto* c = m.as<CompoundPoissonSymmetric>()) {
        const double log_L = -log_beta, log_U = gamma * t0 - log_beta;
        double v = 0.0;
        for (const auto& at : c->atoms) {
            const double ly = std::log(at.location);
            if (ly <= log_L)
                v += at.mass * std::exp(2.0 * (ly + log_beta)) * (-std::expm1(-2.0 * gamma * t0));
            else if (ly <= log_U)
                v += at.mass * (-std::expm1(2.0 * (ly - log_U)));
            if (ly > log_L) v += 2.0 * at.mass * std::min(gamma * t0, ly + log_beta);
        }
        return v / gamma;
    }
    return ou_term_quadrature_log(m, log_beta, gamma, t0);
}

inline double ou_term(const SymmetricLevyMeasure& m, double beta, double gamma, double t0 = 1.0) {
    if (!(beta > 0.0)) throw std::invalid_argument("ou_term: beta must be positive");
    return ou_term_log(m, std::log(beta), gamma, t0);
}

// ---------------------------------------------------------------------------
// Analytic envelopes.

namespace detail {

struct Envelope {
    bool geometric = false;
    double q = 0.0;      // b(n) = n^{-q}
    double rho = 1.0;    // b(n) = rho^n
    double a_up = kInf;  // kInf when only a lower bound is known
    double a_low = 0.0;
    double ou_rate = 2.0;  // T(beta e^{-gamma s}) >= e^{-ou_rate gamma s} T(beta)
    bool zero = false;
    std::string note;
};

struct InvGamma {
    bool log_law = false;
    double coef = 1.0;  // 1/gamma_n <= coef * n^{-q}, and gamma_n grows like n^q
    double q = 0.0;
};

inline double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

inline std::optional<InvGamma> inv_gamma_bound(const GammaRule& g) {
    if (const auto* p = std::get_if<PowerRule>(&g)) return InvGamma{false, 1.0 / p->c, p->p};
    if (std::holds_alternative<LogRule>(g)) return InvGamma{true, 1.0, 0.0};
    if (const auto* l = std::get_if<LaplacianRule>(&g)) {
        // Lattice points of the positive orthant own disjoint unit cubes inside the ball,
        // so gamma_n >= (n 2^d / omega_d)^{2/d}.
        const double d = l->d;
        return InvGamma{false, std::pow(unit_ball_volume(l->d) / std::pow(2.0, d), 2.0 / d), 2.0 / d};
    }
    return std::nullopt;
}

inline bool beta_nonincreasing(const BetaRule& b) {
    if (const auto* p = std::get_if<PowerRule>(&b)) return p->p >= 0.0;
    if (const auto* g = std::get_if<GeometricRule>(&b)) return g->r <= 1.0;
    return false;
}

inline std::optional<Envelope> term_envelope(const SymmetricLevyMeasure& m, const BetaRule& beta) {
    if (std::holds_alternative<ExplicitRule>(beta)) return std::nullopt;
    const auto* pw = std::get_if<PowerRule>(&beta);
    const auto* geo = std::get_if<GeometricRule>(&beta);
    const double c = pw ? pw->c : geo->c;
    Envelope e;
    e.geometric = geo != nullptr;
    if (const auto* s = m.as<StableFamily>()) {
        e.a_up = e.a_low = stable_cylindrical_constant(*s) * std::pow(c, s->alpha);
        if (pw) e.q = pw->p * s->alpha;
        else e.rho = std::pow(geo->r, s->alpha);
        e.ou_rate = s->alpha;
        e.note = "stable family: terms equal K beta_n^alpha exactly";
        return e;
    }
    const auto* cp = m.as<CompoundPoissonSymmetric>();
    if (!cp) return std::nullopt;
    if (cp->atoms.empty()) {
        e.zero = true;
        e.note = "zero measure: all terms vanish";
        return e;
    }
    if (beta_nonincreasing(beta)) {
        // beta_n <= c:  2 sum m_k min(y_k^2, 1/c^2) beta^2 <= T(beta) <= 2 sum m_k y_k^2 beta^2
        double k2 = 0.0, low = 0.0;
        for (const auto& a : cp->atoms) {
            k2 += 2.0 * a.mass * a.location * a.location;
            low = std::max(low, 2.0 * a.mass * std::min(a.location * a.location, 1.0 / (c * c)));
        }
        e.a_up = k2 * c * c;
        e.a_low = low * c * c;
        if (pw) e.q = 2.0 * pw->p;
        else e.rho = geo->r * geo->r;
        e.note = "compound Poisson: T(beta_n) comparable to beta_n^2";
        return e;
    }
    // Nondecreasing beta: T is nondecreasing, so every term is at least T(beta_1).
    e.a_low = cylindrical_term(m, c * (pw ? 1.0 : geo->r));
    e.q = 0.0;
    e.rho = 1.0;
    e.geometric = false;
    e.note = "compound Poisson with nondecreasing beta: terms bounded below by T(beta_1)";
    return e;
}

inline double envelope_tail(const Envelope& e, const InvGamma& g, double scale, std::size_t N) {
    const double n = static_cast<double>(N);
    if (e.geometric) {
        const double g_next = g.log_law ? 1.0 / std::log(n + 2.0) : g.coef * std::pow(n + 1.0, -g.q);
        return scale * e.a_up * g_next * std::pow(e.rho, n + 1.0) / (1.0 - e.rho);
    }
    if (g.log_law) return scale * e.a_up * std::pow(n, 1.0 - e.q) / ((e.q - 1.0) * std::log(n + 1.0));
    const double Q = e.q + g.q;
    return scale * e.a_up * g.coef * std::pow(n, 1.0 - Q) / (Q - 1.0);
}

/// Certificate for sum a_up-bounded terms b(n) g(n) where g(n) bounds the extra 1/gamma_n factor.
inline std::optional<TailCertificate> envelope_certificate(const Envelope& e, const InvGamma& g, double scale,
                                                           const std::string& what) {
    if (e.zero) return TailCertificate{TailCertificate::Kind::Convergent, [](std::size_t) { return 0.0; }, e.note};
    const bool has_upper = std::isfinite(e.a_up);
    bool converges = false, diverges = false;
    std::ostringstream note;
    note << e.note << "; ";
    if (e.geometric) {
        converges = has_upper && e.rho < 1.0;
        diverges = e.a_low > 0.0 && (e.rho > 1.0 || (e.rho == 1.0 && !g.log_law && g.q <= 1.0) ||
                                     (e.rho == 1.0 && g.log_law));
        note << what << " compared with a geometric series of ratio " << e.rho;
    } else {
        const double Q = e.q + (g.log_law ? 0.0 : g.q);
        converges = has_upper && Q > 1.0;
        diverges = e.a_low > 0.0 && Q <= 1.0;
        note << what << " compared with n^{-" << Q << "}" << (g.log_law ? " / log(n+1)" : "")
             << " by the integral test";
    }
    if (converges) {
        Envelope ec = e;
        InvGamma gc = g;
        return TailCertificate{TailCertificate::Kind::Convergent,
                               [ec, gc, scale](std::size_t N) { return envelope_tail(ec, gc, scale, N); },
                               note.str()};
    }
    if (diverges) return TailCertificate{TailCertificate::Kind::Divergent, {}, note.str()};
    return std::nullopt;
}

inline CriterionReport assemble(CriterionKind kind, std::vector<double> terms, double tol, bool monotone,
                                const std::optional<TailCertificate>& cert, std::vector<std::string> notes) {
    CriterionReport r;
    r.kind = kind;
    r.partial_sums.resize(terms.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) r.partial_sums[i] = (acc += terms[i]);
    r.verdict = classify_terms(terms, tol, monotone, cert);
    if (!r.verdict.note.empty()) notes.push_back(r.verdict.note);
    r.terms = std::move(terms);
    r.notes = std::move(notes);
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Series criteria.

inline CriterionReport cylindrical_criterion(const SymmetricLevyMeasure& m, const BetaRule& beta,
                                             std::size_t n_max, double tol, unsigned threads = 1) {
    if (n_max < 16) throw std::invalid_argument("cylindrical_criterion: n_max must be >= 16");
    validate(Spectrum{LogRule{}, beta});
    std::vector<double> terms(n_max);
    parallel_for(n_max, threads, [&](std::size_t i) { terms[i] = cylindrical_term_log(m, log_beta_at(beta, i + 1)); });

    std::optional<TailCertificate> cert;
    std::vector<std::string> notes;
    if (auto env = detail::term_envelope(m, beta))
        cert = detail::envelope_certificate(*env, detail::InvGamma{false, 1.0, 0.0}, 1.0, "cylindrical terms");
    const bool monotone = detail::beta_nonincreasing(beta);
    if (!cert) notes.push_back(monotone ? "no analytic envelope; integral-test heuristic on monotone terms"
                                        : "no analytic envelope and no monotonicity guarantee");
    return detail::assemble(CriterionKind::Cylindrical, std::move(terms), tol, monotone, cert, std::move(notes));
}

inline CriterionReport ou_criterion(const SymmetricLevyMeasure& m, const Spectrum& spectrum, std::size_t n_max,
                                    double tol, double t0 = 1.0, unsigned threads = 1) {
    if (n_max < 16) throw std::invalid_argument("ou_criterion: n_max must be >= 16");
    const Modes modes = make_modes(spectrum, n_max);
    std::vector<double> terms(n_max);
    parallel_for(n_max, threads, [&](std::size_t i) {
        terms[i] = ou_term_log(m, log_beta_at(spectrum.beta, i + 1), modes.gamma[i], t0);
    });

    std::optional<TailCertificate> cert;
    std::vector<std::string> notes;
    const auto env = detail::term_envelope(m, spectrum.beta);
    const auto inv = detail::inv_gamma_bound(spectrum.gamma);
    if (env && inv) {
        cert = detail::envelope_certificate(*env, *inv, 1.0 / env->ou_rate, "OU terms");
    }
    const bool monotone = detail::beta_nonincreasing(spectrum.beta) && inv.has_value();
    if (!cert) notes.push_back(monotone ? "no analytic envelope; integral-test heuristic on monotone terms"
                                        : "no analytic envelope and no monotonicity guarantee");
    if (t0 != 1.0) notes.push_back("time horizon t0 = " + std::to_string(t0));
    return detail::assemble(CriterionKind::OU, std::move(terms), tol, monotone, cert, std::move(notes));
}

struct SufficientReport {
    bool beta_bounded = false;
    bool log_moment_finite = false;
    double log_moment = 0.0;
    SeriesVerdict inv_gamma_summable;
    bool applies = false;
    std::vector<std::string> notes;
};

/// Checks bounded beta with a finite log moment above 1 against summability of 1/gamma_n.
inline SufficientReport sufficient_check(const SymmetricLevyMeasure& m, const Spectrum& spectrum, std::size_t n_max,
                                         double tol = 1e-2) {
    if (n_max < 16) throw std::invalid_argument("sufficient_check: n_max must be >= 16");
    SufficientReport r;
    if (const auto* p = std::get_if<PowerRule>(&spectrum.beta)) r.beta_bounded = p->p >= 0.0;
    else if (const auto* g = std::get_if<GeometricRule>(&spectrum.beta)) r.beta_bounded = g->r <= 1.0;
    else {
        r.beta_bounded = true;
        r.notes.push_back("explicit beta list: bounded on the supplied prefix");
    }
    r.log_moment = log_tail_moment(m);
    r.log_moment_finite = std::isfinite(r.log_moment);

    const Modes modes = make_modes(spectrum, n_max);
    std::vector<double> inv(n_max);
    for (std::size_t i = 0; i < n_max; ++i) inv[i] = 1.0 / modes.gamma[i];
    std::optional<TailCertificate> cert;
    if (auto g = detail::inv_gamma_bound(spectrum.gamma)) {
        if (!g->log_law && g->q > 1.0) {
            const auto gb = *g;
            cert = TailCertificate{TailCertificate::Kind::Convergent,
                                   [gb](std::size_t N) {
                                       return gb.coef * std::pow(static_cast<double>(N), 1.0 - gb.q) / (gb.q - 1.0);
                                   },
                                   "1/gamma_n <= C n^{-q} with q > 1"};
        } else {
            cert = TailCertificate{TailCertificate::Kind::Divergent, {},
                                   g->log_law ? "1/log(n+1) is not summable" : "gamma_n grows at most like n^q, q <= 1"};
        }
    }
    r.inv_gamma_summable = classify_terms(inv, tol, false, cert);
    r.applies = r.beta_bounded && r.log_moment_finite && r.inv_gamma_summable.verdict == Verdict::Converged;
    return r;
}

struct F0Result {
    double f0 = 0.0;
    double via_identity = 0.0;
    double f0_psi1_part = 0.0;
    double identity_psi1_part = 0.0;
};

/// f0(b) = int_1^b (psi_0(u)/u^3 + psi_1(u)/u) du by quadrature, and again from
///   int_1^b psi_1(u)/u du = 2 int_(1,b] log y nu(dy) + 2 log(b) nu((b, inf))
///   int_1^b psi_0(u)/u^3 du = nu((1,b]) + int_(0,1] y^2 nu(dy) - b^{-2} int_(0,b] y^2 nu(dy)
/// with nu restricted to the positive half-line.
inline F0Result f0_closed_form(const SymmetricLevyMeasure& m, double b) {
    if (!(b >= 1.0)) throw std::invalid_argument("f0_closed_form: b must be >= 1");
    F0Result r;
    if (b == 1.0) return r;
    const double lb = std::log(b);
    std::vector<double> pts{0.0};
    auto add_break = [&](double y) {
        if (y > 1.0 && y < b) pts.push_back(std::log(y));
    };
    if (const auto* c = m.as<CompoundPoissonSymmetric>())
        for (const auto& a : c->atoms) add_break(a.location);
    if (const auto* t = m.as<TableDensity>())
        for (double k : t->knots) add_break(k);
    pts.push_back(lb);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const QuadratureOptions opt{1e-14, 1e-12, 2000000};
    const double p0 = integrate([&](double t) { return psi0_scaled_at_log(m, t); }, pts, opt).value;
    r.f0_psi1_part = integrate([&](double t) { return psi1_at_log(m, t); }, pts, opt).value;
    r.f0 = p0 + r.f0_psi1_part;

    const double tail_mass = mass_above(m, b);
    r.identity_psi1_part = 2.0 * log_moment_between(m, 1.0, b) + 2.0 * lb * tail_mass;
    const double id0 = (mass_above(m, 1.0) - tail_mass) + second_moment_upto(m, 1.0) - second_moment_upto(m, b) / (b * b);
    r.via_identity = id0 + r.identity_psi1_part;
    return r;
}

inline double halving_target(std::size_t n) { return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 2000))); }

/// rho_n > 0 with cylindrical_term(m, rho_n beta_n) <= target(n); rho_n = 1 when already satisfied.
/// Any summable positive target gives a convergent weighted series; the default is 2^{-n}.
inline std::vector<double> admissible_weight(const SymmetricLevyMeasure& m, std::span<const double> betas,
                                             const std::function<double(std::size_t)>& target_of = halving_target) {
    std::vector<double> rho(betas.size(), 1.0);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw std::invalid_argument("admissible_weight: betas must be positive");
        const double lb = std::log(betas[i]);
        const double target = target_of(i + 1);
        if (!(target > 0.0) || !std::isfinite(target))
            throw std::invalid_argument("admissible_weight: target must be positive and finite at n = " +
                                        std::to_string(i + 1));
        auto ok = [&](double x) { return cylindrical_term_log(m, x + lb) <= target; };
        if (ok(0.0)) continue;
        double hi = 0.0, lo = -1.0, step = 1.0;
        while (!ok(lo)) {
            hi = lo;
            step *= 2.0;
            lo -= step;
            if (lo < -5000.0) {
                std::ostringstream msg;
                msg << "admissible_weight: no weight found for n = " << i + 1 << ", beta = " << betas[i]
                    << ", term at rho = e^-5000 still above " << target;
                throw std::runtime_error(msg.str());
            }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        rho[i] = std::exp(lo);
    }
    return rho;
}

}  // namespace levyou
