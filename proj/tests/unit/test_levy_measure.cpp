#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levyou/levy_measure.hpp"

using namespace levyou;

namespace {

/// Tempered alpha = 0.8, lambda = 2 references from the closed forms
///   psi(h)  = 2 Gamma(-a) (lambda^a - Re (lambda - i h)^a)
///   psi0(u) = 2 lambda^{a-2} gamma_lower(2 - a, lambda u)
///   psi1(u) = 2 lambda^a Gamma_upper(-a, lambda u)
/// evaluated in 30-digit arithmetic (mpmath).
struct TemperedRef {
    double x, value;
};
const TemperedRef kTemperedPsi[] = {{0.5, 0.0985773585680457500}, {1.0, 0.379832022263113666},
                                    {3.0, 2.63919904864546285}, {20.0, 28.5992216315950119}};
const TemperedRef kTemperedPsi0[] = {{0.1, 0.0944378066755012150}, {1.0, 0.653596695229660313}, {4.0, 0.798859522357096446}};
const TemperedRef kTemperedPsi1[] = {{0.1, 8.20734635978000414}, {1.0, 0.0788297723232193790}, {4.0, 2.295477897813958275e-05}};

SymmetricLevyMeasure stable_table(double alpha) {
    TableDensity t;
    for (double y : {0.5, 1.0, 2.0, 4.0}) {
        t.knots.push_back(y);
        t.values.push_back(std::pow(y, -1.0 - alpha));
    }
    t.near_zero = TableDensity::NearZero{1.0, alpha};
    t.tail = TableDensity::Tail{1.0, alpha, 0.0};
    return SymmetricLevyMeasure(t);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST(Psi, ZeroAtOrigin) {
    for (const auto& m : {SymmetricLevyMeasure::stable(1.3), SymmetricLevyMeasure::tempered(0.8, 2.0),
                          SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}}), stable_table(0.7)})
        EXPECT_EQ(psi(m, 0.0), 0.0);
}

TEST(Psi, CompoundPoissonAtPi) {
    EXPECT_NEAR(psi(SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}}), kPi), 4.0, 1e-14);
}

TEST(Psi, StableAlphaOneIsPi) {
    EXPECT_NEAR(psi(SymmetricLevyMeasure::stable(1.0), 1.0), kPi, 1e-10);
}

TEST(Psi, StableConstantMatchesGammaFormula) {
    // c_alpha = 2 Gamma(1 - a) cos(pi a / 2) / a for a != 1
    for (double a : {0.3, 0.5, 0.8, 1.2, 1.5, 1.9}) {
        const double oracle = 2.0 * std::tgamma(1.0 - a) * std::cos(kPi * a / 2.0) / a;
        EXPECT_LT(rel(SymmetricLevyMeasure::stable(a).stable_constant(), oracle), 1e-10) << a;
        EXPECT_LT(rel(psi(SymmetricLevyMeasure::stable(a, 2.5), 3.0), 2.5 * oracle * std::pow(3.0, a)), 1e-10) << a;
    }
}

TEST(Psi, TemperedAgainstClosedForm) {
    const auto m = SymmetricLevyMeasure::tempered(0.8, 2.0);
    for (const auto& r : kTemperedPsi) EXPECT_LT(rel(psi(m, r.x), r.value), 1e-8) << r.x;
    for (const auto& r : kTemperedPsi0) EXPECT_LT(rel(psi0(m, r.x), r.value), 1e-8) << r.x;
    for (const auto& r : kTemperedPsi1) EXPECT_LT(rel(psi1(m, r.x), r.value), 1e-8) << r.x;
}

TEST(Psi, EvenAndNonnegative) {
    for (const auto& m : {SymmetricLevyMeasure::stable(0.6), SymmetricLevyMeasure::tempered(1.4, 0.5),
                          SymmetricLevyMeasure::compound_poisson({{0.3, 2.0}, {5.0, 0.1}}), stable_table(1.1)}) {
        for (double h : {0.1, 1.0, 7.5, 40.0}) {
            EXPECT_GE(psi(m, h), 0.0);
            EXPECT_DOUBLE_EQ(psi(m, h), psi(m, -h));
        }
    }
}

TEST(Psi, TruncatedSecondMomentBound) {
    // 1 - cos x <= 2 min(1, x^2) gives psi(h) <= 2 (h^2 psi0(1/|h|) + psi1(1/|h|)); the factor 2 is attained in the limit
    for (const auto& m : {SymmetricLevyMeasure::stable(0.6), SymmetricLevyMeasure::stable(1.7),
                          SymmetricLevyMeasure::tempered(0.8, 2.0), SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}}),
                          stable_table(1.2)}) {
        for (double h : {0.05, 0.5, 1.0, 3.0, 30.0}) {
            const double bound = 2.0 * (h * h * psi0(m, 1.0 / h) + psi1(m, 1.0 / h));
            EXPECT_LE(psi(m, h), bound * (1.0 + 1e-12)) << m.kind() << " h=" << h;
        }
    }
}

TEST(Psi, ConstantOneBoundFailsForCompoundPoisson) {
    const auto m = SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}});
    EXPECT_NEAR(psi(m, 3.0), 2.0 * (1.0 - std::cos(3.0)), 1e-15);
    EXPECT_GT(psi(m, 3.0), 9.0 * psi0(m, 1.0 / 3.0) + psi1(m, 1.0 / 3.0));
}

TEST(Psi0Psi1, StableClosedForms) {
    const auto m = SymmetricLevyMeasure::stable(1.5);
    EXPECT_NEAR(psi0(m, 1.0), 4.0, 1e-14);
    EXPECT_NEAR(psi1(m, 1.0), 4.0 / 3.0, 1e-14);
    EXPECT_EQ(psi0(m, 0.0), 0.0);
    EXPECT_THROW(psi1(m, 0.0), std::domain_error);
}

TEST(Psi0Psi1, CompoundPoissonCounting) {
    const auto m = SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}});
    EXPECT_EQ(psi0(m, 0.5), 0.0);
    EXPECT_EQ(psi1(m, 0.5), 2.0);
    EXPECT_EQ(psi0(m, 0.0), 0.0);
    EXPECT_EQ(psi1(m, 0.0), 2.0);
    EXPECT_EQ(psi0(m, 1.0), 2.0);
    EXPECT_EQ(psi1(m, 1.0), 0.0);
}

TEST(Psi0Psi1, Monotone) {
    for (const auto& m : {SymmetricLevyMeasure::stable(0.9), SymmetricLevyMeasure::tempered(0.8, 2.0), stable_table(1.3),
                          SymmetricLevyMeasure::compound_poisson({{0.5, 1.0}, {2.0, 3.0}})}) {
        double p0 = 0.0, p1 = kInf;
        for (double u = 0.01; u < 100.0; u *= 1.7) {
            EXPECT_GE(psi0(m, u), p0 * (1.0 - 1e-14));
            EXPECT_LE(psi1(m, u), p1 * (1.0 + 1e-14));
            p0 = psi0(m, u);
            p1 = psi1(m, u);
        }
    }
}

TEST(Psi0Psi1, ClosedFormsMatchQuadrature) {
    for (double a : {0.5, 1.0, 1.5}) {
        const auto m = SymmetricLevyMeasure::stable(a);
        for (double u : {0.2, 1.0, 3.0}) {
            EXPECT_LT(rel(psi0_quadrature(m, u), psi0(m, u)), 1e-8);
            EXPECT_LT(rel(psi1_quadrature(m, u), psi1(m, u)), 1e-8);
        }
    }
}

TEST(Psi0Psi1, TableReencodingMatchesStable) {
    for (double a : {0.5, 1.0, 1.5}) {
        const auto m = SymmetricLevyMeasure::stable(a);
        const auto t = stable_table(a);
        for (double u : {0.1, 0.7, 1.0, 3.0, 10.0}) {
            EXPECT_LT(rel(psi0(t, u), psi0(m, u)), 1e-8);
            EXPECT_LT(rel(psi1(t, u), psi1(m, u)), 1e-8);
        }
        for (double h : {0.3, 1.0, 5.0}) EXPECT_LT(rel(psi(t, h), psi(m, h)), 1e-8) << a << " " << h;
    }
}

TEST(Psi0Psi1, LevyIntegralFinite) {
    for (const auto& m : {SymmetricLevyMeasure::stable(1.9), SymmetricLevyMeasure::tempered(0.8, 2.0), stable_table(0.4)})
        EXPECT_TRUE(std::isfinite(levy_integral(m)));
    EXPECT_NEAR(levy_integral(SymmetricLevyMeasure::stable(1.5)), 16.0 / 3.0, 1e-14);
}

TEST(ScalingCovariance, AllFamilies) {
    const double beta = 2.7;
    for (const auto& m : {SymmetricLevyMeasure::stable(1.2), SymmetricLevyMeasure::tempered(0.8, 2.0),
                          SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}, {0.4, 2.0}}), stable_table(0.9)}) {
        const auto img = image_under_scaling(m, beta);
        for (double h : {0.2, 1.0, 4.0}) EXPECT_LT(rel(psi(img, h), psi(m, beta * h)), 1e-8) << m.kind();
        for (double u : {0.3, 1.0, 5.0}) {
            EXPECT_NEAR(psi0(img, u), beta * beta * psi0(m, u / beta), 1e-9 * (1.0 + psi0(img, u))) << m.kind();
            EXPECT_NEAR(psi1(img, u), psi1(m, u / beta), 1e-9 * (1.0 + psi1(img, u))) << m.kind();
        }
    }
}

TEST(LogTailMoment, Examples) {
    EXPECT_EQ(log_tail_moment(SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}})), 0.0);
    EXPECT_NEAR(log_tail_moment(SymmetricLevyMeasure::stable(1.0)), 1.0, 1e-12);
    EXPECT_NEAR(log_tail_moment(SymmetricLevyMeasure::stable(1.5)), 1.0 / 2.25, 1e-12);
    // one-sided int_1^inf log(y) e^{-2y} y^{-1.8} dy, mpmath reference
    EXPECT_NEAR(log_tail_moment(SymmetricLevyMeasure::tempered(0.8, 2.0)), 0.00981747068741146698, 1e-12);
    EXPECT_NEAR(log_tail_moment(SymmetricLevyMeasure::compound_poisson({{std::exp(2.0), 0.5}})), 1.0, 1e-14);

    TableDensity t;
    t.knots = {0.5, 3.0};
    t.values = {1.0, 0.1};
    t.tail = TableDensity::Tail{1.0, 0.0, 1.5};
    EXPECT_TRUE(std::isinf(log_tail_moment(SymmetricLevyMeasure(t))));
    t.tail = TableDensity::Tail{1.0, 0.0, 2.5};
    EXPECT_TRUE(std::isfinite(log_tail_moment(SymmetricLevyMeasure(t))));
}

TEST(SupportsZero, Examples) {
    EXPECT_TRUE(supports_zero(SymmetricLevyMeasure::stable(0.4)));
    EXPECT_TRUE(supports_zero(SymmetricLevyMeasure::tempered(0.8, 2.0)));
    EXPECT_FALSE(supports_zero(SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}})));
    TableDensity gap;
    gap.knots = {0.1, 1.0};
    gap.values = {1.0, 1.0};
    EXPECT_FALSE(supports_zero(SymmetricLevyMeasure(gap)));
    TableDensity full = gap;
    full.near_zero = TableDensity::NearZero{1.0, 0.5};
    EXPECT_TRUE(supports_zero(SymmetricLevyMeasure(full)));
}

TEST(Validation, RejectsBadParameters) {
    EXPECT_THROW(SymmetricLevyMeasure::stable(2.0), std::invalid_argument);
    EXPECT_THROW(SymmetricLevyMeasure::stable(0.0), std::invalid_argument);
    EXPECT_THROW(SymmetricLevyMeasure::tempered(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(SymmetricLevyMeasure::compound_poisson({{-1.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(SymmetricLevyMeasure::compound_poisson({{1.0, 0.0}}), std::invalid_argument);
    TableDensity t;
    t.knots = {1.0, 0.5};
    t.values = {1.0, 1.0};
    EXPECT_THROW(SymmetricLevyMeasure{t}, std::invalid_argument);
}

TEST(SampleJumps, EmptyAboveAllAtoms) {
    Rng rng(1);
    EXPECT_TRUE(sample_jumps(SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}}), 2.0, 5.0, rng).empty());
}

TEST(SampleJumps, StableCountMeanAndSigns) {
    const auto m = SymmetricLevyMeasure::stable(1.5);
    const JumpSampler sampler(m, 1.0);
    EXPECT_NEAR(sampler.rate(), 4.0 / 3.0, 1e-14);
    const std::size_t M = 100000;
    Rng rng(2024);
    double count = 0.0, sign_sum = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const auto jumps = sampler(1.0, rng);
        count += jumps.size();
        for (std::size_t k = 0; k < jumps.size(); ++k) {
            EXPECT_GT(std::fabs(jumps[k].size), 1.0);
            EXPECT_GE(jumps[k].time, 0.0);
            EXPECT_LE(jumps[k].time, 1.0);
            if (k > 0) EXPECT_GE(jumps[k].time, jumps[k - 1].time);
            sign_sum += jumps[k].size > 0 ? 1.0 : -1.0;
        }
    }
    // Poisson(4/3): standard error of the mean sqrt(4/3 / M)
    EXPECT_NEAR(count / M, 4.0 / 3.0, 5.0 * std::sqrt(4.0 / 3.0 / M));
    EXPECT_LE(std::fabs(sign_sum / count), 4.0 / std::sqrt(count));
}

TEST(SampleJumps, MagnitudeLawMatchesTailMass) {
    // P(|J| > y) = psi1(y) / psi1(eps); one-sample KS at the 99.9% level 1.95/sqrt(n)
    std::vector<std::pair<SymmetricLevyMeasure, double>> cases{
        {SymmetricLevyMeasure::stable(0.7), 0.2},  {SymmetricLevyMeasure::tempered(0.8, 2.0), 0.1},
        {SymmetricLevyMeasure::tempered(1.2, 5.0), 1.0}, {stable_table(1.4), 0.3},
        {stable_table(1.4), 2.5}};
    for (const auto& [m, eps] : cases) {
        const JumpSampler sampler(m, eps);
        Rng rng(77);
        std::vector<double> mags;
        while (mags.size() < 20000)
            for (const auto& j : sampler(10.0, rng)) mags.push_back(std::fabs(j.size));
        const double total = psi1(m, eps);
        const double ks = ks_distance(mags, [&](double y) { return y <= eps ? 0.0 : 1.0 - psi1(m, y) / total; });
        EXPECT_LT(ks, 1.95 / std::sqrt(double(mags.size()))) << m.kind() << " eps=" << eps;
    }
}

TEST(SampleJumps, CompoundPoissonAtomFrequencies) {
    const auto m = SymmetricLevyMeasure::compound_poisson({{1.0, 1.0}, {2.0, 3.0}, {0.1, 5.0}});
    const JumpSampler sampler(m, 0.5);
    EXPECT_DOUBLE_EQ(sampler.rate(), 8.0);
    Rng rng(5);
    double n1 = 0, n2 = 0;
    for (int i = 0; i < 20000; ++i)
        for (const auto& j : sampler(1.0, rng)) (std::fabs(j.size) == 1.0 ? n1 : n2) += 1;
    const double n = n1 + n2;
    EXPECT_NEAR(n1 / n, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / n));
}
