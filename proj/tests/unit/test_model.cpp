#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "levyou/model.hpp"

using namespace levyou;

TEST(LaplacianSpectrum, OneDimensional) {
    const auto s = laplacian_spectrum(1, 3);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].second, 1.0);
    EXPECT_EQ(s[1].second, 4.0);
    EXPECT_EQ(s[2].second, 9.0);
    EXPECT_EQ(s[2].first.n, 3u);
    EXPECT_EQ(s[2].first.multi, std::vector<int>{3});
}

TEST(LaplacianSpectrum, TwoDimensionalFirstAndTies) {
    const auto one = laplacian_spectrum(2, 1);
    EXPECT_EQ(one[0].first.multi, (std::vector<int>{1, 1}));
    EXPECT_EQ(one[0].second, 2.0);

    const auto s = laplacian_spectrum(2, 3);
    EXPECT_EQ(s[1].second, 5.0);
    EXPECT_EQ(s[2].second, 5.0);
    EXPECT_EQ(s[1].first.multi, (std::vector<int>{1, 2}));
    EXPECT_EQ(s[2].first.multi, (std::vector<int>{2, 1}));
}

TEST(LaplacianSpectrum, MatchesBruteForceEnumeration) {
    for (int d : {1, 2, 3}) {
        const std::size_t N = 200;
        const auto s = laplacian_spectrum(d, N);
        // brute force over a box large enough to contain the first N eigenvalues
        std::vector<std::pair<long, std::vector<int>>> all;
        const int L = d == 1 ? int(N) : 40;
        std::vector<int> j(d, 1);
        for (;;) {
            long sum = 0;
            for (int v : j) sum += long(v) * v;
            all.push_back({sum, j});
            int k = d - 1;
            while (k >= 0 && j[k] == L) j[k--] = 1;
            if (k < 0) break;
            ++j[k];
        }
        std::sort(all.begin(), all.end());
        std::set<std::vector<int>> seen;
        for (std::size_t i = 0; i < N; ++i) {
            EXPECT_EQ(s[i].second, double(all[i].first)) << d << " " << i;
            EXPECT_EQ(s[i].first.multi, all[i].second) << d << " " << i;
            EXPECT_TRUE(seen.insert(s[i].first.multi).second);
            if (i > 0) EXPECT_GE(s[i].second, s[i - 1].second);
        }
    }
}

TEST(Spectrum, GeneratedFamilies) {
    const auto pw = make_modes(Spectrum{PowerRule{2.0, 1.5}, PowerRule{3.0, 0.5}}, 4);
    EXPECT_DOUBLE_EQ(pw.gamma[3], 2.0 * std::pow(4.0, 1.5));
    EXPECT_DOUBLE_EQ(pw.beta[3], 3.0 / 2.0);
    const auto lg = make_modes(Spectrum{LogRule{}, GeometricRule{1.0, 0.5}}, 3);
    EXPECT_DOUBLE_EQ(lg.gamma[0], std::log(2.0));
    EXPECT_DOUBLE_EQ(lg.beta[2], 0.125);
    for (std::size_t i = 1; i < lg.size(); ++i) EXPECT_GT(lg.gamma[i], lg.gamma[i - 1]);
    EXPECT_EQ(log_beta_at(GeometricRule{1.0, 0.5}, 5000), 5000 * std::log(0.5));
}

TEST(Spectrum, ExplicitValidation) {
    EXPECT_THROW(validate(Spectrum{ExplicitRule{{1.0, -2.0}}, PowerRule{1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(validate(Spectrum{PowerRule{1.0, 1.0}, ExplicitRule{{1.0, 0.0}}}), std::invalid_argument);
    EXPECT_THROW(validate(Spectrum{PowerRule{1.0, 0.0}, PowerRule{1.0, 0.0}}), std::invalid_argument);
    EXPECT_NO_THROW(validate(Spectrum{ExplicitRule{{1.0, 2.0}}, ExplicitRule{{1.0, 2.0}}}));
    const Spectrum short_list{ExplicitRule{{1.0, 2.0}}, PowerRule{1.0, 0.0}};
    EXPECT_THROW(make_modes(short_list, 3), std::invalid_argument);
}

TEST(Eigenfunction, Values) {
    const std::vector<int> one{1};
    const std::vector<double> mid{kPi / 2.0};
    EXPECT_NEAR(eigenfunction_eval(one, mid), std::sqrt(2.0 / kPi), 1e-15);
    for (double b : {0.0, kPi}) {
        const std::vector<int> j{3, 2};
        const std::vector<double> xi{b, 1.0}, xi2{1.0, b};
        EXPECT_EQ(eigenfunction_eval(j, xi), 0.0);
        EXPECT_EQ(eigenfunction_eval(j, xi2), 0.0);
    }
}

TEST(Eigenfunction, Orthonormal) {
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
            const std::vector<int> ja{a}, jb{b};
            const auto r = integrate(
                [&](double x) {
                    const std::vector<double> xi{x};
                    return eigenfunction_eval(ja, xi) * eigenfunction_eval(jb, xi);
                },
                0.0, kPi);
            EXPECT_NEAR(r.value, a == b ? 1.0 : 0.0, 1e-12);
        }
}

TEST(FieldEval, LinearityAndBoundary) {
    const auto modes = make_modes(Spectrum{LaplacianRule{2}, PowerRule{1.0, 0.0}}, 6);
    const auto grid = uniform_grid(2, 9);
    EXPECT_EQ(grid.size(), 81u);
    const std::vector<double> zero(6, 0.0);
    for (double u : field_eval(modes, zero, grid)) EXPECT_EQ(u, 0.0);
    const std::vector<double> c{2.5};
    const auto f = field_eval(modes, c, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<int> j{1, 1};
        EXPECT_DOUBLE_EQ(f[g], 2.5 * eigenfunction_eval(j, grid[g]));
        const bool boundary = std::any_of(grid[g].begin(), grid[g].end(), [](double x) { return x == 0.0 || x == kPi; });
        if (boundary) EXPECT_EQ(f[g], 0.0);
    }
    const std::vector<double> a{1.0, -2.0, 0.5, 0.0, 3.0, 1.0}, b{0.3, 0.1, -1.0, 2.0, 0.0, -0.5};
    std::vector<double> ab(6);
    for (int i = 0; i < 6; ++i) ab[i] = 2.0 * a[i] - b[i];
    const auto fa = field_eval(modes, a, grid), fb = field_eval(modes, b, grid), fab = field_eval(modes, ab, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) EXPECT_NEAR(fab[g], 2.0 * fa[g] - fb[g], 1e-12);
}

TEST(FieldEval, GridParsevalImprovesWithRefinement) {
    const auto modes = make_modes(Spectrum{LaplacianRule{1}, PowerRule{1.0, 0.0}}, 5);
    const std::vector<double> c{1.0, -0.5, 0.25, 0.8, -0.3};
    double norm2 = 0.0;
    for (double x : c) norm2 += x * x;
    double prev_err = kInf;
    for (std::size_t pts : {5u, 9u, 17u, 33u}) {
        const auto grid = uniform_grid(1, pts);
        const auto u = field_eval(modes, c, grid);
        double sum = 0.0;
        for (double v : u) sum += v * v;
        const double err = std::fabs(sum * kPi / double(pts - 1) - norm2);
        EXPECT_LE(err, prev_err + 1e-14);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-12);
}
