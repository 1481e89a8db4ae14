#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tyrefield/quadrature.hpp"

using namespace tyrefield;
using cd = std::complex<double>;

TEST(GaussLegendre, MatchesGolubWelsch)
{
    for (int n : {1, 2, 5, 16, 64, 128}) {
        const GaussRule& g = gauss_legendre(n);
        const oracle::Rule r = oracle::golub_welsch(n);
        ASSERT_EQ(g.nodes.size(), std::size_t(n));
        // library nodes are ascending, as are the eigenvalues
        for (int k = 0; k < n; ++k) {
            EXPECT_NEAR(g.nodes[k], r.x[k], 1e-13) << "n=" << n << " k=" << k;
            EXPECT_NEAR(g.weights[k], r.w[k], 1e-13) << "n=" << n << " k=" << k;
        }
    }
}

TEST(GaussLegendre, ExactForDegreeTwoNMinusOne)
{
    for (int n : {3, 8, 64}) {
        for (int d = 0; d < 2 * n; d += std::max(1, n / 4)) {
            const double q = integrate_unit([d](double x) { return std::pow(x, d); }, n);
            EXPECT_NEAR(q, 1.0 / (d + 1), 1e-14) << "n=" << n << " degree=" << d;
        }
    }
}

TEST(GaussLegendre, RejectsNonPositiveOrder) { EXPECT_THROW(gauss_legendre(0), std::invalid_argument); }

TEST(Trapezoid, WeightsSumToOneWithHalfEnds)
{
    const auto w = trapezoid_weights(50);
    ASSERT_EQ(w.size(), 51u);
    double s = 0.0;
    for (double x : w) s += x;
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(w.front(), 0.01);
    EXPECT_DOUBLE_EQ(w[1], 0.02);
}

TEST(ExpMoments, AgreeWithQuadrature)
{
    const oracle::Rule r = oracle::golub_welsch(96);
    const cd samples[] = {{0.0, 0.0},  {1e-9, 0.0}, {0.3, -0.2}, {-4.0, 1.0},  {2.5, 30.0},
                          {-60.0, 5.0}, {0.0, 120.0}, {-1.0, -7.0}, {12.0, 0.0}, {-0.01, 0.02}};
    for (const cd& s : samples) {
        cd F[kMaxMoment + 1];
        exp_moments(s, 12, F);
        for (int k = 0; k <= 12; ++k) {
            cd q = 0.0;
            for (std::size_t j = 0; j < r.x.size(); ++j) q += r.w[j] * std::pow(r.x[j], k) * std::exp(s * r.x[j]);
            if (std::abs(s) > 60.0) continue;  // oscillation exceeds what 96 nodes resolve
            EXPECT_LE(std::abs(F[k] - q), 1e-12 * std::max(1.0, std::abs(q))) << "s=" << s << " k=" << k;
            EXPECT_LE(std::abs(exp_moment(k, s) - F[k]), 1e-14 * std::max(1.0, std::abs(F[k])));
        }
    }
}

TEST(ExpMoments, LargeArgumentAgainstClosedForm)
{
    // F_0(s) = (e^s - 1)/s, F_1(s) = (e^s (s - 1) + 1)/s^2
    for (cd s : {cd(0.0, 400.0), cd(-300.0, 50.0), cd(40.0, -250.0)}) {
        const cd F0 = (std::exp(s) - 1.0) / s;
        const cd F1 = (std::exp(s) * (s - 1.0) + 1.0) / (s * s);
        EXPECT_LE(std::abs(exp_moment(0, s) - F0), 1e-13 * std::abs(F0));
        EXPECT_LE(std::abs(exp_moment(1, s) - F1), 1e-12 * std::abs(F1));
    }
}

TEST(ExpMoments, DividedDifferenceIsContinuousAtZero)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int t = 0; t < 50; ++t) {
        const cd r(u(rng), u(rng));
        for (int k = 0; k < 4; ++k) {
            // h -> 0 limit is dF_k/ds = F_{k+1}
            const cd lim = exp_moment(k + 1, r);
            EXPECT_LE(std::abs(exp_moment_dd(k, r, 0.0) - lim), 1e-12 * std::max(1.0, std::abs(lim)));
            EXPECT_LE(std::abs(exp_moment_dd(k, r, cd(1e-9, -1e-9)) - lim), 1e-7 * std::max(1.0, std::abs(lim)));
            const cd h(u(rng), u(rng));
            const cd dd = (exp_moment(k, r + h) - exp_moment(k, r)) / h;
            EXPECT_LE(std::abs(exp_moment_dd(k, r, h) - dd), 1e-10 * std::max(1.0, std::abs(dd)));
        }
    }
}
