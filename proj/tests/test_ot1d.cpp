#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jko/discrete_ot.hpp"
#include "jko/ot1d.hpp"
#include "oracles.hpp"

using namespace jko;

namespace {

Density random_density(const Grid& g, std::mt19937_64& rng, double lo = 0.2) {
    std::uniform_real_distribution<double> u(lo, 2.0);
    std::vector<double> v(g.size());
    for (double& x : v) x = u(rng);
    return Density::normalize(g, v);
}

Density smooth_pair_member(const Grid& g, double mu, double sigma) {
    return Density::sampled(g, [&](Point p) { return std::exp(-0.5 * (p.x - mu) * (p.x - mu) / (sigma * sigma)); });
}

}  // namespace

TEST(PiecewiseCdf, UniformQuantileIsIdentity) {
    const PiecewiseCdf F(Density::uniform(Grid::interval(0.0, 1.0, 8)));
    for (double p : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) EXPECT_NEAR(F.quantile(p), p, 1e-15);
}

TEST(PiecewiseCdf, UniformOnLengthTwoMedian) {
    EXPECT_NEAR(PiecewiseCdf(Density::uniform(Grid::interval(0.0, 2.0, 8))).quantile(0.5), 1.0, 1e-15);
}

TEST(PiecewiseCdf, TwoCellHandIntegration) {
    const PiecewiseCdf F(Density::normalize(Grid::interval(0.0, 1.0, 2), {1.5, 0.5}));
    EXPECT_NEAR(F.cdf(0.5), 0.75, 1e-15);
    EXPECT_NEAR(F.quantile(0.75), 0.5, 1e-15);
}

TEST(Solve1d, IdenticalDensities) {
    std::mt19937_64 rng(3);
    const Grid g = Grid::interval(-1.0, 1.0, 40);
    const Density r = random_density(g, rng);
    const auto plan = solve_1d(r, r);
    EXPECT_NEAR(plan.w2, 0.0, 1e-12);
    for (int i = 0; i < 40; ++i) {
        EXPECT_NEAR(plan.map_T[i], plan.x[i], 1e-12);
        EXPECT_NEAR(plan.phi[i], 0.0, 1e-12);
    }
    // T = id, so the residual is 1 - rho_i / (stencil mean of rho).
    for (int i = 1; i + 1 < 40; ++i) {
        const double mean = 0.25 * (r[i - 1] + 2.0 * r[i] + r[i + 1]);
        EXPECT_NEAR(plan.residual_ma[i], 1.0 - r[i] / mean, 1e-10) << i;
    }
}

TEST(Solve1d, IdenticalSmoothDensitiesResidualIsSecondOrder) {
    double prev = 0.0;
    for (int n : {80, 160, 320}) {
        const Grid g = Grid::interval(-1.0, 1.0, n);
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::exp(-g.x_coords()[i] * g.x_coords()[i] / 0.5);
        const Density r = Density::normalize(g, v);
        const auto plan = solve_1d(r, r);
        const double res = max_abs(plan.residual_ma);
        EXPECT_LT(res, 20.0 * g.hx() * g.hx());
        EXPECT_LT(max_abs(differentiated_ma_residual(plan, r, r)), 20.0 * g.hx() * g.hx());
        if (prev > 0.0) {
            EXPECT_NEAR(prev / res, 4.0, 0.4) << n;
        }
        prev = res;
    }
}

TEST(Solve1d, TranslationOfIndicators) {
    const Grid g = Grid::interval(0.0, 1.0, 40);
    std::vector<double> a(40, 0.0), b(40, 0.0);
    for (int i = 0; i < 20; ++i) a[i] = 1.0;
    for (int i = 20; i < 40; ++i) b[i] = 1.0;
    Ot1dOptions o;
    o.require_positive_target = false;
    const auto plan = solve_1d(Density::normalize(g, a), Density::normalize(g, b), o);
    EXPECT_NEAR(plan.w2, 0.5, 1e-12);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(plan.map_T[i], plan.x[i] + 0.5, 1e-12);
    // phi'' = 0 on the support of the source.
    for (int i = 1; i < 19; ++i) {
        const double h = g.hx();
        EXPECT_NEAR((plan.phi[i + 1] - 2 * plan.phi[i] + plan.phi[i - 1]) / (h * h), 0.0, 1e-9);
    }
}

TEST(Solve1d, RefusesVanishingTarget) {
    const Grid g = Grid::interval(0.0, 1.0, 4);
    const Density r = Density::uniform(g);
    const Density t = Density::normalize(g, {1.0, 0.0, 1.0, 1.0});
    EXPECT_THROW(solve_1d(r, t), std::invalid_argument);
}

TEST(Solve1d, AgreesWithTransportLpOracle) {
    // Discrete LP on the n x n centre-atom cost matrix, solved test-side.
    // Each atom sits at distance at most h / sqrt(12) (in W2) from its cell,
    // so the two W2 values differ by at most 2 h / sqrt(12).
    std::mt19937_64 rng(32);
    const Grid g = Grid::interval(-1.0, 1.0, 32);
    for (int t = 0; t < 5; ++t) {
        const Density r = random_density(g, rng), s = random_density(g, rng);
        std::vector<double> a(32), b(32), x = g.x_coords();
        for (int i = 0; i < 32; ++i) {
            a[i] = r[i] * g.hx();
            b[i] = s[i] * g.hx();
        }
        const double lp = oracle::min_cost_transport(a, x, b, x);
        const double w2 = w2_squared_1d(r, s);
        EXPECT_LE(std::abs(std::sqrt(w2) - std::sqrt(lp)), 2.0 * g.hx() / std::sqrt(12.0) + 1e-9) << "instance " << t;
    }
}

TEST(Solve1d, SubAtomLpConvergesToQuantileValue) {
    std::mt19937_64 rng(5);
    const Grid g = Grid::interval(-1.0, 1.0, 16);
    const Density r = random_density(g, rng), s = random_density(g, rng);
    const double w2 = w2_squared_1d(r, s);
    std::vector<double> a, x, b;
    const int k = 8;
    for (int i = 0; i < 16; ++i)
        for (int q = 0; q < k; ++q) {
            x.push_back(g.x_min() + (i + (q + 0.5) / k) * g.hx());
            a.push_back(r[i] * g.hx() / k);
            b.push_back(s[i] * g.hx() / k);
        }
    // W2 between each cell and its k uniform sub-atoms is at most (h / k) / sqrt(12).
    const double lp = oracle::min_cost_transport(a, x, b, x);
    EXPECT_LE(std::abs(std::sqrt(lp) - std::sqrt(w2)), 2.0 * g.hx() / k / std::sqrt(12.0));
    EXPECT_NEAR(lp, w2, 5e-3 * w2);
}

TEST(DiscreteOt, NorthWestCornerMatchesLpOracle) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> x(12), y(15), a(12), b(15);
        for (double& v : x) v = u(rng);
        for (double& v : y) v = u(rng);
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        double sa = 0, sb = 0;
        for (double& v : a) sa += (v = u(rng) + 0.1);
        for (double& v : b) sb += (v = u(rng) + 0.1);
        for (double& v : a) v /= sa;
        for (double& v : b) v /= sb;
        const auto nw = transport_atoms_1d(a, x, b, y);
        EXPECT_NEAR(nw.cost, oracle::min_cost_transport(a, x, b, y), 1e-12);
        EXPECT_GE(min_reduced_cost(nw, x, y), -1e-12);
    }
}

TEST(Ot1dProperties, PushforwardOfQuantiles) {
    std::mt19937_64 rng(21);
    const Grid g = Grid::interval(0.0, 2.0, 50);
    const Density r = random_density(g, rng), s = random_density(g, rng);
    const PiecewiseCdf F(r), G(s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const double p = u(rng);
        const double x = F.quantile(p);
        const double T = G.quantile(F.cdf(x));
        EXPECT_NEAR(G.cdf(T), p, 1e-8);
    }
}

TEST(Ot1dProperties, Symmetry) {
    std::mt19937_64 rng(22);
    const Grid g = Grid::interval(-1.0, 1.0, 60);
    for (int t = 0; t < 10; ++t) {
        const Density r = random_density(g, rng), s = random_density(g, rng);
        EXPECT_NEAR(solve_1d(r, s).w2, solve_1d(s, r).w2, 1e-10 * 2.0);
    }
}

TEST(Ot1dProperties, TriangleInequality) {
    std::mt19937_64 rng(23);
    const Grid g = Grid::interval(-1.0, 1.0, 60);
    for (int t = 0; t < 20; ++t) {
        const Density a = random_density(g, rng), b = random_density(g, rng), c = random_density(g, rng);
        EXPECT_LE(solve_1d(a, c).w2, solve_1d(a, b).w2 + solve_1d(b, c).w2 + 1e-8);
    }
}

TEST(Ot1dProperties, TranslationEquivariance) {
    // A bump and the same bump shifted by an integer number of cells.
    const Grid g = Grid::interval(0.0, 1.0, 100);
    for (int shift : {5, 13, 30}) {
        std::vector<double> a(100, 0.0), b(100, 0.0);
        for (int i = 10; i < 40; ++i) a[i] = 1.0 + std::sin(0.3 * i);
        for (int i = 10; i < 40; ++i) b[i + shift] = a[i];
        Ot1dOptions o;
        o.require_positive_target = false;
        const double w2 = solve_1d(Density::normalize(g, a), Density::normalize(g, b), o).w2;
        EXPECT_NEAR(w2, shift * g.hx(), 1e-10);
    }
}

TEST(Ot1dProperties, PotentialGauge) {
    std::mt19937_64 rng(24);
    const Grid g = Grid::interval(-1.0, 1.0, 60);
    for (int t = 0; t < 10; ++t) {
        const Density r = random_density(g, rng), s = random_density(g, rng);
        const auto plan = solve_1d(r, s);
        double m = 0.0, mx = 0.0;
        for (int i = 0; i < 60; ++i) {
            m += plan.phi[i] * r[i] * g.hx();
            mx = std::max(mx, std::abs(plan.phi[i]));
        }
        EXPECT_LE(std::abs(m), 1e-12 * mx);
    }
}

TEST(MongeAmpere, TruncatedGaussianPairOrder) {
    std::vector<double> hs, res, dres;
    for (int n : {64, 128, 256}) {
        const Grid g = Grid::interval(-1.0, 1.0, n);
        const Density r = smooth_pair_member(g, -0.1, 0.7), s = smooth_pair_member(g, 0.2, 0.8);
        const auto plan = solve_1d(r, s);
        hs.push_back(g.hx());
        res.push_back(max_abs(plan.residual_ma));
        dres.push_back(max_abs(differentiated_ma_residual(plan, r, s)));
    }
    EXPECT_GE(oracle::loglog_slope(hs, res), 1.5);
    EXPECT_GE(oracle::loglog_slope(hs, dres), 1.0);
}

TEST(MongeAmpere, TranslationResidualVanishes) {
    const Grid g = Grid::interval(0.0, 1.0, 40);
    std::vector<double> a(40, 0.0), b(40, 0.0);
    for (int i = 0; i < 20; ++i) a[i] = 1.0;
    for (int i = 20; i < 40; ++i) b[i] = 1.0;
    Ot1dOptions o;
    o.require_positive_target = false;
    const Density r = Density::normalize(g, a), s = Density::normalize(g, b);
    const auto plan = solve_1d(r, s, o);
    // Cells whose stencil stays inside the source support.
    const auto res = monge_ampere_residual(plan, r, s);
    for (int i = 1; i < 19; ++i) EXPECT_NEAR(res[i], 0.0, 1e-9);
}
