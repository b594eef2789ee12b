#include <gtest/gtest.h>

#include <cmath>

#include "jko/fpref.hpp"
#include "jko/jko1d.hpp"
#include "jko/ot1d.hpp"

using namespace jko;

TEST(FpRef, GibbsIsStationary) {
    const Grid g = Grid::interval(-1.0, 1.0, 100);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x + std::sin(p.x); }, 0.0);
    const auto sol = solve_fp(gibbs(V), V, 1.0, 0.01);
    for (const auto& d : sol.densities) EXPECT_LE(l1_distance(d, gibbs(V)), 1e-10);
    const auto step = fp_implicit_step(g, gibbs(V).values(), V, 0.05);
    for (int i = 0; i < 100; ++i) EXPECT_NEAR(step[i], gibbs(V)[i], 1e-13);
}

TEST(FpRef, HeatFlowApproachesUniformMonotonically) {
    const Grid g = Grid::interval(0.0, 1.0, 80);
    const Potential V = Potential::sampled(g, [](Point) { return 0.0; }, 0.0);
    const Density r0 = Density::sampled(g, [](Point p) { return 1.0 + 0.8 * std::cos(2 * M_PI * p.x); });
    const auto sol = solve_fp(r0, V, 0.5, 0.005);
    double prev = 1e300;
    for (const auto& d : sol.densities) {
        double l2 = 0.0;
        for (int i = 0; i < 80; ++i) l2 += (d[i] - 1.0) * (d[i] - 1.0) * g.hx();
        EXPECT_LE(std::sqrt(l2), prev + 1e-15);
        prev = std::sqrt(l2);
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(FpRef, MassAndExponentialDecayToGibbs) {
    const Grid g = Grid::interval(-2.0, 2.0, 200);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const Density r0 = Density::sampled(g, [](Point p) { return std::exp(-2.0 * (p.x - 0.8) * (p.x - 0.8)); });
    const auto sol = solve_fp(r0, V, 2.0, 0.01);
    const double w0 = solve_1d(r0, gibbs(V)).w2;
    for (std::size_t k = 0; k < sol.densities.size(); ++k) {
        EXPECT_NEAR(sol.densities[k].mass(), 1.0, 1e-10);
        const double w = solve_1d(sol.densities[k], gibbs(V)).w2;
        EXPECT_LE(w, 1.05 * std::exp(-sol.times[k]) * w0 + 1e-12) << sol.times[k];
    }
}

TEST(FpRef, StepConservesMassAndSign) {
    const Grid g = Grid::interval(-1.0, 1.0, 50);
    const Potential V = Potential::sampled(g, [](Point p) { return 3.0 * p.x * p.x * p.x; }, 0.0);
    std::vector<double> r(50, 0.0);
    r[10] = 25.0;  // a spike, mass 1
    for (int k = 0; k < 20; ++k) {
        r = fp_implicit_step(g, r, V, 0.01);
        double m = 0.0;
        for (double v : r) {
            m += v * g.hx();
            EXPECT_GE(v, -1e-12);
        }
        EXPECT_NEAR(m, 1.0, 1e-13);
    }
}

TEST(FpRef, LastStepLandsOnFinalTime) {
    const Grid g = Grid::interval(0.0, 1.0, 20);
    const Potential V = Potential::sampled(g, [](Point) { return 0.0; }, 0.0);
    const auto sol = solve_fp(Density::uniform(g), V, 0.35, 0.1);
    EXPECT_DOUBLE_EQ(sol.times.back(), 0.35);
}

TEST(Compare, GibbsTrajectoryHasNoError) {
    const Grid g = Grid::interval(-1.0, 1.0, 100);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const auto t = run_trajectory(gibbs(V), V, 0.1, 5);
    const auto c = compare_jko_to_fp(t, solve_fp(gibbs(V), V, 0.5, 0.002));
    EXPECT_LE(c.max_error, 1e-8);
}

TEST(Compare, TimeGridMismatch) {
    const Grid g = Grid::interval(-1.0, 1.0, 50);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const auto t = run_trajectory(gibbs(V), V, 0.1, 3);
    EXPECT_THROW(compare_jko_to_fp(t, solve_fp(gibbs(V), V, 0.3, 0.03)), std::invalid_argument);
}

TEST(Compare, TauLadderConverges) {
    const Grid g = Grid::interval(-1.0, 1.0, 200);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const Density r0 = Density::sampled(g, [](Point p) { return (1 + 0.5 * std::sin(3 * p.x)) * std::exp(-0.5 * p.x * p.x); });
    std::vector<double> taus{0.1, 0.05, 0.025}, finals, maxima;
    for (double tau : taus) {
        const auto t = run_trajectory(r0, V, tau, static_cast<int>(std::lround(0.5 / tau)));
        ASSERT_TRUE(t.complete);
        const auto c = compare_jko_to_fp(t, solve_fp(r0, V, 0.5, tau / 50.0));
        finals.push_back(c.l1.back());
        maxima.push_back(c.max_error);
    }
    for (int i = 1; i < 3; ++i) {
        EXPECT_LT(finals[i], finals[i - 1]);
        EXPECT_LT(maxima[i], maxima[i - 1]);
    }
    const double order = std::log(finals[0] / finals[2]) / std::log(taus[0] / taus[2]);
    EXPECT_GE(order, 0.8);
}
