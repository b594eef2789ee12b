#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jko/jko1d.hpp"
#include "jko/lipverify.hpp"

using namespace jko;

namespace {

std::vector<double> sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.center(i).x);
    return v;
}

}  // namespace

TEST(LipConst, AffineAndConstant) {
    const Grid g = Grid::interval(0.0, 1.0, 100);
    const auto r = lip_const(g, sample(g, [](double x) { return -2.5 * x + 1.0; }));
    EXPECT_NEAR(r.lip_pairwise, 2.5, 1e-12);
    EXPECT_NEAR(r.lip_grad, 2.5, 1e-12);
    const auto c = lip_const(g, std::vector<double>(100, 7.0));
    EXPECT_EQ(c.lip_pairwise, 0.0);
    EXPECT_EQ(c.lip_grad, 0.0);
}

TEST(LipConst, AbsoluteValueKink) {
    const Grid g = Grid::interval(0.0, 1.0, 100);
    const auto r = lip_const(g, sample(g, [](double x) { return std::abs(x - 0.5); }));
    EXPECT_NEAR(r.lip_pairwise, 1.0, 1e-12);
    EXPECT_LE(r.lip_grad, 1.0 + 1e-12);
}

TEST(LipConst, PairwiseDominatesGradient) {
    std::mt19937_64 rng(60);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int n : {50, 100, 200}) {
        const Grid g = Grid::interval(-1.0, 1.0, n);
        const double a = u(rng), b = u(rng);
        const auto r = lip_const(g, sample(g, [&](double x) { return a * std::sin(2 * x) + b * x * x; }));
        EXPECT_GE(r.lip_pairwise, r.lip_grad - 10.0 * g.hx());
    }
}

TEST(LipConst, DegradesAboveSizeGuard) {
    const Grid g = Grid::box(0.0, 1.0, 0.0, 1.0, 101, 101);
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = g.center(i).x;
    const auto r = lip_const(g, f, LipMethod::Pairwise);
    EXPECT_TRUE(r.degraded);
    EXPECT_FALSE(r.has_pairwise);
    EXPECT_NEAR(r.value(), 1.0, 1e-12);
}

TEST(TheoremCheck, GibbsHasZeroMargin) {
    const Grid g = Grid::interval(-1.0, 1.0, 100);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const auto c = check_theorem(gibbs(V), gibbs(V), V, 0.2);
    EXPECT_NEAR(c.lhs, 0.0, 1e-10);
    EXPECT_NEAR(c.rhs, 0.0, 1e-10);
    EXPECT_NEAR(c.margin, 0.0, 1e-10);
    EXPECT_TRUE(c.passed());
}

TEST(TheoremCheck, ZeroPotentialRandomInstances) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Grid g = Grid::interval(-1.0, 1.0, 100);
    const Potential V = Potential::sampled(g, [](Point) { return 0.0; }, 0.0);
    for (int t = 0; t < 50; ++t) {
        const double a = u(rng), b = u(rng);
        const Density g0 = Density::sampled(g, [&](Point p) { return std::exp(a * std::sin(2 * p.x) + b * std::cos(3 * p.x)); });
        const auto s = jko_step(g0, V, 0.1);
        ASSERT_TRUE(s.converged);
        TheoremOptions o;
        o.optimality_residual = s.optimality_residual;
        EXPECT_TRUE(check_theorem(s.rho_next, g0, V, 0.1, o).passed()) << t;
    }
}

TEST(TheoremCheck, PositiveMarginOnPerturbedGibbs) {
    const Grid g = Grid::interval(-1.0, 1.0, 200);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 1.0);
    const Density g0 = Density::sampled(g, [](Point p) { return (1 + 0.5 * std::sin(3 * p.x)) * std::exp(-0.5 * p.x * p.x); });
    const auto s = jko_step(g0, V, 0.2);
    const auto c = check_theorem(s.rho_next, g0, V, 0.2);
    EXPECT_TRUE(c.passed());
    EXPECT_GT(c.margin, 0.0);
}

TEST(TheoremCheck, VacuousRegime) {
    const Grid g = Grid::interval(-1.0, 1.0, 50);
    const Potential V = Potential::sampled(g, [](Point p) { return -1.5 * p.x * p.x; }, -3.0);
    const Density u = Density::uniform(g);
    EXPECT_EQ(check_theorem(u, u, V, 0.5).status, CheckStatus::Vacuous);
    const std::vector<Density> traj{u, u};
    EXPECT_THROW(check_decay_envelope(traj, V, 0.5), std::domain_error);
}

TEST(TheoremCheck, ScaleAware) {
    const Grid g = Grid::interval(-1.0, 1.0, 80);
    const Potential V = Potential::sampled(g, [](Point p) { return p.x * p.x; }, 2.0);
    const Potential V2 = Potential::sampled(g, [](Point p) { return p.x * p.x + 4.0; }, 2.0);
    const auto f1 = [](Point p) { return 1.0 + 0.3 * std::sin(2 * p.x); };
    const auto f2 = [](Point p) { return std::exp(p.x); };
    const Density a = Density::sampled(g, f1), b = Density::sampled(g, f2);
    const Density a5 = Density::sampled(g, [&](Point p) { return 5.0 * f1(p); });
    const Density b5 = Density::sampled(g, [&](Point p) { return 5.0 * f2(p); });
    const auto c0 = check_theorem(a, b, V, 0.1);
    for (const auto& c : {check_theorem(a, b, V2, 0.1), check_theorem(a5, b5, V, 0.1)}) {
        EXPECT_NEAR(c.lhs, c0.lhs, 1e-12);
        EXPECT_NEAR(c.rhs, c0.rhs, 1e-12);
        EXPECT_NEAR(c.margin, c0.margin, 1e-12);
    }
}

TEST(DecayEnvelope, GibbsTrajectoryIsZero) {
    const Grid g = Grid::interval(-1.0, 1.0, 60);
    const Potential V = Potential::sampled(g, [](Point p) { return p.x * p.x; }, 2.0);
    const std::vector<Density> traj(4, gibbs(V));
    for (double m : check_decay_envelope(traj, V, 0.1)) EXPECT_NEAR(m, 0.0, 1e-10);
}

TEST(DecayEnvelope, AlphaZeroIsPlainLipschitzSequence) {
    const Grid g = Grid::interval(-1.0, 1.0, 60);
    const Potential V = Potential::sampled(g, [](Point p) { return 0.3 * p.x; }, 0.0);
    const auto t = run_trajectory(Density::sampled(g, [](Point p) { return 1.0 + 0.5 * std::sin(3 * p.x); }), V, 0.1, 5);
    ASSERT_TRUE(t.complete);
    const auto m = check_decay_envelope(t.densities, V, 0.1);
    for (std::size_t k = 0; k < m.size(); ++k) {
        const auto w = log_density_plus_potential(t.densities[k], V);
        EXPECT_DOUBLE_EQ(m[k], lip_const(g, w).value());
        if (k > 0) {
            EXPECT_LE(m[k], m[k - 1] + 1e-9);
        }
    }
}

TEST(DecayEnvelope, ControlledGrowthForNegativeAlpha) {
    const Grid g = Grid::interval(-1.0, 1.0, 200);
    const Potential V = Potential::sampled(g, [](Point p) { return -0.25 * p.x * p.x; }, -0.5);
    const Density g0 = Density::sampled(g, [](Point p) { return (1 + 0.5 * std::sin(3 * p.x)) * std::exp(0.25 * p.x * p.x); });
    const double tau = 0.1;
    const auto t = run_trajectory(g0, V, tau, 20);
    ASSERT_TRUE(t.complete);
    double tol = 0.0;
    for (const auto& c : t.checks) tol = std::max(tol, c.tol);
    const auto m = check_decay_envelope(t.densities, V, tau);
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double lip = m[k] * std::pow(0.95, -static_cast<double>(k));
        EXPECT_LE(lip, std::pow(0.95, -static_cast<double>(k)) * m[0] + k * tol);
    }
}

TEST(InteriorArgmax, ZeroFieldIsVacuous) {
    const Grid g = Grid::disc(0.0, 0.0, 1.0, 20);
    const auto c = interior_argmax_check(g, std::vector<double>(g.size(), 0.0));
    EXPECT_TRUE(c.vacuous);
    EXPECT_TRUE(c.boundary_bound_ok);
    EXPECT_TRUE(c.passed());
}

TEST(InteriorArgmax, IntervalBumpPeaksInside) {
    const Grid g = Grid::interval(-1.0, 1.0, 100);
    const auto c = interior_argmax_check(g, sample(g, [](double x) { return 0.2 * std::cos(M_PI * x); }));
    EXPECT_TRUE(c.is_interior);
    EXPECT_GT(c.margin, 0.0);
    EXPECT_TRUE(c.boundary_bound_ok);
}
