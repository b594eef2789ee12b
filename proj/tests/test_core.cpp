#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jko/density.hpp"
#include "jko/ot1d.hpp"

using namespace jko;

TEST(Normalize, ConstantOneStaysOne) {
    const Grid g = Grid::interval(0.0, 1.0, 10);
    const Density d = Density::normalize(g, std::vector<double>(10, 1.0));
    for (double v : d.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Normalize, ConstantTwoScalesToOne) {
    const Grid g = Grid::interval(0.0, 1.0, 10);
    const Density d = Density::normalize(g, std::vector<double>(10, 2.0));
    for (double v : d.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Normalize, TwoCellHandQuadrature) {
    const Grid g = Grid::interval(0.0, 1.0, 2);
    const Density d = Density::normalize(g, {1.0, 3.0});
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_DOUBLE_EQ(d[1], 1.5);
}

TEST(Normalize, RejectsBadInput) {
    const Grid g = Grid::interval(0.0, 1.0, 3);
    EXPECT_THROW(Density::normalize(g, {0.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(Density::normalize(g, {1.0, -1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(Density::normalize(g, {1.0, NAN, 1.0}), std::invalid_argument);
}

TEST(Normalize, IdempotentWithinOneUlp) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    const Grid g = Grid::interval(-1.0, 2.0, 57);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> v(57);
        for (double& x : v) x = u(rng);
        const Density a = Density::normalize(g, v);
        const Density b = Density::normalize(g, {a.values().begin(), a.values().end()});
        for (int i = 0; i < 57; ++i) EXPECT_LE(std::abs(a[i] - b[i]), std::nextafter(a[i], 1e300) - a[i]);
    }
}

TEST(Entropy, UniformUnitIntervalIsZero) {
    EXPECT_NEAR(entropy(Density::uniform(Grid::interval(0.0, 1.0, 16))), 0.0, 1e-15);
}

TEST(Entropy, UniformOnLengthTwo) {
    EXPECT_NEAR(entropy(Density::uniform(Grid::interval(0.0, 2.0, 16))), std::log(0.5), 1e-14);
}

TEST(Entropy, TwoCellHandQuadrature) {
    const Density d = Density::normalize(Grid::interval(0.0, 1.0, 2), {0.5, 1.5});
    EXPECT_NEAR(entropy(d), 0.5 * (0.5 * std::log(0.5) + 1.5 * std::log(1.5)), 1e-15);
}

TEST(Entropy, ConvexAlongMidpoints) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const Grid g = Grid::interval(0.0, 1.0, 40);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a(40), b(40), m(40);
        for (double& x : a) x = u(rng);
        for (double& x : b) x = u(rng);
        const Density da = Density::normalize(g, a), db = Density::normalize(g, b);
        for (int i = 0; i < 40; ++i) m[i] = 0.5 * (da[i] + db[i]);
        const Density dm = Density::normalize(g, m);
        EXPECT_LE(entropy(dm), 0.5 * (entropy(da) + entropy(db)) + 1e-12);
    }
}

TEST(PotentialEnergy, Constants) {
    const Grid g = Grid::interval(0.0, 1.0, 20);
    const Density u = Density::uniform(g);
    EXPECT_NEAR(potential_energy(u, Potential::sampled(g, [](Point) { return 0.0; }, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(potential_energy(u, Potential::sampled(g, [](Point) { return 3.5; }, 0.0)), 3.5, 1e-14);
}

TEST(PotentialEnergy, LinearMidpointRule) {
    const Grid g = Grid::interval(0.0, 1.0, 10);
    const double e = potential_energy(Density::uniform(g), Potential::sampled(g, [](Point p) { return p.x; }, 0.0));
    EXPECT_NEAR(e, 0.5, g.hx() * g.hx() / 12.0);
}

TEST(TotalEnergy, EqualDensitiesHaveZeroTransport) {
    const Grid g = Grid::interval(-1.0, 3.0, 30);
    const Density u = Density::uniform(g);
    const Potential zero = Potential::sampled(g, [](Point) { return 0.0; }, 0.0);
    const auto w2 = [](const Density& a, const Density& b) { return w2_squared_1d(a, b); };
    const auto e = total_energy(u, u, zero, 0.3, w2);
    EXPECT_NEAR(e.w2_squared, 0.0, 1e-15);
    EXPECT_NEAR(e.total, std::log(1.0 / 4.0), 1e-13);

    const Density s = Density::sampled(g, [](Point p) { return 1.0 + p.x * p.x; });
    const Potential V = Potential::sampled(g, [](Point p) { return std::sin(p.x); }, -1.0);
    EXPECT_NEAR(total_energy(s, s, V, 0.1, w2).w2_squared, 0.0, 1e-15);
}

TEST(TotalEnergy, ShiftedIndicators) {
    // Indicators of [0, 0.5) and [0.5, 1) on a 20-cell grid of [0, 1].
    const Grid g = Grid::interval(0.0, 1.0, 20);
    std::vector<double> a(20, 0.0), b(20, 0.0);
    for (int i = 0; i < 10; ++i) a[i] = 1.0;
    for (int i = 10; i < 20; ++i) b[i] = 1.0;
    Ot1dOptions o;
    o.require_positive_target = false;
    EXPECT_NEAR(w2_squared_1d(Density::normalize(g, a), Density::normalize(g, b), o), 0.25, 1e-12);
}

TEST(Gradient, AffineExactInterior) {
    const Grid g = Grid::interval(0.0, 1.0, 25);
    std::vector<double> f(25);
    for (int i = 0; i < 25; ++i) f[i] = 3.0 * g.center(i).x - 1.0;
    const auto d = gradient(g, f);
    for (int i = 0; i < 25; ++i) EXPECT_NEAR(d.dx[i], 3.0, 1e-12);
}

TEST(Gradient, AffineExactOn2DBox) {
    const Grid g = Grid::box(0.0, 1.0, -1.0, 1.0, 12, 9);
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = 2.0 * g.center(i).x - 0.5 * g.center(i).y;
    const auto d = gradient(g, f);
    for (int i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(d.dx[i], 2.0, 1e-12);
        EXPECT_NEAR(d.dy[i], -0.5, 1e-12);
    }
}

TEST(Gradient, ConstantIsZero) {
    const Grid g = Grid::disc(0.0, 0.0, 1.0, 16);
    const auto d = gradient(g, std::vector<double>(g.size(), 4.0));
    for (int i = 0; i < g.size(); ++i) EXPECT_EQ(d.norm_squared(i), 0.0);
}

TEST(Gradient, QuadraticInteriorExact) {
    const Grid g = Grid::interval(0.0, 1.0, 10);
    std::vector<double> f(10);
    for (int i = 0; i < 10; ++i) f[i] = g.center(i).x * g.center(i).x;
    const auto d = gradient(g, f);
    for (int i = 1; i < 9; ++i) EXPECT_NEAR(d.dx[i], 2.0 * g.center(i).x, 1e-12);
}

TEST(Grid, DiscBoundaryAndMeasure) {
    const Grid g = Grid::disc(0.0, 0.0, 1.0, 64);
    EXPECT_EQ(g.shape(), Shape::Disc);
    int boundary = 0;
    for (int idx : g.active_cells()) boundary += g.boundary(idx);
    EXPECT_GT(boundary, 0);
    EXPECT_NEAR(g.active_count() * g.cell_measure(), M_PI, 0.05);
    EXPECT_NEAR(g.distance_to_domain({2.0, 0.0}), 1.0, 1e-12);
}

TEST(Potential, ConvexityAudit) {
    const Grid g = Grid::interval(-1.0, 1.0, 50);
    const Potential q = Potential::sampled(g, [](Point p) { return 0.5 * 2.0 * p.x * p.x; }, 2.0);
    EXPECT_NEAR(q.min_second_difference(), 2.0, 1e-9);
    EXPECT_TRUE(q.convexity_holds(default_convexity_tolerance(2.0)));
    const Potential lie = Potential::sampled(g, [](Point p) { return 0.5 * p.x * p.x; }, 3.0);
    EXPECT_FALSE(lie.convexity_holds(default_convexity_tolerance(3.0)));
}
