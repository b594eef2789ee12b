#pragma once

#include <functional>
#include <span>
#include <vector>

#include "jko/grid.hpp"

namespace jko {

/// Guards the logarithm only; values below it count as zero in v log v.
inline constexpr double kDensityFloor = 1e-300;

/// Probability density, piecewise constant on the active cells of a grid.
class Density {
public:
    /// Rescales nonnegative cell values to unit mass. Throws on an all-zero,
    /// negative or non-finite input.
    static Density normalize(const Grid& grid, std::vector<double> values);
    /// Samples f at active cell centres and normalizes.
    static Density sampled(const Grid& grid, const std::function<double(Point)>& f);
    static Density uniform(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](int idx) const { return values_[idx]; }
    int size() const { return static_cast<int>(values_.size()); }

    double mass() const;
    double min_active() const;
    double max_active() const;
    bool strictly_positive(double floor = kDensityFloor) const { return min_active() >= floor; }

private:
    Density(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {}

    Grid grid_;
    std::vector<double> values_;
};

/// Potential V sampled on a grid, with its declared convexity modulus.
class Potential {
public:
    Potential(Grid grid, std::vector<double> values, double alpha);
    static Potential sampled(const Grid& grid, const std::function<double(Point)>& f, double alpha);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](int idx) const { return values_[idx]; }
    double alpha() const { return alpha_; }

    /// Smallest discrete second difference over interior cells (per axis in
    /// 2-D), divided by h^2.
    double min_second_difference() const;
    /// True when min_second_difference() >= alpha - tol_conv.
    bool convexity_holds(double tol_conv) const;

private:
    Grid grid_;
    std::vector<double> values_;
    double alpha_;
};

inline double default_convexity_tolerance(double alpha) { return 1e-8 * (1.0 + std::abs(alpha)); }

struct EnergyReport {
    double w2_squared = 0.0;
    double entropy = 0.0;
    double potential = 0.0;
    double total = 0.0;
    double tau = 0.0;
};

using W2Backend = std::function<double(const Density& rho, const Density& g)>;

/// Sum of rho log rho times cell measure (0 log 0 = 0).
double entropy(const Density& rho);
double potential_energy(const Density& rho, const Potential& V);
/// Entropy plus potential energy.
double free_energy(const Density& rho, const Potential& V);
/// W2^2(rho, g) / (2 tau) + entropy + potential energy.
EnergyReport total_energy(const Density& rho, const Density& g, const Potential& V, double tau,
                          const W2Backend& w2_squared);

/// Density proportional to exp(-V).
Density gibbs(const Potential& V);

/// Sum over active cells of |a - b| times cell measure.
double l1_distance(const Density& a, const Density& b);

struct VectorField {
    std::vector<double> dx;
    std::vector<double> dy;

    double norm_squared(int idx) const { return dx[idx] * dx[idx] + dy[idx] * dy[idx]; }
};

/// Central differences where both axis neighbours are active, one-sided
/// where only one is, zero otherwise. Inactive cells get zero.
VectorField gradient(const Grid& grid, std::span<const double> f);

/// log(rho) + V on active cells, zero elsewhere. Requires rho > 0 on active cells.
std::vector<double> log_density_plus_potential(const Density& rho, const Potential& V);

}  // namespace jko
