#include "jko/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jko {

Density Density::normalize(const Grid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw std::invalid_argument("density size does not match grid");
    // Neumaier summation keeps the mass of a normalized vector within a few ulp of 1.
    double total = 0.0, carry = 0.0;
    for (int idx = 0; idx < grid.size(); ++idx) {
        if (!grid.active(idx)) {
            values[idx] = 0.0;
            continue;
        }
        const double v = values[idx] * grid.cell_measure();
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("density values must be finite and nonnegative");
        const double t = total + v;
        carry += std::abs(total) >= v ? (total - t) + v : (v - t) + total;
        total = t;
    }
    total += carry;
    if (!(total > 0.0)) throw std::invalid_argument("degenerate density");
    // Already unit mass to round-off: leave the values alone so normalize is idempotent.
    const double slack = 2.0 * grid.active_count() * std::numeric_limits<double>::epsilon();
    if (std::abs(total - 1.0) <= slack) return Density(grid, std::move(values));
    for (int idx : grid.active_cells()) values[idx] /= total;
    return Density(grid, std::move(values));
}

Density Density::sampled(const Grid& grid, const std::function<double(Point)>& f) {
    std::vector<double> v(grid.size(), 0.0);
    for (int idx : grid.active_cells()) v[idx] = f(grid.center(idx));
    return normalize(grid, std::move(v));
}

Density Density::uniform(const Grid& grid) {
    return sampled(grid, [](Point) { return 1.0; });
}

double Density::mass() const {
    double s = 0.0;
    for (int idx : grid_.active_cells()) s += values_[idx];
    return s * grid_.cell_measure();
}

double Density::min_active() const {
    double m = std::numeric_limits<double>::infinity();
    for (int idx : grid_.active_cells()) m = std::min(m, values_[idx]);
    return m;
}

double Density::max_active() const {
    double m = 0.0;
    for (int idx : grid_.active_cells()) m = std::max(m, values_[idx]);
    return m;
}

Potential::Potential(Grid grid, std::vector<double> values, double alpha)
    : grid_(std::move(grid)), values_(std::move(values)), alpha_(alpha) {
    if (static_cast<int>(values_.size()) != grid_.size())
        throw std::invalid_argument("potential size does not match grid");
    for (int idx = 0; idx < grid_.size(); ++idx) {
        if (!grid_.active(idx)) {
            values_[idx] = 0.0;
        } else if (!std::isfinite(values_[idx])) {
            throw std::invalid_argument("potential values must be finite");
        }
    }
}

Potential Potential::sampled(const Grid& grid, const std::function<double(Point)>& f, double alpha) {
    std::vector<double> v(grid.size(), 0.0);
    for (int idx : grid.active_cells()) v[idx] = f(grid.center(idx));
    return Potential(grid, std::move(v), alpha);
}

double Potential::min_second_difference() const {
    double m = std::numeric_limits<double>::infinity();
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    auto ok = [&](int i, int j) { return i >= 0 && i < nx && j >= 0 && j < ny && grid_.active(grid_.index(i, j)); };
    const double hx2 = grid_.hx() * grid_.hx();
    const double hy2 = grid_.hy() * grid_.hy();
    for (int idx : grid_.active_cells()) {
        const int i = grid_.ix(idx);
        const int j = grid_.iy(idx);
        if (ok(i - 1, j) && ok(i + 1, j)) {
            const double d2 = values_[grid_.index(i + 1, j)] - 2.0 * values_[idx] + values_[grid_.index(i - 1, j)];
            m = std::min(m, d2 / hx2);
        }
        if (grid_.dim() == 2 && ok(i, j - 1) && ok(i, j + 1)) {
            const double d2 = values_[grid_.index(i, j + 1)] - 2.0 * values_[idx] + values_[grid_.index(i, j - 1)];
            m = std::min(m, d2 / hy2);
        }
    }
    return m;
}

bool Potential::convexity_holds(double tol_conv) const { return min_second_difference() >= alpha_ - tol_conv; }

double entropy(const Density& rho) {
    double s = 0.0;
    for (int idx : rho.grid().active_cells()) {
        const double v = rho[idx];
        if (v >= kDensityFloor) s += v * std::log(v);
    }
    return s * rho.grid().cell_measure();
}

double potential_energy(const Density& rho, const Potential& V) {
    require_same_grid(rho.grid(), V.grid());
    double s = 0.0;
    for (int idx : rho.grid().active_cells()) s += V[idx] * rho[idx];
    return s * rho.grid().cell_measure();
}

double free_energy(const Density& rho, const Potential& V) { return entropy(rho) + potential_energy(rho, V); }

EnergyReport total_energy(const Density& rho, const Density& g, const Potential& V, double tau,
                          const W2Backend& w2_squared) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    require_same_grid(rho.grid(), g.grid());
    EnergyReport r;
    r.tau = tau;
    r.w2_squared = w2_squared(rho, g);
    r.entropy = entropy(rho);
    r.potential = potential_energy(rho, V);
    r.total = r.w2_squared / (2.0 * tau) + r.entropy + r.potential;
    return r;
}

Density gibbs(const Potential& V) {
    const Grid& grid = V.grid();
    double vmin = std::numeric_limits<double>::infinity();
    for (int idx : grid.active_cells()) vmin = std::min(vmin, V[idx]);
    std::vector<double> w(grid.size(), 0.0);
    for (int idx : grid.active_cells()) w[idx] = std::exp(-(V[idx] - vmin));
    return Density::normalize(grid, std::move(w));
}

double l1_distance(const Density& a, const Density& b) {
    require_same_grid(a.grid(), b.grid());
    double s = 0.0;
    for (int idx : a.grid().active_cells()) s += std::abs(a[idx] - b[idx]);
    return s * a.grid().cell_measure();
}

VectorField gradient(const Grid& grid, std::span<const double> f) {
    VectorField out{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
    const int nx = grid.nx();
    const int ny = grid.ny();
    auto ok = [&](int i, int j) { return i >= 0 && i < nx && j >= 0 && j < ny && grid.active(grid.index(i, j)); };
    auto axis_derivative = [&](int idx, int i, int j, int di, int dj, double h) {
        const bool fwd = ok(i + di, j + dj);
        const bool bwd = ok(i - di, j - dj);
        if (fwd && bwd) return (f[grid.index(i + di, j + dj)] - f[grid.index(i - di, j - dj)]) / (2.0 * h);
        if (fwd) return (f[grid.index(i + di, j + dj)] - f[idx]) / h;
        if (bwd) return (f[idx] - f[grid.index(i - di, j - dj)]) / h;
        return 0.0;
    };
    for (int idx : grid.active_cells()) {
        const int i = grid.ix(idx);
        const int j = grid.iy(idx);
        out.dx[idx] = axis_derivative(idx, i, j, 1, 0, grid.hx());
        if (grid.dim() == 2 && ny > 1) out.dy[idx] = axis_derivative(idx, i, j, 0, 1, grid.hy());
    }
    return out;
}

std::vector<double> log_density_plus_potential(const Density& rho, const Potential& V) {
    require_same_grid(rho.grid(), V.grid());
    std::vector<double> out(rho.size(), 0.0);
    for (int idx : rho.grid().active_cells()) {
        if (!(rho[idx] > 0.0)) throw std::domain_error("log of a vanishing density");
        out[idx] = std::log(rho[idx]) + V[idx];
    }
    return out;
}

}  // namespace jko
