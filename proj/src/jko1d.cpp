#include "jko/jko1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jko/discrete_ot.hpp"

namespace jko {

double optimality_residual(const Density& rho, const Potential& V, std::span<const double> phi, double tau) {
    const Grid& grid = rho.grid();
    std::vector<double> q(grid.size(), 0.0);
    double c = 0.0;
    for (int idx : grid.active_cells()) {
        q[idx] = std::log(rho[idx]) + V[idx] + phi[idx] / tau;
        c += q[idx] * rho[idx];
    }
    c *= grid.cell_measure();
    double worst = 0.0;
    for (int idx : grid.active_cells()) worst = std::max(worst, std::abs(q[idx] - c));
    return worst;
}

EnergyReport jko_energy(const Density& rho, const Density& g, const Potential& V, double tau) {
    return total_energy(rho, g, V, tau, [](const Density& a, const Density& b) { return w2_squared_1d(a, b); });
}

JkoStepResult jko_step(const Density& g, const Potential& V, double tau, const JkoOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    require_same_grid(g.grid(), V.grid());
    if (!(g.min_active() > 0.0)) throw std::invalid_argument("jko_step needs a strictly positive g");
    const Grid& grid = g.grid();
    const int n = grid.size();

    Density rho = g;
    double theta = opts.theta0;
    double prev = std::numeric_limits<double>::infinity();
    JkoStepResult out{g};
    for (int m = 0;; ++m) {
        const auto plan = solve_1d(rho, g);
        const double res = optimality_residual(rho, V, plan.phi, tau);
        if (res <= opts.tol_opt || m >= opts.max_iter) {
            out.rho_next = rho;
            out.phi = plan.phi;
            out.optimality_residual = res;
            out.iterations = m;
            out.converged = res <= opts.tol_opt;
            break;
        }
        if (res > prev) theta *= 0.5;
        else if (res <= 0.5 * prev) theta = std::min(1.0, 1.2 * theta);
        prev = res;

        std::vector<double> logr(n, 0.0);
        double top = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            logr[i] = (1.0 - theta) * std::log(rho[i]) + theta * (-V[i] - plan.phi[i] / tau);
            top = std::max(top, logr[i]);
        }
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) next[i] = std::exp(logr[i] - top);
        rho = Density::normalize(grid, std::move(next));
    }
    out.energy = jko_energy(out.rho_next, g, V, tau);
    return out;
}

namespace {

struct AtomLayout {
    std::vector<double> pos;
};

AtomLayout atoms(const Grid& grid, int k) {
    AtomLayout a;
    const double hs = grid.hx() / k;
    a.pos.resize(static_cast<std::size_t>(grid.nx()) * k);
    for (std::size_t s = 0; s < a.pos.size(); ++s) a.pos[s] = grid.x_min() + (static_cast<double>(s) + 0.5) * hs;
    return a;
}

std::vector<double> split(std::span<const double> cell_mass, int k) {
    std::vector<double> out(cell_mass.size() * k);
    for (std::size_t i = 0; i < cell_mass.size(); ++i)
        for (int s = 0; s < k; ++s) out[i * k + s] = cell_mass[i] / k;
    return out;
}

std::vector<double> cell_masses(const Density& rho) {
    std::vector<double> m(rho.size());
    for (int i = 0; i < rho.size(); ++i) m[i] = rho[i] * rho.grid().cell_measure();
    return m;
}

}  // namespace

double atomic_w2_squared(const Density& rho, const Density& g, int subatoms) {
    require_same_grid(rho.grid(), g.grid());
    const auto at = atoms(rho.grid(), subatoms);
    const auto a = split(cell_masses(rho), subatoms);
    const auto b = split(cell_masses(g), subatoms);
    return transport_atoms_1d(a, at.pos, b, at.pos).cost;
}

double atomic_energy(const Density& rho, const Density& g, const Potential& V, double tau, int subatoms) {
    return atomic_w2_squared(rho, g, subatoms) / (2.0 * tau) + entropy(rho) + potential_energy(rho, V);
}

OracleResult jko_oracle(const Density& g, const Potential& V, double tau, const OracleOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const Grid& grid = g.grid();
    if (grid.shape() != Shape::Interval) throw std::invalid_argument("jko_oracle needs an interval grid");
    if (grid.nx() > 64) throw std::invalid_argument("jko_oracle is limited to n <= 64");
    if (opts.subatoms < 1 || opts.iterations < 2) throw std::invalid_argument("invalid oracle options");
    const int n = grid.nx();
    const int k = opts.subatoms;
    const double h = grid.hx();
    const auto at = atoms(grid, k);
    const auto b = split(cell_masses(g), k);

    // Gradient over cell masses A_i of atomic W2^2 / 2 tau + sum A log(A / h) + sum V A.
    auto gradient_at = [&](const std::vector<double>& A, DiscreteTransport* keep) {
        const auto a = split(A, k);
        auto t = transport_atoms_1d(a, at.pos, b, at.pos);
        std::vector<double> grad(n);
        for (int i = 0; i < n; ++i) {
            double u = 0.0;
            for (int s = 0; s < k; ++s) u += t.u[static_cast<std::size_t>(i) * k + s];
            grad[i] = u / k / (2.0 * tau) + std::log(A[i] / h) + 1.0 + V[i];
        }
        if (keep) *keep = std::move(t);
        return grad;
    };

    std::vector<double> A = cell_masses(g);
    std::vector<double> avg(n, 0.0);
    int averaged = 0;
    std::vector<double> logA(n);
    for (int it = 0; it < opts.iterations; ++it) {
        const auto grad = gradient_at(A, nullptr);
        const double eta = opts.step0 / std::sqrt(1.0 + it / 50.0);
        double top = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            logA[i] = std::log(A[i]) - eta * grad[i];
            top = std::max(top, logA[i]);
        }
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            A[i] = std::exp(logA[i] - top);
            total += A[i];
        }
        for (double& v : A) v /= total;
        if (it >= opts.iterations / 2) {
            for (int i = 0; i < n; ++i) avg[i] += A[i];
            ++averaged;
        }
    }
    std::vector<double> dens(n);
    for (int i = 0; i < n; ++i) dens[i] = avg[i] / averaged / h;

    OracleResult r{Density::normalize(grid, std::move(dens))};
    DiscreteTransport t;
    const auto final_mass = cell_masses(r.rho);
    const auto grad = gradient_at(final_mass, &t);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += final_mass[i] * grad[i];
    for (int i = 0; i < n; ++i) r.stationarity = std::max(r.stationarity, std::abs(grad[i] - mean));
    r.min_reduced_cost = min_reduced_cost(t, at.pos, at.pos);
    r.energy = atomic_energy(r.rho, g, V, tau, k);
    return r;
}

Trajectory run_trajectory(const Density& rho_init, const Potential& V, double tau, int K, const JkoOptions& opts,
                          const TheoremOptions& thm) {
    if (K < 1) throw std::invalid_argument("trajectory needs K >= 1");
    if (!(rho_init.min_active() > 0.0)) throw std::invalid_argument("trajectory needs a strictly positive start");
    Trajectory traj;
    traj.tau = tau;
    traj.densities.push_back(rho_init);
    for (int k = 0; k < K; ++k) {
        JkoStepResult step{rho_init};
        try {
            step = jko_step(traj.densities.back(), V, tau, opts);
        } catch (const std::exception& e) {
            throw std::runtime_error("step " + std::to_string(k) + ": " + e.what());
        }
        if (!step.converged) {
            traj.abort_reason = "step " + std::to_string(k) + " did not converge (residual " +
                                std::to_string(step.optimality_residual) + ")";
            traj.steps.push_back(std::move(step));
            return traj;
        }
        TheoremOptions o = thm;
        o.optimality_residual = step.optimality_residual;
        traj.checks.push_back(check_theorem(step.rho_next, traj.densities.back(), V, tau, o));
        traj.densities.push_back(step.rho_next);
        traj.steps.push_back(std::move(step));
    }
    traj.complete = true;
    return traj;
}

}  // namespace jko
