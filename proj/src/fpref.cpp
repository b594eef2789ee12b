#include "jko/fpref.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace jko {

namespace {

double bernoulli(double z) {
    if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}

}  // namespace

std::vector<double> fp_implicit_step(const Grid& grid, std::span<const double> rho, const Potential& V, double dt) {
    if (grid.dim() != 1) throw std::invalid_argument("fpref is 1-D only");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const int n = grid.nx();
    const double h = grid.hx();
    const double r = dt / (h * h);

    // (I + dt A) rho_new = rho with (A rho)_i = (F_{i+1/2} - F_{i-1/2}) / h.
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double dv = V[i + 1] - V[i];
        const double bp = bernoulli(dv);   // weight on rho_i
        const double bm = bernoulli(-dv);  // weight on rho_{i+1}
        // F h = -(bm rho_{i+1} - bp rho_i): cell i loses F, cell i+1 gains F.
        diag[i] += r * bp;
        upper[i] -= r * bm;
        diag[i + 1] += r * bm;
        lower[i + 1] -= r * bp;
    }

    // Thomas algorithm; the matrix is a column-diagonally-dominant M-matrix.
    std::vector<double> c(n), d(n);
    double denom = diag[0];
    assert(denom > 0.0);
    c[0] = upper[0] / denom;
    d[0] = rho[0] / denom;
    for (int i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        assert(denom > 0.0);
        c[i] = upper[i] / denom;
        d[i] = (rho[i] - lower[i] * d[i - 1]) / denom;
    }
    std::vector<double> out(n);
    out[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) out[i] = d[i] - c[i] * out[i + 1];
    return out;
}

FPSolution solve_fp(const Density& rho_init, const Potential& V, double t_final, double dt) {
    require_same_grid(rho_init.grid(), V.grid());
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be nonnegative");
    const Grid& grid = rho_init.grid();
    FPSolution sol{grid};
    sol.dt = dt;
    sol.h = grid.hx();
    sol.times.push_back(0.0);
    sol.densities.push_back(rho_init);
    std::vector<double> rho(rho_init.values().begin(), rho_init.values().end());
    const long steps = std::lround(std::ceil(t_final / dt - 1e-9));
    for (long s = 1; s <= steps; ++s) {
        const double t = std::min(t_final, static_cast<double>(s) * dt);
        rho = fp_implicit_step(grid, rho, V, t - sol.times.back());
        for (double& v : rho)
            if (v < 0.0 && v > -1e-12) v = 0.0;
        sol.times.push_back(t);
        sol.densities.push_back(Density::normalize(grid, rho));
    }
    return sol;
}

FPComparison compare_jko_to_fp(const Trajectory& traj, const FPSolution& fp) {
    if (traj.densities.empty()) throw std::invalid_argument("empty trajectory");
    require_same_grid(traj.densities.front().grid(), fp.grid);
    FPComparison c;
    std::size_t m = 0;
    for (std::size_t k = 0; k < traj.densities.size(); ++k) {
        const double t = static_cast<double>(k) * traj.tau;
        while (m < fp.times.size() && fp.times[m] < t - 1e-9 * fp.dt) ++m;
        if (m == fp.times.size() || std::abs(fp.times[m] - t) > 1e-9 * fp.dt)
            throw std::invalid_argument("time-grid mismatch at step " + std::to_string(k));
        const double e = l1_distance(traj.densities[k], fp.densities[m]);
        c.times.push_back(t);
        c.l1.push_back(e);
        c.max_error = std::max(c.max_error, e);
    }
    return c;
}

}  // namespace jko
