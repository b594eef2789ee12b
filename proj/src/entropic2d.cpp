#include "jko/entropic2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jko/kernels.hpp"

namespace jko {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> axis_log_kernel(int n, double h, double eps, bool with_cost) {
    std::vector<double> k(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = (i - j) * h;
            const double c = d * d;
            k[static_cast<std::size_t>(i) * n + j] = with_cost ? std::log(c) - c / eps : -c / eps;
        }
    }
    return k;
}

/// exp(-|x - y|^2 / eps) on the lattice, plus the two cost-weighted variants
/// used for <c, pi> (c = cx + cy splits into one weighted axis at a time).
struct LogKernels {
    kernels::SeparableLogKernel plain;
    kernels::SeparableLogKernel cost_x;
    kernels::SeparableLogKernel cost_y;

    LogKernels(const Grid& grid, double eps) {
        const int nx = grid.nx();
        const int ny = grid.ny();
        const double hy = grid.dim() == 2 ? grid.hy() : 0.0;
        auto kx = axis_log_kernel(nx, grid.hx(), eps, false);
        auto ky = axis_log_kernel(ny, hy, eps, false);
        plain = {nx, ny, kx, ky};
        cost_x = {nx, ny, axis_log_kernel(nx, grid.hx(), eps, true), ky};
        cost_y = {nx, ny, kx, axis_log_kernel(ny, hy, eps, true)};
    }
};

std::vector<double> lse(const kernels::SeparableLogKernel& k, const std::vector<double>& in) {
    std::vector<double> out(in.size());
    kernels::parallel::lse_separable(k, in, out);
    return out;
}

std::vector<double> log_weights(const Density& rho) {
    const Grid& grid = rho.grid();
    std::vector<double> w(grid.size(), kNegInf);
    for (int idx : grid.active_cells())
        if (rho[idx] > 0.0) w[idx] = std::log(rho[idx] * grid.cell_measure());
    return w;
}

/// <c, pi> for pi_ij = exp(row_i + col_j - c_ij / eps), row/col already in log form.
double plan_cost(const LogKernels& K, const std::vector<double>& row, const std::vector<double>& col) {
    const auto ex = lse(K.cost_x, col);
    const auto ey = lse(K.cost_y, col);
    double total = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == kNegInf) continue;
        if (ex[i] != kNegInf) total += std::exp(row[i] + ex[i]);
        if (ey[i] != kNegInf) total += std::exp(row[i] + ey[i]);
    }
    return total;
}

std::vector<double> eps_ladder(const Grid& grid, double eps, bool scaling) {
    std::vector<double> out;
    if (scaling) {
        double extent = grid.x_max() - grid.x_min();
        if (grid.dim() == 2) extent = std::max(extent, grid.y_max() - grid.y_min());
        double e = 0.1 * extent * extent;
        while (e > 2.0 * eps) {
            out.push_back(e);
            e *= 0.5;
        }
    }
    out.push_back(eps);
    return out;
}

void check_eps(const Grid& grid, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (eps < min_eps(grid)) {
        std::ostringstream msg;
        msg << "eps underflow: eps = " << eps << " leaves nearest-neighbour kernel weight below e^-4; use eps >= "
            << min_eps(grid) << " (h^2/4)";
        throw std::invalid_argument(msg.str());
    }
}

void zero_inactive(const Grid& grid, std::vector<double>& v) {
    for (int idx = 0; idx < grid.size(); ++idx)
        if (!grid.active(idx)) v[idx] = 0.0;
}

}  // namespace

double min_eps(const Grid& grid) {
    const double h = grid.h();
    return 0.25 * h * h;
}

double default_eps(const Grid& grid) {
    const double h = grid.h();
    return 2.0 * h * h;
}

SinkhornResult sinkhorn(const Density& rho, const Density& g, double eps, const SinkhornOptions& opts) {
    require_same_grid(rho.grid(), g.grid());
    const Grid& grid = rho.grid();
    check_eps(grid, eps);
    const auto la = log_weights(rho);
    const auto lb = log_weights(g);
    const int n = grid.size();

    SinkhornResult r;
    r.eps = eps;
    r.f.assign(n, 0.0);
    r.g.assign(n, 0.0);
    std::vector<double> in(n);
    const auto ladder = eps_ladder(grid, eps, opts.eps_scaling);
    for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
        const double e = ladder[stage];
        const bool last = stage + 1 == ladder.size();
        const double tol = last ? opts.tol_marg : std::max(opts.tol_marg, 1e-4);
        const LogKernels K(grid, e);
        double defect = std::numeric_limits<double>::infinity();
        for (int it = 0;; ++it) {
            for (int j = 0; j < n; ++j) in[j] = r.g[j] / e + lb[j];
            const auto lf = lse(K.plain, in);
            if (it > 0) {
                defect = 0.0;
                for (int i = 0; i < n; ++i)
                    if (la[i] != kNegInf) defect += std::abs(std::exp(la[i] + r.f[i] / e + lf[i]) - std::exp(la[i]));
                if (defect <= tol) break;
            }
            if (r.iterations >= opts.max_iter) break;
            for (int i = 0; i < n; ++i) r.f[i] = -e * lf[i];
            for (int i = 0; i < n; ++i) in[i] = r.f[i] / e + la[i];
            const auto lg = lse(K.plain, in);
            for (int j = 0; j < n; ++j) r.g[j] = -e * lg[j];
            ++r.iterations;
        }
        if (last) {
            r.marginal_defect = defect;
            r.converged = defect <= opts.tol_marg;
        }
    }
    zero_inactive(grid, r.f);
    zero_inactive(grid, r.g);

    const LogKernels K(grid, eps);
    std::vector<double> row(n), col(n);
    for (int i = 0; i < n; ++i) {
        row[i] = la[i] == kNegInf ? kNegInf : r.f[i] / eps + la[i];
        col[i] = lb[i] == kNegInf ? kNegInf : r.g[i] / eps + lb[i];
    }
    r.w2_eps = plan_cost(K, row, col);
    return r;
}

std::pair<std::vector<double>, std::vector<double>> plan_marginals(const Density& rho, const Density& g,
                                                                   const SinkhornResult& s) {
    const Grid& grid = rho.grid();
    const int n = grid.size();
    const auto la = log_weights(rho);
    const auto lb = log_weights(g);
    const LogKernels K(grid, s.eps);
    std::vector<double> row(n), col(n);
    for (int i = 0; i < n; ++i) {
        row[i] = la[i] == kNegInf ? kNegInf : s.f[i] / s.eps + la[i];
        col[i] = lb[i] == kNegInf ? kNegInf : s.g[i] / s.eps + lb[i];
    }
    const auto lr = lse(K.plain, col);
    const auto lc = lse(K.plain, row);
    std::vector<double> rows(n, 0.0), cols(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (row[i] != kNegInf) rows[i] = std::exp(row[i] + lr[i]);
        if (col[i] != kNegInf) cols[i] = std::exp(col[i] + lc[i]);
    }
    return {rows, cols};
}

std::vector<double> potential_from_dual(const Density& rho, std::span<const double> f) {
    const Grid& grid = rho.grid();
    std::vector<double> phi(grid.size(), 0.0);
    double mean = 0.0;
    for (int idx : grid.active_cells()) {
        phi[idx] = 0.5 * f[idx];
        mean += phi[idx] * rho[idx];
    }
    mean *= grid.cell_measure();
    for (int idx : grid.active_cells()) phi[idx] -= mean;
    return phi;
}

EntropicStepResult entropic_jko_step(const Density& g, const Potential& V, double tau, double eps,
                                     const EntropicStepOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    require_same_grid(g.grid(), V.grid());
    const Grid& grid = g.grid();
    check_eps(grid, eps);
    if (!(g.min_active() > 0.0)) throw std::invalid_argument("entropic step needs a strictly positive g");
    const int n = grid.size();
    const double log_m = std::log(grid.cell_measure());
    const auto lb = log_weights(g);
    std::vector<double> lmu(n, kNegInf);
    for (int idx : grid.active_cells()) lmu[idx] = log_m;

    std::vector<double> u(n, 0.0), v(n, 0.0);
    std::vector<double> mass(n, 0.0);  // cell masses a of the current iterate
    for (int idx : grid.active_cells()) mass[idx] = g[idx] * grid.cell_measure();
    std::vector<double> in(n), log_a(n), next(n);

    EntropicStepResult out{g};
    out.eps = eps;
    const auto ladder = eps_ladder(grid, eps, opts.eps_scaling);
    for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
        const double e = ladder[stage];
        const bool last = stage + 1 == ladder.size();
        const double tol_rho = last ? opts.tol_rho : std::max(opts.tol_rho, 1e-5);
        const double tol_marg = last ? opts.tol_marg : std::max(opts.tol_marg, 1e-4);
        const double lambda = e / (2.0 * tau);
        const LogKernels K(grid, e);
        double change = std::numeric_limits<double>::infinity();
        double defect = std::numeric_limits<double>::infinity();
        for (int it = 0;; ++it) {
            // Column projection onto g.
            for (int i = 0; i < n; ++i) in[i] = u[i] / e + lmu[i];
            const auto lv = lse(K.plain, in);
            if (it > 0) {
                defect = 0.0;
                for (int j = 0; j < n; ++j)
                    if (lb[j] != kNegInf) defect += std::abs(std::exp(lb[j] + v[j] / e + lv[j]) - std::exp(lb[j]));
                if (change <= tol_rho && defect <= tol_marg) break;
            }
            if (out.iterations >= opts.max_iter) break;
            for (int j = 0; j < n; ++j) v[j] = -e * lv[j];

            // KL prox of the free energy on the rho side.
            for (int j = 0; j < n; ++j) in[j] = v[j] / e + lb[j];
            const auto lp = lse(K.plain, in);
            change = 0.0;
            for (int idx : grid.active_cells()) {
                const double log_p = log_m + lp[idx];
                log_a[idx] = (lambda * log_p + log_m - 1.0 - V[idx]) / (1.0 + lambda);
                u[idx] = e * (log_a[idx] - log_p);
                next[idx] = std::exp(log_a[idx]);
                change += std::abs(next[idx] - mass[idx]);
            }
            for (int idx : grid.active_cells()) mass[idx] = next[idx];
            ++out.iterations;
        }
        if (last) {
            out.marginal_defect = defect;
            out.converged = change <= opts.tol_rho && defect <= opts.tol_marg;
        }
    }
    zero_inactive(grid, u);
    zero_inactive(grid, v);

    std::vector<double> dens(n, 0.0);
    for (int idx : grid.active_cells()) dens[idx] = mass[idx] / grid.cell_measure();
    out.rho_next = Density::normalize(grid, std::move(dens));
    out.u = u;
    out.v = v;
    out.phi_approx = potential_from_dual(out.rho_next, u);

    const LogKernels K(grid, eps);
    std::vector<double> row(n, kNegInf), col(n, kNegInf);
    for (int idx : grid.active_cells()) {
        row[idx] = u[idx] / eps + log_m;
        col[idx] = v[idx] / eps + lb[idx];
    }
    out.w2_eps = plan_cost(K, row, col);

    std::vector<double> q(n, 0.0);
    double c = 0.0;
    for (int idx : grid.active_cells()) {
        q[idx] = std::log(out.rho_next[idx]) + V[idx] + out.phi_approx[idx] / tau;
        c += q[idx] * out.rho_next[idx];
    }
    c *= grid.cell_measure();
    for (int idx : grid.active_cells()) out.optimality_residual = std::max(out.optimality_residual, std::abs(q[idx] - c));
    return out;
}

ArgmaxProbe boundary_argmax_probe(const Density& rho, const Density& g, double eps, double bound_tol,
                                  const SinkhornOptions& opts) {
    ArgmaxProbe p{{}, sinkhorn(rho, g, eps, opts)};
    p.phi = potential_from_dual(rho, p.transport.f);
    p.check = interior_argmax_check(rho.grid(), p.phi, bound_tol);
    return p;
}

}  // namespace jko
