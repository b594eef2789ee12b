#include "jko/lipverify.hpp"

#include <cmath>
#include <stdexcept>

#include "jko/kernels.hpp"

namespace jko {

const char* status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Vacuous: return "vacuous";
    }
    return "unknown";
}

LipReport lip_const(const Grid& grid, std::span<const double> f, LipMethod method, std::span<const char> mask) {
    if (static_cast<int>(f.size()) != grid.size()) throw std::invalid_argument("lip_const: size mismatch");
    if (!mask.empty() && static_cast<int>(mask.size()) != grid.size())
        throw std::invalid_argument("lip_const: mask size mismatch");
    std::vector<int> cells;
    for (int idx : grid.active_cells())
        if (mask.empty() || mask[idx]) cells.push_back(idx);
    if (cells.size() < 2) throw std::invalid_argument("lip_const needs at least 2 cells");

    LipReport r;
    const bool want_pair = method != LipMethod::Gradient;
    const bool want_grad = method != LipMethod::Pairwise;

    if (want_pair && static_cast<int>(cells.size()) > kPairwiseCellLimit) r.degraded = true;

    if (want_pair && !r.degraded) {
        std::vector<Point> pts(cells.size());
        std::vector<double> vals(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            pts[k] = grid.center(cells[k]);
            vals[k] = f[cells[k]];
        }
        const auto best = kernels::parallel::max_pairwise_slope(pts, vals);
        r.lip_pairwise = best.slope;
        r.has_pairwise = true;
        r.argmax_cell = cells[best.i];
        r.argmax_partner = cells[best.j];
    }
    if (want_grad || r.degraded) {
        const auto g = gradient(grid, f);
        double best = -1.0;
        for (int idx : cells) {
            const double v = std::sqrt(g.norm_squared(idx));
            if (v > best) {
                best = v;
                r.argmax_grad_cell = idx;
            }
        }
        r.lip_grad = best;
        r.has_grad = true;
        if (!r.has_pairwise) r.argmax_cell = r.argmax_grad_cell;
    }
    r.method = r.has_pairwise && r.has_grad ? "both" : (r.has_pairwise ? "pairwise" : "gradient");
    return r;
}

double theorem_tolerance(const Grid& grid, double tau, double optimality_residual, double lip_V, double tol_factor) {
    return tol_factor * (grid.h() + optimality_residual / tau) * (1.0 + lip_V);
}

TheoremCheck check_theorem(const Density& rho_next, const Density& g, const Potential& V, double tau,
                           const TheoremOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    require_same_grid(rho_next.grid(), g.grid());
    TheoremCheck c;
    c.tau = tau;
    c.alpha = V.alpha();
    c.n = rho_next.grid().active_count();
    c.backend = opts.backend;
    const double factor = 1.0 + V.alpha() * tau;
    if (factor <= 0.0) {
        c.status = CheckStatus::Vacuous;
        return c;
    }
    if (!(rho_next.min_active() > 0.0) || !(g.min_active() > 0.0))
        throw std::invalid_argument("theorem check needs strictly positive densities");

    const auto f_next = log_density_plus_potential(rho_next, V);
    const auto f_prev = log_density_plus_potential(g, V);
    const auto lip_next = lip_const(rho_next.grid(), f_next, LipMethod::Pairwise);
    const auto lip_prev = lip_const(g.grid(), f_prev, LipMethod::Pairwise);
    const auto lip_V = lip_const(V.grid(), V.values(), LipMethod::Pairwise);

    c.lhs = lip_next.value() * factor;
    c.rhs = lip_prev.value();
    c.margin = c.rhs - c.lhs;
    c.tol = theorem_tolerance(rho_next.grid(), tau, opts.optimality_residual, lip_V.value(), opts.tol_factor);
    c.status = c.margin >= -c.tol ? CheckStatus::Pass : CheckStatus::Fail;
    return c;
}

std::vector<double> check_decay_envelope(std::span<const Density> densities, const Potential& V, double tau) {
    const double factor = 1.0 + V.alpha() * tau;
    if (factor <= 0.0) throw std::domain_error("vacuous regime: 1 + alpha tau <= 0");
    std::vector<double> m;
    m.reserve(densities.size());
    double scale = 1.0;
    for (const auto& rho : densities) {
        const auto f = log_density_plus_potential(rho, V);
        m.push_back(scale * lip_const(rho.grid(), f, LipMethod::Pairwise).value());
        scale *= factor;
    }
    return m;
}

ArgmaxCheck interior_argmax_check(const Grid& grid, std::span<const double> phi, double bound_tol) {
    if (static_cast<int>(phi.size()) != grid.size()) throw std::invalid_argument("phi size mismatch");
    if (grid.shape() == Shape::Box) throw std::invalid_argument("interior_argmax_check needs a disc or an interval");
    const auto grad = gradient(grid, phi);
    ArgmaxCheck r;
    r.radius = grid.domain_radius();
    r.bound_tol = bound_tol < 0.0 ? 0.05 * r.radius : bound_tol;
    double best = -1.0;
    for (int idx : grid.active_cells()) {
        const double v = std::sqrt(grad.norm_squared(idx));
        if (grid.boundary(idx)) r.max_boundary = std::max(r.max_boundary, v);
        else r.max_interior = std::max(r.max_interior, v);
        if (v > best) {
            best = v;
            r.argmax_cell = idx;
        }
    }
    r.max_overall = best;
    r.margin = r.max_interior - r.max_boundary;
    r.vacuous = best <= 1e-12 * std::max(1.0, r.radius);
    r.is_interior = !r.vacuous && r.max_interior > r.max_boundary;
    const double bound = std::sqrt(2.0) * r.radius + r.bound_tol;
    r.boundary_bound_ok = r.max_boundary <= bound;
    r.global_bound_ok = r.max_overall <= bound;
    return r;
}

}  // namespace jko
