#include "jko/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jko/kernels.hpp"
#include "jko/lipverify.hpp"

namespace jko {

namespace {

// Central differences inside, second-order one-sided stencils at the edge of
// the active set. Exact on quadratics, so a quadratic extends itself.
VectorField tangent_gradient(const Grid& grid, std::span<const double> f) {
    VectorField out{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
    const int nx = grid.nx(), ny = grid.ny();
    auto ok = [&](int i, int j) { return i >= 0 && i < nx && j >= 0 && j < ny && grid.active(grid.index(i, j)); };
    auto at = [&](int i, int j) { return f[grid.index(i, j)]; };
    auto axis = [&](int i, int j, int di, int dj, double h) {
        const bool p1 = ok(i + di, j + dj), m1 = ok(i - di, j - dj);
        if (p1 && m1) return (at(i + di, j + dj) - at(i - di, j - dj)) / (2.0 * h);
        if (p1 && ok(i + 2 * di, j + 2 * dj))
            return (-3.0 * at(i, j) + 4.0 * at(i + di, j + dj) - at(i + 2 * di, j + 2 * dj)) / (2.0 * h);
        if (m1 && ok(i - 2 * di, j - 2 * dj))
            return (3.0 * at(i, j) - 4.0 * at(i - di, j - dj) + at(i - 2 * di, j - 2 * dj)) / (2.0 * h);
        if (p1) return (at(i + di, j + dj) - at(i, j)) / h;
        if (m1) return (at(i, j) - at(i - di, j - dj)) / h;
        return 0.0;
    };
    for (int idx : grid.active_cells()) {
        const int i = grid.ix(idx), j = grid.iy(idx);
        out.dx[idx] = axis(i, j, 1, 0, grid.hx());
        if (grid.dim() == 2 && ny > 1) out.dy[idx] = axis(i, j, 0, 1, grid.hy());
    }
    return out;
}


int pad_cells(double gap, double h) {
    if (gap < -1e-12 * h) throw std::invalid_argument("enclosing radius smaller than the domain");
    return static_cast<int>(std::ceil(gap / h - 1e-9));
}

std::vector<Point> padded_points(const Grid& outer, int rx, int ry) {
    const int px = outer.nx() + 2 * rx;
    const int py = outer.ny() + 2 * ry;
    std::vector<Point> pts(static_cast<std::size_t>(px) * py);
    for (int j = 0; j < py; ++j) {
        for (int i = 0; i < px; ++i) {
            Point p{outer.x_min() + (i - rx + 0.5) * outer.hx(), 0.0};
            if (outer.dim() == 2) p.y = outer.y_min() + (j - ry + 0.5) * outer.hy();
            pts[static_cast<std::size_t>(j) * px + i] = p;
        }
    }
    return pts;
}

std::vector<double> convolve(const Grid& outer, const Mollifier& m, std::span<const double> padded) {
    std::vector<double> out(outer.size());
    kernels::parallel::convolve_padded(padded, outer.nx(), outer.ny(), m.weights, m.rx, m.ry, out);
    return out;
}

}  // namespace

ExtensionSetup ExtensionSetup::make(const Grid& inner, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("enclosing radius must be positive");
    const Point c = inner.domain_center();
    ExtensionSetup s{inner, inner};
    s.offset_x = pad_cells(inner.x_min() - (c.x - R), inner.hx());
    const double x0 = inner.x_min() - s.offset_x * inner.hx();
    const double x1 = inner.x_max() + s.offset_x * inner.hx();
    const int nx = inner.nx() + 2 * s.offset_x;
    if (inner.dim() == 1) {
        s.outer = Grid::interval(x0, x1, nx);
    } else {
        s.offset_y = pad_cells(inner.y_min() - (c.y - R), inner.hy());
        const double y0 = inner.y_min() - s.offset_y * inner.hy();
        const double y1 = inner.y_max() + s.offset_y * inner.hy();
        s.outer = Grid::box(x0, x1, y0, y1, nx, inner.ny() + 2 * s.offset_y);
    }
    return s;
}

int ExtensionSetup::outer_index(int inner_idx) const {
    return outer.index(inner.ix(inner_idx) + offset_x, inner.iy(inner_idx) + offset_y);
}

double ExtensionSetup::margin() const {
    double m = offset_x * inner.hx();
    if (inner.dim() == 2) m = std::min(m, offset_y * inner.hy());
    return m;
}

double ExtensionSetup::required_radius(int n) const {
    double half = 0.5 * (inner.x_max() - inner.x_min());
    if (inner.dim() == 2) half = std::max(half, 0.5 * (inner.y_max() - inner.y_min()));
    return half + 2.0 / n;
}

void ExtensionSetup::require_support_fits(int n) const {
    if (n < 1) throw std::invalid_argument("mollifier scale n must be >= 1");
    if (1.0 / n > 0.5 * margin() + 1e-12) {
        std::ostringstream msg;
        msg << "mollifier support 1/" << n << " exceeds half the distance " << margin()
            << " to the enclosing boundary; need R >= " << required_radius(n);
        throw std::invalid_argument(msg.str());
    }
}

std::vector<char> ExtensionSetup::inner_mask() const {
    std::vector<char> mask(outer.size(), 0);
    for (int idx : inner.active_cells()) mask[outer_index(idx)] = 1;
    return mask;
}

Mollifier make_mollifier(const Grid& grid, int n) {
    if (n < 1) throw std::invalid_argument("mollifier scale n must be >= 1");
    Mollifier m;
    m.n = n;
    m.rx = static_cast<int>(std::floor(1.0 / (n * grid.hx()) + 1e-9));
    m.ry = grid.dim() == 2 ? static_cast<int>(std::floor(1.0 / (n * grid.hy()) + 1e-9)) : 0;
    const int wx = 2 * m.rx + 1;
    m.weights.assign(static_cast<std::size_t>(wx) * (2 * m.ry + 1), 0.0);
    double total = 0.0;
    for (int b = -m.ry; b <= m.ry; ++b) {
        for (int a = -m.rx; a <= m.rx; ++a) {
            const double u = a * grid.hx() * n;
            const double v = grid.dim() == 2 ? b * grid.hy() * n : 0.0;
            const double r2 = u * u + v * v;
            const double w = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
            m.weights[static_cast<std::size_t>(b + m.ry) * wx + (a + m.rx)] = w;
            total += w;
        }
    }
    for (double& w : m.weights) w /= total;
    return m;
}

std::vector<double> extend_alpha_convex(const Potential& V, std::span<const Point> targets) {
    const Grid& grid = V.grid();
    const auto grad = tangent_gradient(grid, V.values());
    const auto cells = grid.active_cells();
    std::vector<Point> src(cells.size());
    std::vector<double> val(cells.size()), gx(cells.size()), gy(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        src[k] = grid.center(cells[k]);
        val[k] = V[cells[k]];
        gx[k] = grad.dx[cells[k]];
        gy[k] = grad.dy[cells[k]];
    }
    std::vector<double> out(targets.size());
    kernels::parallel::sup_tangent_quadratics(src, val, gx, gy, V.alpha(), targets, out);
    return out;
}

LipschitzExtension extend_lipschitz(const Grid& inner, std::span<const double> h, std::span<const Point> targets) {
    LipschitzExtension e;
    e.lip = lip_const(inner, h, LipMethod::Pairwise).value();
    const auto cells = inner.active_cells();
    std::vector<Point> src(cells.size());
    std::vector<double> val(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        src[k] = inner.center(cells[k]);
        val[k] = h[cells[k]];
    }
    e.values.resize(targets.size());
    kernels::parallel::sup_cones(src, val, e.lip, targets, e.values);
    return e;
}

Approximants build_approximants(const ExtensionSetup& setup, const Potential& V, const Density& g, int n) {
    require_same_grid(setup.inner, V.grid());
    require_same_grid(setup.inner, g.grid());
    setup.require_support_fits(n);
    const Grid& outer = setup.outer;
    const Mollifier moll = make_mollifier(outer, n);
    const auto pts = padded_points(outer, moll.rx, moll.ry);
    const int px = outer.nx() + 2 * moll.rx;

    const auto h_inner = log_density_plus_potential(g, V);
    auto v_pad = extend_alpha_convex(V, pts);
    auto h_ext = extend_lipschitz(setup.inner, h_inner, pts);

    std::vector<double> pen_pad(v_pad.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double d = setup.inner.distance_to_domain(pts[k]);
        pen_pad[k] = v_pad[k] + n * d * d;
    }

    Approximants a{n, outer};
    a.lip_h = h_ext.lip;
    a.v_tilde_conv = convolve(outer, moll, v_pad);
    a.v_n = convolve(outer, moll, pen_pad);
    a.h_n = convolve(outer, moll, h_ext.values);

    // Unpadded copies of the extensions.
    a.v_tilde.resize(outer.size());
    a.h_tilde.resize(outer.size());
    for (int j = 0; j < outer.ny(); ++j) {
        for (int i = 0; i < outer.nx(); ++i) {
            const std::size_t k = static_cast<std::size_t>(j + moll.ry) * px + (i + moll.rx);
            a.v_tilde[outer.index(i, j)] = v_pad[k];
            a.h_tilde[outer.index(i, j)] = h_ext.values[k];
        }
    }

    double top = -std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < outer.size(); ++idx) top = std::max(top, a.h_n[idx] - a.v_n[idx]);
    a.g_n.resize(outer.size());
    double total = 0.0;
    for (int idx = 0; idx < outer.size(); ++idx) {
        a.g_n[idx] = std::exp(a.h_n[idx] - a.v_n[idx] - top);
        total += a.g_n[idx];
    }
    total *= outer.cell_measure();
    for (double& v : a.g_n) v /= total;
    a.lambda = std::exp(-top) / total;

    a.sandwich_min = std::numeric_limits<double>::infinity();
    a.sandwich_max = -std::numeric_limits<double>::infinity();
    for (int idx : setup.inner.active_cells()) {
        const int o = setup.outer_index(idx);
        const double gap = a.v_n[o] - a.v_tilde_conv[o];
        a.sandwich_min = std::min(a.sandwich_min, gap);
        a.sandwich_max = std::max(a.sandwich_max, gap);
        a.v_tilde_defect = std::max(a.v_tilde_defect, std::abs(a.v_tilde[o] - V[idx]));
        a.h_tilde_defect = std::max(a.h_tilde_defect, std::abs(a.h_tilde[o] - h_inner[idx]));
    }
    const auto gh = gradient(outer, a.h_n);
    for (int idx = 0; idx < outer.size(); ++idx) a.grad_h_n_max = std::max(a.grad_h_n_max, std::sqrt(gh.norm_squared(idx)));
    a.v_n_min_second_difference = Potential(outer, a.v_n, V.alpha()).min_second_difference();
    a.v_tilde_min = *std::min_element(a.v_tilde.begin(), a.v_tilde.end());
    return a;
}

double lip_penalty_bound_check(const ExtensionSetup& setup, std::span<const double> v_n, const Potential& V) {
    require_same_grid(setup.inner, V.grid());
    if (static_cast<int>(v_n.size()) != setup.outer.size()) throw std::invalid_argument("V_n size mismatch");
    std::vector<double> restricted(setup.inner.size(), 0.0);
    for (int idx : setup.inner.active_cells()) restricted[idx] = v_n[setup.outer_index(idx)];
    return lip_const(setup.inner, restricted, LipMethod::Pairwise).value() -
           lip_const(setup.inner, V.values(), LipMethod::Pairwise).value();
}

double mass_outside(const ExtensionSetup& setup, std::span<const double> g, double delta) {
    double m = 0.0;
    for (int idx = 0; idx < setup.outer.size(); ++idx)
        if (setup.inner.distance_to_domain(setup.outer.center(idx)) > delta) m += g[idx];
    return m * setup.outer.cell_measure();
}

double max_outside(const ExtensionSetup& setup, std::span<const double> g, double delta) {
    double m = 0.0;
    for (int idx = 0; idx < setup.outer.size(); ++idx)
        if (setup.inner.distance_to_domain(setup.outer.center(idx)) > delta) m = std::max(m, g[idx]);
    return m;
}

}  // namespace jko
