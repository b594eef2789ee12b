#include "jko/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jko {

namespace {

void require_interval(const Grid& grid) {
    if (grid.shape() != Shape::Interval) throw std::invalid_argument("1-D transport needs an interval grid");
}

// Mean of g over [lo, hi]; falls back to the cell value at lo for a
// degenerate interval.
double mean_over(const PiecewiseCdf& G, const Density& g, double lo, double hi) {
    const double len = hi - lo;
    const double h = g.grid().hx();
    if (len > 1e-12 * h) return (G.cdf(hi) - G.cdf(lo)) / len;
    const int k = std::clamp(static_cast<int>(std::floor((lo - g.grid().x_min()) / h)), 0, g.grid().nx() - 1);
    return g[k];
}

std::vector<double> stencil_target_density(const TransportPlanResult& plan, const Density& g) {
    const int n = plan.grid.nx();
    const PiecewiseCdf G(g);
    std::vector<double> out(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) out[i] = mean_over(G, g, plan.map_T[i - 1], plan.map_T[i + 1]);
    return out;
}

}  // namespace

namespace {

// Both quantiles are affine between consecutive merged breakpoints, so the
// squared difference integrates exactly as (p1 - p0)(d0^2 + d0 d1 + d1^2) / 3.
double exact_w2_squared(const PiecewiseCdf& F, const PiecewiseCdf& G) {
    std::vector<double> br;
    br.reserve(F.edges().size() + G.edges().size());
    br.insert(br.end(), F.edges().begin(), F.edges().end());
    br.insert(br.end(), G.edges().begin(), G.edges().end());
    for (double& b : br) b = std::clamp(b, 0.0, 1.0);
    br.push_back(0.0);
    br.push_back(1.0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double p0 = br[i], p1 = br[i + 1];
        const double pm = 0.5 * (p0 + p1);
        const double d0 = F.quantile_piece(pm, p0) - G.quantile_piece(pm, p0);
        const double d1 = F.quantile_piece(pm, p1) - G.quantile_piece(pm, p1);
        const double term = (p1 - p0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

PiecewiseCdf::PiecewiseCdf(const Density& rho)
    : a_(rho.grid().x_min()), h_(rho.grid().hx()), values_(rho.values().begin(), rho.values().end()) {
    require_interval(rho.grid());
    cumulative_.resize(values_.size() + 1, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) cumulative_[i + 1] = cumulative_[i] + values_[i] * h_;
}

double PiecewiseCdf::cdf(double x) const {
    const int n = static_cast<int>(values_.size());
    if (x <= a_) return 0.0;
    const double t = (x - a_) / h_;
    if (t >= n) return cumulative_[n];
    const int k = std::min(static_cast<int>(std::floor(t)), n - 1);
    return cumulative_[k] + values_[k] * (x - (a_ + k * h_));
}

double PiecewiseCdf::quantile(double p) const {
    if (p <= 0.0) return a_;
    // First cell whose right cumulative value reaches p.
    auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), p);
    if (it == cumulative_.end()) return right();
    const int k = static_cast<int>(it - cumulative_.begin()) - 1;
    if (values_[k] <= 0.0) return a_ + k * h_;
    const double x = a_ + k * h_ + (p - cumulative_[k]) / values_[k];
    return std::min(x, a_ + (k + 1) * h_);
}

double PiecewiseCdf::quantile_piece(double pm, double p) const {
    auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), pm);
    if (it == cumulative_.end()) return right();
    const int k = static_cast<int>(it - cumulative_.begin()) - 1;
    if (values_[k] <= 0.0) return a_ + k * h_;
    return a_ + k * h_ + (p - cumulative_[k]) / values_[k];
}

TransportPlanResult solve_1d(const Density& rho, const Density& g, const Ot1dOptions& opts) {
    require_same_grid(rho.grid(), g.grid());
    require_interval(rho.grid());
    if (opts.require_positive_target && !(g.min_active() > 0.0))
        throw std::invalid_argument("quantile ill-defined: target density vanishes");

    const Grid& grid = rho.grid();
    const int n = grid.nx();
    const double h = grid.hx();
    const PiecewiseCdf F(rho);
    const PiecewiseCdf G(g);

    TransportPlanResult out{grid};
    out.x = grid.x_coords();
    out.map_T.resize(n);
    for (int i = 0; i < n; ++i) out.map_T[i] = G.quantile(F.cdf(out.x[i]));

    double violation = 0.0;
    for (int i = 0; i + 1 < n; ++i) violation = std::max(violation, out.map_T[i] - out.map_T[i + 1]);
    out.residual_cyclic = violation;
    if (violation > 1e-10 * (grid.x_max() - grid.x_min()))
        throw std::logic_error("transport map is not monotone");

    const double w2sq = exact_w2_squared(F, G);
    out.w2_squared = w2sq;
    out.w2 = std::sqrt(w2sq);

    std::vector<double> dphi(n);
    for (int i = 0; i < n; ++i) dphi[i] = out.x[i] - out.map_T[i];
    out.phi.assign(n, 0.0);
    for (int i = 1; i < n; ++i) out.phi[i] = out.phi[i - 1] + 0.5 * h * (dphi[i - 1] + dphi[i]);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += out.phi[i] * rho[i];
    mean *= h;
    for (double& p : out.phi) p -= mean;

    out.phi_grad = gradient(grid, out.phi).dx;
    if (g.min_active() > 0.0) out.residual_ma = monge_ampere_residual(out, rho, g);
    else out.residual_ma.assign(n, 0.0);
    return out;
}

double w2_squared_1d(const Density& rho, const Density& g, const Ot1dOptions& opts) {
    return solve_1d(rho, g, opts).w2_squared;
}

std::vector<double> monge_ampere_residual(const TransportPlanResult& plan, const Density& rho, const Density& g) {
    const int n = plan.grid.nx();
    const double h = plan.grid.hx();
    const auto g_at_T = stencil_target_density(plan, g);
    std::vector<double> r(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double phi_xx = (plan.phi[i + 1] - 2.0 * plan.phi[i] + plan.phi[i - 1]) / (h * h);
        r[i] = (1.0 - phi_xx) - rho[i] / g_at_T[i];
    }
    return r;
}

std::vector<double> differentiated_ma_residual(const TransportPlanResult& plan, const Density& rho,
                                               const Density& g) {
    const int n = plan.grid.nx();
    const double h = plan.grid.hx();
    if (!(rho.min_active() > 0.0) || !(g.min_active() > 0.0))
        throw std::invalid_argument("differentiated Monge-Ampere residual needs positive densities");
    const auto g_at_T = stencil_target_density(plan, g);
    std::vector<double> jac(n, 1.0);  // 1 - phi''
    for (int i = 1; i + 1 < n; ++i)
        jac[i] = 1.0 - (plan.phi[i + 1] - 2.0 * plan.phi[i] + plan.phi[i - 1]) / (h * h);
    std::vector<double> r(n, 0.0);
    for (int i = 2; i + 2 < n; ++i) {
        if (!(jac[i - 1] > 0.0) || !(jac[i + 1] > 0.0)) continue;
        const double lhs = (std::log(jac[i + 1]) - std::log(jac[i - 1])) / (2.0 * h);
        const double dlog_rho = (std::log(rho[i + 1]) - std::log(rho[i - 1])) / (2.0 * h);
        const double dlog_g_T = (std::log(g_at_T[i + 1]) - std::log(g_at_T[i - 1])) / (2.0 * h);
        r[i] = lhs - (dlog_rho - dlog_g_T);
    }
    return r;
}

double max_abs(std::span<const double> r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace jko
