#pragma once

#include <span>
#include <vector>

#include "jko/density.hpp"

namespace jko {

/// Exact CDF of a piecewise-constant 1-D density and its generalized inverse.
class PiecewiseCdf {
public:
    explicit PiecewiseCdf(const Density& rho);

    /// Piecewise-linear integral of the density from the left endpoint.
    double cdf(double x) const;
    /// inf { x : cdf(x) >= p }, clamped to the interval for p outside [0, 1].
    double quantile(double p) const;

    /// The affine piece of the quantile that is active at pm, evaluated at p.
    /// Gives one-sided limits at the jumps of the quantile.
    double quantile_piece(double pm, double p) const;
    /// Cumulative mass at the cell edges, n + 1 entries starting at 0.
    const std::vector<double>& edges() const { return cumulative_; }

    double left() const { return a_; }
    double right() const { return a_ + h_ * static_cast<double>(values_.size()); }

private:
    double a_;
    double h_;
    std::vector<double> values_;
    std::vector<double> cumulative_;  // n + 1 entries, cumulative_[0] = 0
};

struct Ot1dOptions {
    /// Refuse targets with a vanishing cell. Turned off only for translation
    /// examples between disjointly supported indicators.
    bool require_positive_target = true;
};

/// Optimal transport from rho (source) to g (target) on a common interval grid.
struct TransportPlanResult {
    Grid grid;
    double w2 = 0.0;
    double w2_squared = 0.0;
    std::vector<double> x;
    std::vector<double> map_T;     // T(x_i)
    std::vector<double> phi;       // Kantorovich potential, gauge int phi d rho = 0
    std::vector<double> phi_grad;  // central differences of phi
    std::vector<double> residual_ma;
    double residual_cyclic = 0.0;  // largest decrease of T between neighbours
};

/// Monotone rearrangement T = Q_g o F_rho; phi from trapezoid integration of
/// phi' = x - T. Throws if g vanishes somewhere (unless allowed) or if the
/// computed map fails to be monotone.
TransportPlanResult solve_1d(const Density& rho, const Density& g, const Ot1dOptions& opts = {});

/// Squared Wasserstein distance only: int_0^1 (Q_rho - Q_g)^2 dp, integrated
/// exactly over the merged breakpoints of both quantiles. Symmetric in its arguments.
double w2_squared_1d(const Density& rho, const Density& g, const Ot1dOptions& opts = {});

/// (1 - phi'') - rho / (g o T) on interior cells, zero on the two end cells.
///
/// phi'' is the central second difference of phi. The target density is
/// evaluated at T(x_i) as the mean of g over the image of the stencil,
/// [T(x_{i-1}), T(x_{i+1})]; pointwise evaluation of the piecewise-constant g
/// carries an O(h) sawtooth that does not vanish under refinement.
std::vector<double> monge_ampere_residual(const TransportPlanResult& plan, const Density& rho, const Density& g);

/// Defect of the differentiated Monge-Ampere identity
///   -phi''' / (1 - phi'') = (log rho)' - (log g)'(T) (1 - phi'')
/// on cells 2 .. n-3 (zero elsewhere). The left side is taken as the central
/// difference of log(1 - phi''), and the last term as the central difference
/// of log g(T(x)) with the stencil-mean evaluation above (chain rule).
std::vector<double> differentiated_ma_residual(const TransportPlanResult& plan, const Density& rho,
                                               const Density& g);

/// Max |r_i| over cells where the residual is reported.
double max_abs(std::span<const double> r);

}  // namespace jko
