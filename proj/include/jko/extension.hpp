#pragma once

#include <span>
#include <vector>

#include "jko/density.hpp"

namespace jko {

/// Inner domain Omega embedded in an enclosing lattice with the same spacing.
///
/// The enclosing grid is the interval (1-D) or box (2-D) of half-width R
/// about the centre of Omega, widened to a whole number of cells so the
/// inner cells coincide with enclosing cells.
struct ExtensionSetup {
    Grid inner;
    Grid outer;
    int offset_x = 0;  // outer index of inner column 0
    int offset_y = 0;

    static ExtensionSetup make(const Grid& inner, double R);

    /// outer linear index of each inner cell (all lattice cells, row-major).
    int outer_index(int inner_idx) const;
    /// dist(Omega, boundary of the enclosing domain).
    double margin() const;
    /// Minimal R for which mollifier scale n fits: 1/n <= margin / 2.
    double required_radius(int n) const;
    /// Throws std::invalid_argument naming the minimal R when 1/n > margin / 2.
    void require_support_fits(int n) const;
    /// Cells of the outer grid lying in Omega.
    std::vector<char> inner_mask() const;
};

/// Sampled bump c exp(-1 / (1 - |x|^2)) scaled to support radius 1/n,
/// normalized to unit discrete mass on the lattice offsets.
struct Mollifier {
    int n = 1;
    int rx = 0;
    int ry = 0;
    std::vector<double> weights;  // (2 ry + 1) x (2 rx + 1), row-major
};

Mollifier make_mollifier(const Grid& grid, int n);

/// sup over Omega cells y of V(y) + grad V(y).(x - y) + alpha/2 |x - y|^2,
/// with grad V from core finite differences.
std::vector<double> extend_alpha_convex(const Potential& V, std::span<const Point> targets);

struct LipschitzExtension {
    std::vector<double> values;
    double lip = 0.0;  // discrete Lip_Omega(h) used for the cones
};

/// McShane extension sup_y h(y) - L |x - y| over active cells y of Omega.
/// (The sign of the cone term is negative: with +L|x - y| the sup exceeds h
/// on Omega and is not an extension.)
LipschitzExtension extend_lipschitz(const Grid& inner, std::span<const double> h, std::span<const Point> targets);

struct Approximants {
    int n = 0;
    Grid outer;
    std::vector<double> v_tilde;       // extension on the outer grid
    std::vector<double> v_tilde_conv;  // V~ * xi_n
    std::vector<double> v_n;           // (V~ + n d^2) * xi_n
    std::vector<double> h_tilde;
    std::vector<double> h_n;           // h~ * xi_n
    std::vector<double> g_n;           // lambda_n exp(h_n - V_n), unit mass on the outer grid
    double lambda = 0.0;
    double lip_h = 0.0;

    // Audits.
    double sandwich_min = 0.0;   // min over Omega of V_n - V~ * xi_n
    double sandwich_max = 0.0;   // max over Omega of V_n - V~ * xi_n
    double grad_h_n_max = 0.0;   // max |grad h_n| over the outer grid
    double v_n_min_second_difference = 0.0;  // over the outer grid, per axis
    double v_tilde_min = 0.0;
    double v_tilde_defect = 0.0;  // max over Omega of |V~ - V|
    double h_tilde_defect = 0.0;  // max over Omega of |h~ - h|
};

/// V_n, h_n, g_n on the enclosing grid for h = log g + V.
Approximants build_approximants(const ExtensionSetup& setup, const Potential& V, const Density& g, int n);

/// Lip_Omega(V_n) - Lip_Omega(V), V_n given on the outer grid.
double lip_penalty_bound_check(const ExtensionSetup& setup, std::span<const double> v_n, const Potential& V);

/// Mass of g (outer grid) on cells with d(x, Omega) > delta.
double mass_outside(const ExtensionSetup& setup, std::span<const double> g, double delta);
/// Largest value of g on cells with d(x, Omega) > delta.
double max_outside(const ExtensionSetup& setup, std::span<const double> g, double delta);

}  // namespace jko
