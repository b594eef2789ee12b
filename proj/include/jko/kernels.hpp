#pragma once

// Data-parallel inner loops shared by the solvers. Every kernel has a serial
// reference in jko::kernels::serial and an OpenMP version in
// jko::kernels::parallel; both produce bitwise-identical results (each output
// is computed by the same sequence of floating-point operations, and
// reductions over maxima break ties by lowest index).

#include <span>
#include <vector>

#include "jko/grid.hpp"

namespace jko::kernels {

struct SlopeMax {
    double slope = 0.0;
    int i = -1;  // lower linear index of the maximising pair
    int j = -1;
};

/// Lattice for the separable log-sum-exp: out(i1, i2) = LSE over (j1, j2) of
/// in(j1, j2) + log_kx(i1, j1) + log_ky(i2, j2). Matrices are row-major
/// nx*nx and ny*ny; fields are row-major ny*nx (index = j * nx + i).
struct SeparableLogKernel {
    int nx = 0;
    int ny = 0;
    std::vector<double> log_kx;
    std::vector<double> log_ky;
};

namespace serial {

/// max |f(p) - f(q)| / |p - q| over pairs of the given points.
SlopeMax max_pairwise_slope(std::span<const Point> pts, std::span<const double> f);

/// Entries of `in` equal to -inf are skipped. `out` must have nx*ny entries.
void lse_separable(const SeparableLogKernel& k, std::span<const double> in, std::span<double> out);

/// out[t] = max over sources s of V[s] + grad[s].(x_t - y_s) + alpha/2 |x_t - y_s|^2.
void sup_tangent_quadratics(std::span<const Point> src, std::span<const double> value,
                            std::span<const double> grad_x, std::span<const double> grad_y, double alpha,
                            std::span<const Point> targets, std::span<double> out);

/// out[t] = max over sources s of h[s] - lip * |x_t - y_s|.
void sup_cones(std::span<const Point> src, std::span<const double> value, double lip, std::span<const Point> targets,
               std::span<double> out);

/// 2-D discrete convolution on a padded lattice. `in` is (ny + 2 ry) x (nx + 2 rx),
/// `weights` is (2 ry + 1) x (2 rx + 1), centred at (rx, ry):
/// out(i, j) = sum over (a, b) of w(a, b) in(i + 2 rx - a, j + 2 ry - b) in padded indices.
void convolve_padded(std::span<const double> in, int nx, int ny, std::span<const double> weights, int rx, int ry,
                     std::span<double> out);

}  // namespace serial

namespace parallel {

SlopeMax max_pairwise_slope(std::span<const Point> pts, std::span<const double> f);
void lse_separable(const SeparableLogKernel& k, std::span<const double> in, std::span<double> out);
void sup_tangent_quadratics(std::span<const Point> src, std::span<const double> value,
                            std::span<const double> grad_x, std::span<const double> grad_y, double alpha,
                            std::span<const Point> targets, std::span<double> out);
void sup_cones(std::span<const Point> src, std::span<const double> value, double lip, std::span<const Point> targets,
               std::span<double> out);
void convolve_padded(std::span<const double> in, int nx, int ny, std::span<const double> weights, int rx, int ry,
                     std::span<double> out);

}  // namespace parallel

}  // namespace jko::kernels
