#pragma once

#include <vector>

#include "jko/density.hpp"
#include "jko/lipverify.hpp"

namespace jko {

struct SinkhornOptions {
    double tol_marg = 1e-8;  // L1 defect of the row marginal
    int max_iter = 20000;    // over all eps stages
    bool eps_scaling = true; // warm start from coarser eps, halving down to the target
};

/// Log-domain entropic OT between densities on a common grid with cost |x - y|^2:
///   pi_ij = exp((f_i + g_j - c_ij) / eps) a_i b_j,  a, b the cell masses.
/// Duals are zero on inactive cells.
struct SinkhornResult {
    std::vector<double> f;
    std::vector<double> g;
    double eps = 0.0;
    double w2_eps = 0.0;           // <c, pi>
    double marginal_defect = 0.0;  // L1 row defect (columns are exact after the last update)
    int iterations = 0;
    bool converged = false;
};

/// Smallest eps accepted on a grid: below h^2 / 4 the nearest-neighbour
/// kernel weight exp(-h^2 / eps) drops under e^-4 and the plan stops resolving the lattice.
double min_eps(const Grid& grid);

/// Iteration: f <- -eps LSE_j[(g_j - c_ij) / eps + log b_j], then the same for g.
/// Throws "eps underflow" when eps < min_eps(grid).
SinkhornResult sinkhorn(const Density& rho, const Density& g, double eps, const SinkhornOptions& opts = {});

/// Marginals of the plan defined by the duals (row sums, column sums).
std::pair<std::vector<double>, std::vector<double>> plan_marginals(const Density& rho, const Density& g,
                                                                   const SinkhornResult& s);

/// phi = f / 2 (the cost is |x - y|^2, not half of it), gauge int phi d rho = 0.
std::vector<double> potential_from_dual(const Density& rho, std::span<const double> f);

struct EntropicStepOptions {
    double tol_rho = 1e-9;   // L1 change between successive iterates
    double tol_marg = 1e-8;  // L1 column defect of the plan
    int max_iter = 50000;
    bool eps_scaling = true;
};

struct EntropicStepResult {
    Density rho_next;
    std::vector<double> u;  // dual on the rho_next side
    std::vector<double> v;  // dual on the g side
    double eps = 0.0;
    double w2_eps = 0.0;
    std::vector<double> phi_approx;  // u / 2, gauge int phi d rho_next = 0
    double optimality_residual = 0.0;  // max |log rho + V + phi / tau - c*|
    double marginal_defect = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Entropic JKO step: argmin over rho of W_eps(rho, g) / 2 tau + int rho log rho + int V rho,
/// where W_eps(rho, g) = min over plans with marginals (rho, g) of <c, pi> + eps KL(pi | m x g),
/// m the cell (Lebesgue) measure.
///
/// Alternating updates: the g-side dual is a Sinkhorn projection; the rho side is the KL prox
/// of the free energy, with lambda = eps / 2 tau and p~ the row sums of the g-projected kernel,
///   log a = (lambda log p~ + log m - 1 - V) / (1 + lambda),
/// i.e. a proportional to p~^(lambda/(1+lambda)) exp(-V/(1+lambda)); the row scaling
/// a / p~ carries the complementary exponent 1/(1+lambda) = tau / (tau + eps/2).
/// At the fixed point log rho + V + u / (2 tau) = const.
EntropicStepResult entropic_jko_step(const Density& g, const Potential& V, double tau, double eps,
                                     const EntropicStepOptions& opts = {});

/// Default eps: 2 h^2.
double default_eps(const Grid& grid);

struct ArgmaxProbe {
    ArgmaxCheck check;
    SinkhornResult transport;
    std::vector<double> phi;
};

/// |grad phi| of the entropic potential from rho to g on a disc; where it peaks.
ArgmaxProbe boundary_argmax_probe(const Density& rho, const Density& g, double eps, double bound_tol = -1.0,
                                  const SinkhornOptions& opts = {});

}  // namespace jko
