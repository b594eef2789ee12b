#pragma once

#include <string>
#include <vector>

#include "jko/density.hpp"
#include "jko/lipverify.hpp"
#include "jko/ot1d.hpp"

namespace jko {

struct JkoOptions {
    double tol_opt = 1e-7;
    int max_iter = 500;
    double theta0 = 0.5;
};

struct JkoStepResult {
    Density rho_next;
    std::vector<double> phi;  // Kantorovich potential from rho_next to g, gauge int phi d rho_next = 0
    EnergyReport energy;
    /// max over cells of |log rho + V + phi / tau - c*|, c* the rho-weighted mean.
    double optimality_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// One minimizing-movement step: argmin over rho of W2^2(rho, g) / (2 tau) + int rho log rho + int V rho.
///
/// Damped fixed point on the optimality condition log rho + V + phi / tau = const:
/// rho <- normalize(rho^(1 - theta) * exp(-V - phi / tau)^theta), starting at g.
/// theta halves when the residual grows and grows by 1.2 (capped at 1) when
/// the residual at least halves. Non-convergence is reported, not thrown.
JkoStepResult jko_step(const Density& g, const Potential& V, double tau, const JkoOptions& opts = {});

/// optimality residual of rho against the potential phi (gauge-free).
double optimality_residual(const Density& rho, const Potential& V, std::span<const double> phi, double tau);

struct OracleOptions {
    int subatoms = 8;       // atoms per cell in the discrete transport LP
    int iterations = 20000;
    double step0 = 0.5;     // mirror step eta_t = step0 / sqrt(1 + t / 50)
};

struct OracleResult {
    Density rho;
    double energy = 0.0;        // atomic energy of rho (same discretization as the oracle)
    double stationarity = 0.0;  // max_i |grad_i - sum_j a_j grad_j| at rho
    double min_reduced_cost = 0.0;  // LP dual-feasibility certificate at rho
};

/// Independent minimiser: W2^2 replaced by the exact transportation LP between
/// atoms placed at sub-cell midpoints, minimized over cell masses by entropic
/// mirror descent with decreasing steps and averaging of the second half of
/// the iterates. Deterministic. Requires n <= 64.
OracleResult jko_oracle(const Density& g, const Potential& V, double tau, const OracleOptions& opts = {});

/// W2^2 between the atomic measures used by the oracle.
double atomic_w2_squared(const Density& rho, const Density& g, int subatoms);
/// atomic W2^2 / (2 tau) + entropy + potential energy.
double atomic_energy(const Density& rho, const Density& g, const Potential& V, double tau, int subatoms);

/// Energy of one step using the ot1d W2 backend.
EnergyReport jko_energy(const Density& rho, const Density& g, const Potential& V, double tau);

struct Trajectory {
    std::vector<Density> densities;  // rho_0 .. rho_K (fewer on abort)
    std::vector<JkoStepResult> steps;
    std::vector<TheoremCheck> checks;  // per-step Lipschitz diagnostics
    double tau = 0.0;
    bool complete = false;
    std::string abort_reason;
};

/// Iterates jko_step K times, stopping early (complete = false) on a
/// non-converged step. Errors from a step are rethrown with the step index.
Trajectory run_trajectory(const Density& rho_init, const Potential& V, double tau, int K,
                          const JkoOptions& opts = {}, const TheoremOptions& thm = {});

}  // namespace jko
