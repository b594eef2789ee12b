#pragma once

#include <vector>

#include "jko/density.hpp"
#include "jko/jko1d.hpp"

namespace jko {

/// Snapshots of the no-flux Fokker-Planck flow d_t rho = d_x (d_x rho + rho V').
struct FPSolution {
    Grid grid;
    std::vector<double> times;
    std::vector<Density> densities;
    double dt = 0.0;
    double h = 0.0;
};

/// Implicit Euler with the exponentially fitted (Scharfetter-Gummel) flux
///   F_{i+1/2} = -(B(-dV) rho_{i+1} - B(dV) rho_i) / h,  B(z) = z / (e^z - 1),
/// dV = V_{i+1} - V_i, and zero flux through both ends. exp(-V) is an exact
/// discrete steady state. The last step is shortened to land on t_final;
/// every step is stored.
FPSolution solve_fp(const Density& rho_init, const Potential& V, double t_final, double dt);

/// One implicit step; exposed for the steady-state and conservation tests.
std::vector<double> fp_implicit_step(const Grid& grid, std::span<const double> rho, const Potential& V, double dt);

struct FPComparison {
    std::vector<double> times;
    std::vector<double> l1;  // L1(rho_k, rho(k tau)) for k = 0..K
    double max_error = 0.0;
};

/// Matches trajectory step k to the snapshot at t = k tau. Throws
/// "time-grid mismatch" when some k tau is not a stored time (to 1e-9 dt).
FPComparison compare_jko_to_fp(const Trajectory& traj, const FPSolution& fp);

}  // namespace jko
