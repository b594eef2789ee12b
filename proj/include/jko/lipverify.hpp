#pragma once

#include <span>
#include <string>
#include <vector>

#include "jko/density.hpp"

namespace jko {

enum class LipMethod { Pairwise, Gradient, Both };

/// Discrete Lipschitz seminorm of a grid function.
struct LipReport {
    double lip_pairwise = 0.0;  // sup over active-cell pairs of |f(x) - f(y)| / |x - y|
    double lip_grad = 0.0;      // max cell gradient magnitude
    bool has_pairwise = false;
    bool has_grad = false;
    bool degraded = false;  // pairwise requested but the grid exceeded the size guard
    int argmax_cell = -1;   // pairwise: lower index of the maximising pair; gradient: cell
    int argmax_partner = -1;
    int argmax_grad_cell = -1;
    std::string method;

    /// Pairwise value when available, gradient value otherwise.
    double value() const { return has_pairwise ? lip_pairwise : lip_grad; }
};

inline constexpr int kPairwiseCellLimit = 10000;

/// Seminorm over the active cells (or over the cells where mask != 0).
LipReport lip_const(const Grid& grid, std::span<const double> f, LipMethod method = LipMethod::Both,
                    std::span<const char> mask = {});

enum class CheckStatus { Pass, Fail, Vacuous };

const char* status_name(CheckStatus s);

struct TheoremOptions {
    /// Multiplier in tol_thm = factor * (h + optimality_residual / tau) * (1 + Lip(V)).
    double tol_factor = 5.0;
    double optimality_residual = 0.0;
    std::string backend = "ot1d";
};

/// One step of Lip(log rho_next + V)(1 + alpha tau) <= Lip(log g + V).
struct TheoremCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tol = 0.0;
    CheckStatus status = CheckStatus::Pass;
    double tau = 0.0;
    double alpha = 0.0;
    int n = 0;
    std::string backend;

    bool passed() const { return status == CheckStatus::Pass; }
};

double theorem_tolerance(const Grid& grid, double tau, double optimality_residual, double lip_V,
                         double tol_factor = 5.0);

/// Refuses (status Vacuous) when 1 + alpha tau <= 0; alpha is V.alpha().
TheoremCheck check_theorem(const Density& rho_next, const Density& g, const Potential& V, double tau,
                           const TheoremOptions& opts = {});

/// m_k = (1 + alpha tau)^k Lip(log rho_k + V) along a trajectory.
/// Throws std::domain_error in the vacuous regime 1 + alpha tau <= 0.
std::vector<double> check_decay_envelope(std::span<const Density> densities, const Potential& V, double tau);

/// Where |grad phi|^2 peaks: interior cells versus boundary cells.
struct ArgmaxCheck {
    bool is_interior = false;
    bool vacuous = false;        // field identically (numerically) zero
    double max_interior = 0.0;   // max |grad phi| over interior cells
    double max_boundary = 0.0;   // max |grad phi| over boundary cells
    double max_overall = 0.0;
    double margin = 0.0;         // max_interior - max_boundary
    int argmax_cell = -1;        // lowest-index cell attaining the overall max
    double radius = 0.0;         // R of the ball (half-length in 1-D)
    double bound_tol = 0.0;
    bool boundary_bound_ok = false;  // max_boundary <= sqrt(2) R + bound_tol
    bool global_bound_ok = false;    // max_overall <= sqrt(2) R + bound_tol

    bool passed() const { return (is_interior || vacuous) && boundary_bound_ok; }
};

/// bound_tol defaults to 0.05 R when negative.
ArgmaxCheck interior_argmax_check(const Grid& grid, std::span<const double> phi, double bound_tol = -1.0);

}  // namespace jko
