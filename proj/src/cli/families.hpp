#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "jko/density.hpp"

namespace jko::cli {

using Rng = std::mt19937_64;

/// Independent stream per (seed, instance).
Rng instance_rng(std::uint64_t seed, std::uint64_t stream);

/// interval {a, b, n} | box {x: [x0, x1], y: [y0, y1], n: [nx, ny]} | disc {center: [cx, cy], radius, n}.
/// n_override > 0 replaces n (both axes for boxes, keeping the aspect of nx : ny).
Grid make_grid(const Json& domain, const std::string& where, int n_override = 0);

/// quadratic {alpha, center} | double-well {a, b} | random-convex {alpha} | csv {path, alpha}.
/// Custom potentials are audited against discrete second differences; a
/// violation of the declared alpha is reported in `warnings`, not fixed.
Potential make_potential(const Json& spec, const Grid& grid, Rng& rng, std::vector<std::string>* warnings,
                         const std::string& where, std::optional<double> alpha_override = {});

/// uniform | truncated-gaussian {mu, sigma} | gibbs | perturbed-gibbs {amplitude, frequency}
/// | random-smooth {modes, scale} | csv {path}.
Density make_density(const Json& spec, const Grid& grid, const Potential& V, Rng& rng, const std::string& where);

}  // namespace jko::cli
