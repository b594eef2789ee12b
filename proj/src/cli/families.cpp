#include "cli/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jko/io.hpp"

namespace jko::cli {

namespace {

std::string family_of(const Json& spec, const std::string& where) {
    if (!spec.is_object()) throw ConfigError(where, "expected an object");
    if (!spec.contains("family") || !spec["family"].is_string()) throw ConfigError(where + ".family", "missing family");
    return spec["family"].get<std::string>();
}

Point point_or_scalar(const Json& spec, const std::string& key, const std::string& where, Point fallback) {
    if (!spec.contains(key)) return fallback;
    const Json& v = spec[key];
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + "." + key, "expected a number or [x, y]");
}

std::string path_of(const Json& spec, const std::string& where) {
    if (!spec.contains("path") || !spec["path"].is_string()) throw ConfigError(where + ".path", "missing path");
    return spec["path"].get<std::string>();
}

// Smooth periodic-free profile sum_k (a_k / k) sin(k pi t + psi_k), t in [0, 1].
struct RandomModes {
    std::vector<double> amp;
    std::vector<double> phase;

    RandomModes(int modes, double scale, Rng& rng) {
        std::uniform_real_distribution<double> a(-scale, scale);
        std::uniform_real_distribution<double> p(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < modes; ++k) {
            amp.push_back(a(rng));
            phase.push_back(p(rng));
        }
    }
    double operator()(double t) const {
        double s = 0.0;
        for (std::size_t k = 0; k < amp.size(); ++k)
            s += amp[k] / static_cast<double>(k + 1) * std::sin(static_cast<double>(k + 1) * std::numbers::pi * t + phase[k]);
        return s;
    }
};

}  // namespace

Rng instance_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x6a6b6fu};
    return Rng(seq);
}

Grid make_grid(const Json& d, const std::string& where, int n_override) {
    if (!d.is_object()) throw ConfigError(where, "expected an object");
    if (!d.contains("shape") || !d["shape"].is_string()) throw ConfigError(where + ".shape", "missing shape");
    const std::string shape = d["shape"].get<std::string>();
    try {
        if (shape == "interval") {
            require_keys(d, {"shape", "a", "b", "n"}, where);
            const int n = n_override > 0 ? n_override : integer(d, "n", where);
            return Grid::interval(number(d, "a", where), number(d, "b", where), n);
        }
        if (shape == "box") {
            require_keys(d, {"shape", "x", "y", "n"}, where);
            const auto x = number_list(d, "x", where);
            const auto y = number_list(d, "y", where);
            if (x.size() != 2) throw ConfigError(where + ".x", "expected [x0, x1]");
            if (y.size() != 2) throw ConfigError(where + ".y", "expected [y0, y1]");
            int nx = 0, ny = 0;
            if (d.contains("n") && d["n"].is_array()) {
                const auto n = integer_list(d, "n", where);
                if (n.size() != 2) throw ConfigError(where + ".n", "expected [nx, ny]");
                nx = n[0];
                ny = n[1];
            } else {
                nx = ny = integer(d, "n", where);
            }
            if (n_override > 0) {
                ny = std::max(1, static_cast<int>(std::lround(static_cast<double>(ny) * n_override / nx)));
                nx = n_override;
            }
            return Grid::box(x[0], x[1], y[0], y[1], nx, ny);
        }
        if (shape == "disc") {
            require_keys(d, {"shape", "center", "radius", "n"}, where);
            const Point c = point_or_scalar(d, "center", where, {0.0, 0.0});
            const int n = n_override > 0 ? n_override : integer(d, "n", where);
            return Grid::disc(c.x, c.y, number(d, "radius", where), n);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
    throw ConfigError(where + ".shape", "unknown shape '" + shape + "' (interval, box, disc)");
}

Potential make_potential(const Json& spec, const Grid& grid, Rng& rng, std::vector<std::string>* warnings,
                         const std::string& where, std::optional<double> alpha_override) {
    const std::string fam = family_of(spec, where);
    auto alpha_of = [&](double fallback) {
        if (alpha_override) return *alpha_override;
        return spec.contains("alpha") ? number(spec, "alpha", where) : fallback;
    };
    if (fam == "quadratic") {
        require_keys(spec, {"family", "alpha", "center"}, where);
        const double alpha = alpha_of(1.0);
        const Point c = point_or_scalar(spec, "center", where, {0.0, 0.0});
        return Potential::sampled(
            grid, [&](Point p) { return 0.5 * alpha * ((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y)); },
            alpha);
    }
    if (fam == "double-well") {
        require_keys(spec, {"family", "a", "b"}, where);
        const double a = number(spec, "a", where);
        const double b = number(spec, "b", where);
        if (a < 0.0) throw ConfigError(where + ".a", "must be >= 0");
        // inf of the Hessian of a r^4 - b r^2 is -2b (at the origin).
        return Potential::sampled(
            grid,
            [&](Point p) {
                const double r2 = p.x * p.x + p.y * p.y;
                return a * r2 * r2 - b * r2;
            },
            -2.0 * b);
    }
    if (fam == "random-convex") {
        require_keys(spec, {"family", "alpha"}, where);
        const double alpha = alpha_of(0.0);
        const Point mid = grid.domain_center();
        const double half = 0.5 * (grid.x_max() - grid.x_min());
        std::uniform_real_distribution<double> uc(-0.3 * half, 0.3 * half);
        std::uniform_real_distribution<double> ub(-1.0, 1.0);
        std::uniform_real_distribution<double> ug(0.0, 0.5);
        const Point c{mid.x + uc(rng), grid.dim() == 2 ? mid.y + uc(rng) : 0.0};
        const double bx = ub(rng);
        const double by = grid.dim() == 2 ? ub(rng) : 0.0;
        const double gamma = ug(rng);
        return Potential::sampled(
            grid,
            [&](Point p) {
                const double dx = p.x - c.x, dy = p.y - c.y;
                const double qx = p.x - mid.x, qy = p.y - mid.y;
                const double r2 = qx * qx + qy * qy;
                return 0.5 * alpha * (dx * dx + dy * dy) + bx * qx + by * qy + gamma * r2 * r2 / std::pow(half, 2);
            },
            alpha);
    }
    if (fam == "csv") {
        require_keys(spec, {"family", "path", "alpha"}, where);
        if (!spec.contains("alpha")) throw ConfigError(where + ".alpha", "custom potentials must declare alpha");
        const double alpha = alpha_of(0.0);
        std::vector<double> values;
        try {
            values = io::read_grid_values_csv(path_of(spec, where), grid);
        } catch (const std::exception& e) {
            throw ConfigError(where + ".path", e.what());
        }
        Potential V(grid, std::move(values), alpha);
        if (!V.convexity_holds(default_convexity_tolerance(alpha)) && warnings)
            warnings->push_back(where + ": declared alpha " + io::format_double(alpha) +
                                " exceeds the smallest discrete second difference " +
                                io::format_double(V.min_second_difference()));
        return V;
    }
    throw ConfigError(where + ".family",
                      "unknown potential family '" + fam + "' (quadratic, double-well, random-convex, csv)");
}

Density make_density(const Json& spec, const Grid& grid, const Potential& V, Rng& rng, const std::string& where) {
    const std::string fam = family_of(spec, where);
    std::vector<double> vals(grid.size(), 0.0);
    auto fill = [&](auto&& f) {
        for (int idx : grid.active_cells()) vals[idx] = f(idx, grid.center(idx));
    };
    if (fam == "uniform") {
        require_keys(spec, {"family"}, where);
        fill([](int, Point) { return 1.0; });
    } else if (fam == "truncated-gaussian") {
        require_keys(spec, {"family", "mu", "sigma"}, where);
        const Point mu = point_or_scalar(spec, "mu", where, grid.domain_center());
        const double s = number(spec, "sigma", where);
        if (!(s > 0.0)) throw ConfigError(where + ".sigma", "must be positive");
        fill([&](int, Point p) {
            const double r2 = (p.x - mu.x) * (p.x - mu.x) + (p.y - mu.y) * (p.y - mu.y);
            return std::exp(-0.5 * r2 / (s * s));
        });
    } else if (fam == "gibbs") {
        require_keys(spec, {"family"}, where);
        return gibbs(V);
    } else if (fam == "perturbed-gibbs") {
        require_keys(spec, {"family", "amplitude", "frequency"}, where);
        const double a = number(spec, "amplitude", where);
        const double f = number(spec, "frequency", where);
        if (!(std::abs(a) < 1.0)) throw ConfigError(where + ".amplitude", "must satisfy |amplitude| < 1");
        const double top = *std::max_element(V.values().begin(), V.values().end());
        fill([&](int idx, Point p) {
            double w = 1.0 + a * std::sin(f * p.x);
            if (grid.dim() == 2) w *= 1.0 + a * std::sin(f * p.y);
            return w * std::exp(-(V[idx] - top));
        });
    } else if (fam == "random-smooth") {
        require_keys(spec, {"family", "modes", "scale"}, where);
        const int modes = spec.contains("modes") ? integer(spec, "modes", where) : 4;
        const double scale = spec.contains("scale") ? number(spec, "scale", where) : 1.0;
        if (modes < 1) throw ConfigError(where + ".modes", "must be >= 1");
        if (!(scale >= 0.0)) throw ConfigError(where + ".scale", "must be >= 0");
        const RandomModes mx(modes, scale, rng);
        const RandomModes my(grid.dim() == 2 ? modes : 0, scale, rng);
        const double lx = grid.x_max() - grid.x_min();
        const double ly = grid.dim() == 2 ? grid.y_max() - grid.y_min() : 1.0;
        fill([&](int, Point p) {
            double e = mx((p.x - grid.x_min()) / lx);
            if (grid.dim() == 2) e += my((p.y - grid.y_min()) / ly);
            return std::exp(e);
        });
    } else if (fam == "csv") {
        require_keys(spec, {"family", "path"}, where);
        try {
            vals = io::read_grid_values_csv(path_of(spec, where), grid);
        } catch (const std::exception& e) {
            throw ConfigError(where + ".path", e.what());
        }
    } else {
        throw ConfigError(where + ".family", "unknown density family '" + fam +
                                                 "' (uniform, truncated-gaussian, gibbs, perturbed-gibbs, "
                                                 "random-smooth, csv)");
    }
    try {
        return Density::normalize(grid, std::move(vals));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, e.what());
    }
}

}  // namespace jko::cli
