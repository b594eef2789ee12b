#include "cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <cstdio>
#include <sstream>

#include "cli/families.hpp"
#include "jko/entropic2d.hpp"
#include "jko/extension.hpp"
#include "jko/fpref.hpp"
#include "jko/io.hpp"
#include "jko/jko1d.hpp"
#include "jko/lipverify.hpp"
#include "jko/ot1d.hpp"

namespace jko::cli {

namespace {

using io::format_double;

struct Report {
    std::string dir;
    Json results = Json::object();
    std::vector<CheckOutcome> checks;
    std::vector<std::string> warnings;
    std::ostringstream text;

    void check(const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok ? Verdict::Pass : Verdict::Fail, detail});
    }
    void vacuous(const std::string& name, const std::string& detail) {
        checks.push_back({name, Verdict::Vacuous, detail});
    }
    void file(const std::string& name, const std::string& content) const { io::write_file(dir + "/" + name, content); }
};

Json theorem_json(const TheoremCheck& c) {
    return {{"lhs", c.lhs},     {"rhs", c.rhs},     {"margin", c.margin},   {"tol", c.tol},
            {"tau", c.tau},     {"alpha", c.alpha}, {"n", c.n},             {"backend", c.backend},
            {"status", status_name(c.status)}};
}

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t m = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

template <typename F>
void parallel_for(int count, int jobs, F&& body) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
    for (int i = 0; i < count; ++i) body(i);
}

JkoOptions jko_options(const Json& t) {
    JkoOptions o;
    o.tol_opt = number(t, "tol_opt", "tolerances");
    o.max_iter = integer(t, "max_iter", "tolerances");
    return o;
}

TheoremOptions theorem_options(const Json& t, const std::string& backend) {
    TheoremOptions o;
    o.tol_factor = t.contains("tol_factor") ? number(t, "tol_factor", "tolerances") : 5.0;
    o.backend = backend;
    return o;
}

std::string trajectory_csv(const Grid& grid, const std::vector<Density>& ds, double eps = -1.0) {
    std::vector<std::vector<double>> snaps;
    for (const auto& d : ds) snaps.emplace_back(d.values().begin(), d.values().end());
    std::ostringstream os;
    io::write_trajectory_csv(os, grid, snaps, eps);
    return os.str();
}

void theorem_verdict(Report& r, const std::string& name, const std::vector<TheoremCheck>& checks) {
    int fails = 0, vac = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
        if (c.status == CheckStatus::Fail) ++fails;
        if (c.status == CheckStatus::Vacuous) ++vac;
        else worst = std::min(worst, c.margin + c.tol);
    }
    if (!checks.empty() && vac == static_cast<int>(checks.size())) {
        r.vacuous(name, "1 + alpha tau <= 0: the contraction inequality carries no information");
        r.warnings.push_back(name + ": vacuous regime (1 + alpha tau <= 0)");
        return;
    }
    r.check(name, fails == 0,
            std::to_string(checks.size() - vac) + " steps, " + std::to_string(fails) +
                " failures, min(margin + tol) = " + format_double(worst));
}

// ---------------------------------------------------------------- jko1d

void jko1d_trajectory(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Grid grid = make_grid(p["domain"], "domain");
    Rng rng = instance_rng(cfg.seed, 0);
    const Potential V = make_potential(p["potential"], grid, rng, &r.warnings, "potential");
    const Density rho0 = make_density(p["density"], grid, V, rng, "density");
    const double tau = number(p, "tau", "");
    const int K = integer(p, "K", "");
    const auto traj = run_trajectory(rho0, V, tau, K, jko_options(p["tolerances"]), theorem_options(p["tolerances"], "ot1d"));

    r.file("trajectory.csv", trajectory_csv(grid, traj.densities));
    Json steps = Json::array();
    double max_res = 0.0;
    bool descent = true;
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        const auto& s = traj.steps[k];
        const double f_prev = free_energy(traj.densities[k], V);
        const bool ok = s.energy.total <= f_prev + 1e-9 * (1.0 + std::abs(f_prev));
        descent = descent && ok;
        max_res = std::max(max_res, s.optimality_residual);
        Json row = {{"step", k + 1},
                    {"iterations", s.iterations},
                    {"converged", s.converged},
                    {"optimality_residual", s.optimality_residual},
                    {"energy", {{"w2_squared", s.energy.w2_squared},
                                {"entropy", s.energy.entropy},
                                {"potential", s.energy.potential},
                                {"total", s.energy.total}}},
                    {"free_energy_previous", f_prev}};
        if (k < traj.checks.size()) row["theorem"] = theorem_json(traj.checks[k]);
        steps.push_back(row);
    }
    r.results["steps"] = steps;
    r.check("trajectory_complete", traj.complete, traj.complete ? "all steps converged" : traj.abort_reason);
    r.check("optimality_residual", max_res <= number(p["tolerances"], "tol_opt", "tolerances"),
            "max residual " + format_double(max_res));
    r.check("energy_descent", descent, "F(rho_k+1) + W2^2/2tau <= F(rho_k) at every step");
    theorem_verdict(r, "lipschitz_contraction", traj.checks);

    Json table = Json::array();
    for (std::size_t k = 0; k < traj.checks.size(); ++k) {
        Json row = theorem_json(traj.checks[k]);
        row["step"] = k + 1;
        table.push_back(row);
    }
    r.file("theorem_checks.json", table.dump(2) + "\n");

    if (p["envelope"].get<bool>() && traj.complete) {
        const double factor = 1.0 + V.alpha() * tau;
        if (factor <= 0.0) {
            r.vacuous("decay_envelope", "1 + alpha tau <= 0");
        } else {
            const auto m = check_decay_envelope(traj.densities, V, tau);
            double tol = 0.0;
            for (const auto& c : traj.checks) tol = std::max(tol, c.tol);
            bool bound_ok = true, mono_ok = true;
            Json series = Json::array();
            for (std::size_t k = 0; k < m.size(); ++k) {
                const double lip_k = m[k] / std::pow(factor, static_cast<double>(k));
                const double bound = std::pow(factor, -static_cast<double>(k)) * m[0] + k * tol;
                bound_ok = bound_ok && lip_k <= bound;
                if (k > 0) mono_ok = mono_ok && m[k] <= m[k - 1] + tol;
                series.push_back({{"k", k}, {"m_k", m[k]}, {"lip_k", lip_k}, {"bound", bound}});
            }
            r.results["envelope"] = {{"series", series}, {"tol_thm", tol}, {"factor", factor}};
            r.check("decay_envelope", bound_ok,
                    "Lip_k <= (1 + alpha tau)^-k Lip_0 + k tol_thm for k <= " + std::to_string(m.size() - 1));
            r.check("envelope_monotone", mono_ok, "m_k+1 <= m_k + tol_thm");
        }
    }
}

void jko1d_oracle(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Json& o = p["oracle"];
    const Json& t = p["tolerances"];
    const Grid grid = make_grid(p["domain"], "domain", integer(o, "n", "oracle"));
    const auto alphas = number_list(p, "alphas", "");
    const double tau = number(p, "tau", "");
    const int count = integer(p, "instances", "");
    OracleOptions oo;
    oo.iterations = integer(o, "iterations", "oracle");
    oo.subatoms = integer(o, "subatoms", "oracle");
    const JkoOptions jo = jko_options(t);

    std::vector<Json> rows(count);
    std::vector<char> ok(count, 0);
    const double e_gap = number(t, "energy_gap", "tolerances");
    const double l_gap = number(t, "l1_gap", "tolerances");
    parallel_for(count, cfg.jobs, [&](int i) {
        Rng rng = instance_rng(cfg.seed, static_cast<std::uint64_t>(i));
        const double alpha = alphas[i % alphas.size()];
        const Potential V = make_potential(p["potential"], grid, rng, nullptr, "potential", alpha);
        const Density g = make_density(p["density"], grid, V, rng, "density");
        const auto step = jko_step(g, V, tau, jo);
        const auto orc = jko_oracle(g, V, tau, oo);
        const double f_jko = jko_energy(step.rho_next, g, V, tau).total;
        const double f_orc = jko_energy(orc.rho, g, V, tau).total;
        const double a_jko = atomic_energy(step.rho_next, g, V, tau, oo.subatoms);
        const double a_orc = orc.energy;
        const double l1 = l1_distance(step.rho_next, orc.rho);
        ok[i] = step.converged && std::abs(f_jko - f_orc) <= e_gap && std::abs(a_jko - a_orc) <= e_gap && l1 <= l_gap;
        rows[i] = {{"instance", i},          {"alpha", alpha},
                   {"energy_ot1d", {{"jko", f_jko}, {"oracle", f_orc}}},
                   {"energy_atomic", {{"jko", a_jko}, {"oracle", a_orc}}},
                   {"l1", l1},               {"converged", step.converged},
                   {"oracle_stationarity", orc.stationarity},
                   {"oracle_min_reduced_cost", orc.min_reduced_cost}};
    });
    double worst_e = 0.0, worst_l1 = 0.0;
    for (const auto& row : rows) {
        worst_e = std::max({worst_e, std::abs(row["energy_ot1d"]["jko"].get<double>() - row["energy_ot1d"]["oracle"].get<double>()),
                            std::abs(row["energy_atomic"]["jko"].get<double>() - row["energy_atomic"]["oracle"].get<double>())});
        worst_l1 = std::max(worst_l1, row["l1"].get<double>());
    }
    r.results["instances"] = rows;
    r.file("oracle.json", Json(rows).dump(2) + "\n");
    r.check("oracle_agreement", std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }),
            std::to_string(count) + " instances, max |dF| = " + format_double(worst_e) +
                ", max L1 = " + format_double(worst_l1));
}

void jko1d_residuals(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Json& t = p["tolerances"];
    const double tau = number(p, "tau", "");
    std::vector<double> hs, ma, dma;
    Json rows = Json::array();
    double max_opt = 0.0;
    bool converged = true;
    for (int n : integer_list(p, "n_values", "")) {
        const Grid grid = make_grid(p["domain"], "domain", n);
        Rng rng = instance_rng(cfg.seed, 0);
        const Potential V = make_potential(p["potential"], grid, rng, &r.warnings, "potential");
        const Density rho = make_density(p["density"], grid, V, rng, "density");
        const Density g = make_density(p["target"], grid, V, rng, "target");
        const auto plan = solve_1d(rho, g);
        const double res = max_abs(plan.residual_ma);
        const double dres = max_abs(differentiated_ma_residual(plan, rho, g));
        const auto step = jko_step(rho, V, tau, jko_options(t));
        converged = converged && step.converged;
        max_opt = std::max(max_opt, step.optimality_residual);
        hs.push_back(grid.hx());
        ma.push_back(res);
        dma.push_back(dres);
        rows.push_back({{"n", n}, {"h", grid.hx()}, {"monge_ampere", res}, {"differentiated", dres},
                        {"optimality_residual", step.optimality_residual}, {"iterations", step.iterations}});
        if (n == integer_list(p, "n_values", "").back()) {
            std::ostringstream os;
            io::write_plan_csv(os, plan);
            r.file("plan.csv", os.str());
        }
    }
    const double order = fitted_order(hs, ma);
    const double dorder = fitted_order(hs, dma);
    r.results["refinement"] = rows;
    r.results["order_monge_ampere"] = order;
    r.results["order_differentiated"] = dorder;
    r.check("optimality_residual", converged && max_opt <= number(t, "tol_opt", "tolerances"),
            "max residual " + format_double(max_opt));
    r.check("monge_ampere_order", order >= number(t, "min_order", "tolerances"), "observed order " + format_double(order));
    r.check("differentiated_order", dorder >= number(t, "min_order_differentiated", "tolerances"),
            "observed order " + format_double(dorder));
}

void jko1d_gibbs(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Json& t = p["tolerances"];
    const Grid grid = make_grid(p["domain"], "domain");
    const double tau = number(p, "tau", "");
    Json rows = Json::array();
    double worst = 0.0;
    bool conv = true;
    for (std::size_t i = 0; i < p["potentials"].size(); ++i) {
        Rng rng = instance_rng(cfg.seed, i);
        const Potential V = make_potential(p["potentials"][i], grid, rng, &r.warnings, "potentials[" + std::to_string(i) + "]");
        const Density g = gibbs(V);
        const auto s = jko_step(g, V, tau, jko_options(t));
        const double l1 = l1_distance(s.rho_next, g);
        worst = std::max(worst, l1);
        conv = conv && s.converged;
        rows.push_back({{"potential", p["potentials"][i]}, {"l1", l1}, {"iterations", s.iterations},
                        {"optimality_residual", s.optimality_residual}});
    }
    r.results["gibbs"] = rows;
    r.check("gibbs_fixed_point", conv && worst <= number(t, "gibbs_l1", "tolerances"), "max L1 " + format_double(worst));
}

// ---------------------------------------------------------------- jko2d

EntropicStepOptions entropic_options(const Json& t) {
    EntropicStepOptions o;
    o.tol_rho = number(t, "tol_rho", "tolerances");
    o.tol_marg = number(t, "tol_marg", "tolerances");
    o.max_iter = integer(t, "max_iter", "tolerances");
    return o;
}

/// Splits a box grid function as a(x) + b(y) when it is additively separable.
bool split_additive(const Grid& grid, std::span<const double> f, std::vector<double>& a, std::vector<double>& b) {
    const int nx = grid.nx(), ny = grid.ny();
    a.assign(nx, 0.0);
    b.assign(ny, 0.0);
    double scale = 1.0;
    for (int i = 0; i < nx; ++i) a[i] = f[grid.index(i, 0)];
    for (int j = 0; j < ny; ++j) b[j] = f[grid.index(0, j)] - f[grid.index(0, 0)];
    for (double v : f) scale = std::max(scale, std::abs(v));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (std::abs(f[grid.index(i, j)] - a[i] - b[j]) > 1e-12 * scale) return false;
    return true;
}

void jko2d_step(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Json& t = p["tolerances"];
    const Grid grid = make_grid(p["domain"], "domain");
    Rng rng = instance_rng(cfg.seed, 0);
    const Potential V = make_potential(p["potential"], grid, rng, &r.warnings, "potential");
    const Density rho0 = make_density(p["density"], grid, V, rng, "density");
    const double tau = number(p, "tau", "");
    const double eps = p["eps"].is_null() ? default_eps(grid) : number(p, "eps", "");
    const int K = integer(p, "K", "");
    const auto opts = entropic_options(t);
    auto thm = theorem_options(t, "entropic");

    std::vector<Density> ds{rho0};
    std::vector<TheoremCheck> checks;
    Json steps = Json::array();
    bool all_conv = true, mass_ok = true, positive = true;
    EntropicStepResult first{rho0};
    for (int k = 0; k < K; ++k) {
        auto s = entropic_jko_step(ds.back(), V, tau, eps, opts);
        if (k == 0) first = s;
        all_conv = all_conv && s.converged;
        mass_ok = mass_ok && std::abs(s.rho_next.mass() - 1.0) <= 1e-10;
        positive = positive && s.rho_next.min_active() > 0.0;
        thm.optimality_residual = s.optimality_residual;
        checks.push_back(check_theorem(s.rho_next, ds.back(), V, tau, thm));
        steps.push_back({{"step", k + 1}, {"iterations", s.iterations}, {"converged", s.converged},
                         {"marginal_defect", s.marginal_defect}, {"w2_eps", s.w2_eps},
                         {"optimality_residual", s.optimality_residual}, {"theorem", theorem_json(checks.back())}});
        ds.push_back(s.rho_next);
        if (!s.converged) break;
    }
    r.results["eps"] = eps;
    r.results["steps"] = steps;
    r.file("trajectory.csv", trajectory_csv(grid, ds, eps));
    Json table = Json::array();
    for (const auto& c : checks) table.push_back(theorem_json(c));
    r.file("theorem_checks.json", table.dump(2) + "\n");
    r.check("entropic_converged", all_conv, std::to_string(steps.size()) + " steps");
    r.check("mass_and_positivity", mass_ok && positive, "unit mass within 1e-10, strictly positive");
    theorem_verdict(r, "lipschitz_contraction", checks);

    if (p["product_check"].get<bool>()) {
        std::vector<double> v1, v2, l1d, l2d;
        std::vector<double> logr(grid.size());
        for (int idx = 0; idx < grid.size(); ++idx) logr[idx] = std::log(std::max(rho0[idx], kDensityFloor));
        if (grid.shape() != Shape::Box || !split_additive(grid, V.values(), v1, v2) ||
            !split_additive(grid, logr, l1d, l2d)) {
            r.warnings.push_back("product_check skipped: data is not separable on a box");
        } else {
            const Grid gx = Grid::interval(grid.x_min(), grid.x_max(), grid.nx());
            const Grid gy = Grid::interval(grid.y_min(), grid.y_max(), grid.ny());
            auto expo = [](const std::vector<double>& l) {
                std::vector<double> e(l.size());
                for (std::size_t i = 0; i < l.size(); ++i) e[i] = std::exp(l[i] - l[0]);
                return e;
            };
            const auto sx = entropic_jko_step(Density::normalize(gx, expo(l1d)), Potential(gx, v1, V.alpha()), tau, eps, opts);
            const auto sy = entropic_jko_step(Density::normalize(gy, expo(l2d)), Potential(gy, v2, V.alpha()), tau, eps, opts);
            double l1 = 0.0;
            for (int j = 0; j < grid.ny(); ++j)
                for (int i = 0; i < grid.nx(); ++i)
                    l1 += std::abs(first.rho_next[grid.index(i, j)] - sx.rho_next[i] * sy.rho_next[j]);
            l1 *= grid.cell_measure();
            r.results["product_l1"] = l1;
            r.check("product_structure", sx.converged && sy.converged && l1 <= number(t, "product_l1", "tolerances"),
                    "L1 to the product of 1-D steps " + format_double(l1));
        }
    }
}

void jko2d_gibbs(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Grid grid = make_grid(p["domain"], "domain");
    const double tau = number(p, "tau", "");
    auto factors = number_list(p, "eps_factors", "");
    std::sort(factors.rbegin(), factors.rend());
    const double h2 = grid.h() * grid.h();
    const auto opts = entropic_options(p["tolerances"]);
    Json rows = Json::array();
    bool shrinking = true, conv = true;
    for (std::size_t i = 0; i < p["potentials"].size(); ++i) {
        Rng rng = instance_rng(cfg.seed, i);
        const Potential V = make_potential(p["potentials"][i], grid, rng, &r.warnings, "potentials[" + std::to_string(i) + "]");
        const Density g = gibbs(V);
        Json ladder = Json::array();
        double prev = std::numeric_limits<double>::infinity();
        for (double f : factors) {
            const auto s = entropic_jko_step(g, V, tau, f * h2, opts);
            const double l1 = l1_distance(s.rho_next, g);
            conv = conv && s.converged;
            shrinking = shrinking && l1 < prev;
            prev = l1;
            ladder.push_back({{"eps", f * h2}, {"l1", l1}, {"iterations", s.iterations}});
        }
        rows.push_back({{"potential", p["potentials"][i]}, {"ladder", ladder}});
    }
    r.results["gibbs"] = rows;
    r.check("entropic_converged", conv, "every step of the ladder");
    r.check("gibbs_defect_shrinks", shrinking, "L1(rho_next, gibbs) strictly decreases as eps decreases");
}

// ---------------------------------------------------------------- theorem-sweep

void theorem_sweep(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const auto alphas = number_list(p, "alphas", "");
    const auto taus = number_list(p, "taus", "");
    const int count = integer(p, "instances", "");
    const int K = integer(p, "K", "");
    const int n_refine = integer(p, "n_refine", "");
    const double slack = number(p, "refine_slack", "");
    const auto jo = jko_options(p["tolerances"]);
    const auto thm = theorem_options(p["tolerances"], "ot1d");

    struct Task {
        double alpha, tau;
        int instance;
    };
    std::vector<Task> tasks;
    for (double a : alphas)
        for (double tau : taus)
            for (int i = 0; i < count; ++i) tasks.push_back({a, tau, i});

    auto run_one = [&](const Task& task, int n_override) {
        const Grid grid = make_grid(p["domain"], "domain", n_override);
        Rng rng = instance_rng(cfg.seed, static_cast<std::uint64_t>(task.instance));
        const Potential V = make_potential(p["potential"], grid, rng, nullptr, "potential", task.alpha);
        const Density rho0 = make_density(p["density"], grid, V, rng, "density");
        return run_trajectory(rho0, V, task.tau, K, jo, thm);
    };

    std::vector<Json> rows(tasks.size());
    std::vector<std::vector<TheoremCheck>> checks(tasks.size());
    std::vector<int> refine_bad(tasks.size(), 0), nonconv(tasks.size(), 0);
    parallel_for(static_cast<int>(tasks.size()), cfg.jobs, [&](int k) {
        const Task& task = tasks[k];
        const auto traj = run_one(task, 0);
        checks[k] = traj.checks;
        nonconv[k] = traj.complete ? 0 : 1;
        Json steps = Json::array();
        std::vector<TheoremCheck> fine;
        if (n_refine > 0) fine = run_one(task, n_refine).checks;
        for (std::size_t s = 0; s < traj.checks.size(); ++s) {
            Json row = theorem_json(traj.checks[s]);
            row["step"] = s + 1;
            if (s < fine.size() && fine[s].status != CheckStatus::Vacuous) {
                row["margin_refined"] = fine[s].margin;
                row["n_refined"] = fine[s].n;
                const bool ok = fine[s].margin >= traj.checks[s].margin - slack;
                row["refinement_ok"] = ok;
                if (!ok) ++refine_bad[k];
            }
            steps.push_back(row);
        }
        rows[k] = {{"alpha", task.alpha}, {"tau", task.tau}, {"instance", task.instance},
                   {"complete", traj.complete}, {"steps", steps}};
        if (!traj.complete) rows[k]["abort_reason"] = traj.abort_reason;
    });

    std::vector<TheoremCheck> all;
    for (const auto& c : checks) all.insert(all.end(), c.begin(), c.end());
    const int bad_refine = std::accumulate(refine_bad.begin(), refine_bad.end(), 0);
    const int incomplete = std::accumulate(nonconv.begin(), nonconv.end(), 0);
    r.results["entries"] = rows;
    r.results["incomplete_trajectories"] = incomplete;
    if (incomplete > 0) r.warnings.push_back(std::to_string(incomplete) + " trajectories stopped on a non-converged step");
    theorem_verdict(r, "lipschitz_contraction", all);
    if (n_refine > 0) {
        bool any = false;
        for (const auto& c : all) any = any || c.status != CheckStatus::Vacuous;
        if (any)
            r.check("refinement", bad_refine == 0,
                    std::to_string(bad_refine) + " steps with margin(n_refine) < margin(n) - " + format_double(slack));
    }

    std::ostringstream csv;
    csv << "instance,alpha,tau,step,n,lhs,rhs,margin,tol,status,margin_refined\n";
    r.text << "instance  alpha    tau      n     lhs          rhs          margin       pass\n";
    for (const auto& row : rows) {
        for (const auto& s : row["steps"]) {
            csv << row["instance"].get<int>() << ',' << format_double(row["alpha"].get<double>()) << ','
                << format_double(row["tau"].get<double>()) << ',' << s["step"].get<int>() << ',' << s["n"].get<int>()
                << ',' << format_double(s["lhs"].get<double>()) << ',' << format_double(s["rhs"].get<double>()) << ','
                << format_double(s["margin"].get<double>()) << ',' << format_double(s["tol"].get<double>()) << ','
                << s["status"].get<std::string>() << ','
                << (s.contains("margin_refined") ? format_double(s["margin_refined"].get<double>()) : "") << '\n';
            char line[160];
            std::snprintf(line, sizeof line, "%-9d %-8.3g %-8.3g %-5d %-12.6g %-12.6g %-12.4g %s\n",
                          row["instance"].get<int>(), row["alpha"].get<double>(), row["tau"].get<double>(),
                          s["n"].get<int>(), s["lhs"].get<double>(), s["rhs"].get<double>(),
                          s["margin"].get<double>(), s["status"].get<std::string>().c_str());
            r.text << line;
        }
    }
    r.text << '\n';
    r.file("sweep.csv", csv.str());
    Json table = Json::array();
    for (const auto& c : all) table.push_back(theorem_json(c));
    r.file("theorem_checks.json", table.dump(2) + "\n");
}

// ---------------------------------------------------------------- extension-audit

void extension_audit(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Json& t = p["tolerances"];
    const Grid grid = make_grid(p["domain"], "domain");
    Rng rng = instance_rng(cfg.seed, 0);
    const Potential V = make_potential(p["potential"], grid, rng, &r.warnings, "potential");
    const Density g = make_density(p["density"], grid, V, rng, "density");
    const auto setup = ExtensionSetup::make(grid, number(p, "R", ""));
    auto ladder = integer_list(p, "mollifier_n", "");
    std::sort(ladder.begin(), ladder.end());
    const double delta = number(p, "dilation", "");
    const double tol_s = number(t, "sandwich", "tolerances");
    const double lip_bound = number(t, "lip_excess", "tolerances");
    const double grad_tol = number(t, "grad_h", "tolerances");
    const double conv_tol = number(t, "convexity", "tolerances");

    Json rows = Json::array();
    bool sandwich = true, lip = true, grad = true, convex = true, decay = true;
    double prev_mass = std::numeric_limits<double>::infinity();
    for (int n : ladder) {
        const auto a = build_approximants(setup, V, g, n);
        const double excess = lip_penalty_bound_check(setup, a.v_n, V);
        const double outside = mass_outside(setup, a.g_n, delta);
        const double peak_out = max_outside(setup, a.g_n, delta);
        sandwich = sandwich && a.sandwich_min >= -tol_s && a.sandwich_max <= 1.0 / n + tol_s;
        lip = lip && excess <= lip_bound;
        grad = grad && a.grad_h_n_max <= a.lip_h + grad_tol;
        convex = convex && a.v_n_min_second_difference >= V.alpha() - conv_tol;
        decay = decay && outside < prev_mass;
        prev_mass = outside;
        rows.push_back({{"n", n},
                        {"sandwich_min", a.sandwich_min},
                        {"sandwich_max", a.sandwich_max},
                        {"one_over_n", 1.0 / n},
                        {"lip_excess", excess},
                        {"grad_h_n_max", a.grad_h_n_max},
                        {"lip_h", a.lip_h},
                        {"v_n_min_second_difference", a.v_n_min_second_difference},
                        {"v_tilde_min", a.v_tilde_min},
                        {"v_tilde_defect", a.v_tilde_defect},
                        {"h_tilde_defect", a.h_tilde_defect},
                        {"lambda", a.lambda},
                        {"mass_outside_dilation", outside},
                        {"max_outside_dilation", peak_out}});
        std::ostringstream os;
        const Grid& og = setup.outer;
        os << (og.dim() == 1 ? "index,x" : "index,x,y") << ",v_tilde,v_n,h_n,g_n\n";
        for (int idx = 0; idx < og.size(); ++idx) {
            const Point c = og.center(idx);
            os << idx << ',' << format_double(c.x);
            if (og.dim() == 2) os << ',' << format_double(c.y);
            os << ',' << format_double(a.v_tilde[idx]) << ',' << format_double(a.v_n[idx]) << ','
               << format_double(a.h_n[idx]) << ',' << format_double(a.g_n[idx]) << '\n';
        }
        r.file("approximants_n" + std::to_string(n) + ".csv", os.str());
    }
    r.results["ladder"] = rows;
    r.results["enclosing_grid"] = io::grid_descriptor(setup.outer);
    r.results["dilation"] = delta;
    r.check("sandwich", sandwich, "V~*xi_n <= V_n <= V~*xi_n + 1/n on the domain");
    r.check("lipschitz_penalty", lip, "Lip(V_n) - Lip(V) <= " + format_double(lip_bound));
    r.check("gradient_h_n", grad, "|grad h_n| <= Lip(h) + " + format_double(grad_tol));
    r.check("v_n_convexity", convex, "second differences of V_n >= alpha - " + format_double(conv_tol));
    r.check("mass_outside_decays", decay, "mass of g_n beyond distance " + format_double(delta) + " decreases along n");
}

// ---------------------------------------------------------------- fp-compare

void fp_compare(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const Grid grid = make_grid(p["domain"], "domain");
    Rng rng = instance_rng(cfg.seed, 0);
    const Potential V = make_potential(p["potential"], grid, rng, &r.warnings, "potential");
    const Density rho0 = make_density(p["density"], grid, V, rng, "density");
    auto taus = number_list(p, "taus", "");
    std::sort(taus.rbegin(), taus.rend());
    const double t_final = number(p, "t_final", "");
    const double dt_factor = number(p, "dt_factor", "");
    const auto jo = jko_options(p["tolerances"]);

    Json rows = Json::array();
    std::vector<double> finals, maxima;
    bool complete = true;
    std::ostringstream csv;
    csv << "tau,step,t,l1\n";
    for (double tau : taus) {
        const int K = static_cast<int>(std::lround(t_final / tau));
        const auto traj = run_trajectory(rho0, V, tau, K, jo);
        complete = complete && traj.complete;
        if (!traj.complete) {
            rows.push_back({{"tau", tau}, {"complete", false}, {"abort_reason", traj.abort_reason}});
            finals.push_back(std::numeric_limits<double>::infinity());
            maxima.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const auto fp = solve_fp(rho0, V, t_final, tau * dt_factor);
        const auto cmp = compare_jko_to_fp(traj, fp);
        for (std::size_t k = 0; k < cmp.l1.size(); ++k)
            csv << format_double(tau) << ',' << k << ',' << format_double(cmp.times[k]) << ',' << format_double(cmp.l1[k]) << '\n';
        finals.push_back(cmp.l1.back());
        maxima.push_back(cmp.max_error);
        rows.push_back({{"tau", tau}, {"complete", true}, {"final_l1", cmp.l1.back()}, {"max_l1", cmp.max_error},
                        {"dt", tau * dt_factor}, {"steps", K}});
    }
    r.file("fp_errors.csv", csv.str());
    r.results["ladder"] = rows;
    bool monotone = complete;
    for (std::size_t i = 1; i < finals.size(); ++i)
        monotone = monotone && finals[i] < finals[i - 1] && maxima[i] < maxima[i - 1];
    r.check("trajectories_complete", complete, std::to_string(taus.size()) + " trajectories");
    r.check("monotone_error", monotone, "final and max-over-k L1 errors decrease along the tau ladder");
    if (complete && taus.size() >= 2) {
        const double order = fitted_order(taus, finals);
        r.results["order"] = order;
        r.check("convergence_order", order >= number(p, "min_order", ""), "fitted order " + format_double(order));
    }
}

// ---------------------------------------------------------------- lemma-probe

void lemma_probe(const RunConfig& cfg, Report& r) {
    const Json& p = cfg.params;
    const double R = number(p, "radius", "");
    const double bound_tol = number(p, "bound_tol_factor", "") * R;
    const int n1 = integer(p, "n_1d", "");
    const int m1 = integer(p, "instances_1d", "");
    const int n2 = integer(p, "n_2d", "");
    const int m2 = integer(p, "instances_2d", "");
    SinkhornOptions so;
    so.tol_marg = number(p["tolerances"], "tol_marg", "tolerances");
    so.max_iter = integer(p["tolerances"], "max_iter", "tolerances");

    auto row_of = [](const ArgmaxCheck& c) {
        return Json{{"is_interior", c.is_interior}, {"vacuous", c.vacuous},        {"margin", c.margin},
                    {"max_interior", c.max_interior}, {"max_boundary", c.max_boundary}, {"max_overall", c.max_overall},
                    {"argmax_cell", c.argmax_cell},   {"boundary_bound_ok", c.boundary_bound_ok},
                    {"global_bound_ok", c.global_bound_ok}};
    };

    std::vector<Json> rows1(m1), rows2(m2);
    std::vector<char> ok1(m1, 0), ok2(m2, 0), bound1(m1, 0), bound2(m2, 0);
    const Grid line = Grid::interval(-R, R, n1);
    const Potential zero(line, std::vector<double>(line.size(), 0.0), 0.0);
    parallel_for(m1, cfg.jobs, [&](int i) {
        Rng rng = instance_rng(cfg.seed, static_cast<std::uint64_t>(i));
        const Density rho = make_density(p["density"], line, zero, rng, "density");
        const Density g = make_density(p["density"], line, zero, rng, "density");
        const auto plan = solve_1d(rho, g);
        const auto c = interior_argmax_check(line, plan.phi, bound_tol);
        ok1[i] = c.is_interior && c.margin > 0.0;
        bound1[i] = c.boundary_bound_ok;
        rows1[i] = row_of(c);
        rows1[i]["instance"] = i;
    });

    const Grid disc = Grid::disc(0.0, 0.0, R, std::max(n2, 2));
    const double eps = number(p, "eps_factor", "") * disc.h() * disc.h();
    const auto sig = number_list(p["bump"], "sigma", "bump");
    const auto off = number_list(p["bump"], "offset", "bump");
    parallel_for(m2, cfg.jobs, [&](int i) {
        Rng rng = instance_rng(cfg.seed, 1000u + static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> us(sig[0], sig[1]), uo(off[0], off[1]),
            ua(0.0, 2.0 * std::numbers::pi);
        const double s1 = us(rng) * R, s2 = us(rng) * R, d = uo(rng) * R, ang = ua(rng);
        const Point c2{d * std::cos(ang), d * std::sin(ang)};
        const Density rho = Density::sampled(disc, [&](Point q) { return std::exp(-0.5 * (q.x * q.x + q.y * q.y) / (s1 * s1)); });
        const Density g = Density::sampled(disc, [&](Point q) {
            return std::exp(-0.5 * ((q.x - c2.x) * (q.x - c2.x) + (q.y - c2.y) * (q.y - c2.y)) / (s2 * s2));
        });
        const auto probe = boundary_argmax_probe(rho, g, eps, bound_tol, so);
        ok2[i] = probe.transport.converged && probe.check.is_interior && probe.check.margin > 0.0;
        bound2[i] = probe.check.boundary_bound_ok;
        rows2[i] = row_of(probe.check);
        rows2[i]["instance"] = i;
        rows2[i]["sigma_source"] = s1;
        rows2[i]["sigma_target"] = s2;
        rows2[i]["offset"] = {c2.x, c2.y};
        rows2[i]["sinkhorn_iterations"] = probe.transport.iterations;
        rows2[i]["sinkhorn_converged"] = probe.transport.converged;
    });

    r.results["interval"] = rows1;
    r.results["disc"] = rows2;
    r.results["eps"] = eps;
    r.results["bound"] = std::sqrt(2.0) * R + bound_tol;
    auto all = [](const std::vector<char>& v) { return std::all_of(v.begin(), v.end(), [](char c) { return c != 0; }); };
    r.check("interior_argmax_interval", all(ok1), std::to_string(m1) + " exact 1-D pairs");
    r.check("interior_argmax_disc", all(ok2), std::to_string(m2) + " entropic disc pairs, eps = " + format_double(eps));
    r.check("boundary_bound", all(bound1) && all(bound2), "|grad phi| <= sqrt(2) R + " + format_double(bound_tol) + " on boundary cells");

    std::ostringstream csv;
    csv << "dim,instance,is_interior,margin,max_interior,max_boundary,max_overall,boundary_bound_ok,global_bound_ok\n";
    auto emit = [&](int dim, const std::vector<Json>& rows) {
        for (const auto& row : rows)
            csv << dim << ',' << row["instance"].get<int>() << ',' << row["is_interior"].get<bool>() << ','
                << format_double(row["margin"].get<double>()) << ',' << format_double(row["max_interior"].get<double>())
                << ',' << format_double(row["max_boundary"].get<double>()) << ','
                << format_double(row["max_overall"].get<double>()) << ',' << row["boundary_bound_ok"].get<bool>() << ','
                << row["global_bound_ok"].get<bool>() << '\n';
    };
    emit(1, rows1);
    emit(2, rows2);
    r.file("probes.csv", csv.str());
}

const std::map<std::string, std::function<void(const RunConfig&, Report&)>>& runners() {
    static const std::map<std::string, std::function<void(const RunConfig&, Report&)>> m = {
        {"jko1d",
         [](const RunConfig& c, Report& r) {
             const std::string s = c.params["study"].get<std::string>();
             if (s == "oracle") jko1d_oracle(c, r);
             else if (s == "residuals") jko1d_residuals(c, r);
             else if (s == "gibbs") jko1d_gibbs(c, r);
             else jko1d_trajectory(c, r);
         }},
        {"jko2d",
         [](const RunConfig& c, Report& r) {
             if (c.params["study"].get<std::string>() == "gibbs") jko2d_gibbs(c, r);
             else jko2d_step(c, r);
         }},
        {"theorem-sweep", theorem_sweep},
        {"extension-audit", extension_audit},
        {"fp-compare", fp_compare},
        {"lemma-probe", lemma_probe},
    };
    return m;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Vacuous: return "vacuous";
    }
    return "unknown";
}

RunOutcome run_experiment(const RunConfig& cfg) {
    Report r;
    r.dir = cfg.output;
    std::filesystem::create_directories(r.dir);
    std::filesystem::remove(r.dir + "/FAILED");
    const Json echo = {{"schema", kSchema}, {"kind", cfg.kind}, {"seed", cfg.seed}, {"params", cfg.params}};
    r.file("config.json", echo.dump(2) + "\n");

    try {
        runners().at(cfg.kind)(cfg, r);
    } catch (const std::exception& e) {
        r.file("FAILED", std::string(e.what()) + "\n");
        throw;
    }

    RunOutcome out;
    out.directory = r.dir;
    out.checks = r.checks;
    out.warnings = r.warnings;
    bool failed = false, vac = false;
    Json checks = Json::array();
    std::ostringstream head;
    head << cfg.kind << " (seed " << cfg.seed << ")\n";
    for (const auto& c : r.checks) {
        failed = failed || c.verdict == Verdict::Fail;
        vac = vac || c.verdict == Verdict::Vacuous;
        checks.push_back({{"name", c.name}, {"status", verdict_name(c.verdict)}, {"detail", c.detail}});
        head << "  " << c.name << ": " << verdict_name(c.verdict) << "  " << c.detail << '\n';
    }
    for (const auto& w : r.warnings) head << "  warning: " << w << '\n';
    const std::string status = failed ? "fail" : (vac ? "vacuous" : "pass");
    head << "status: " << status << '\n';

    out.summary = {{"kind", cfg.kind}, {"seed", cfg.seed}, {"status", status}, {"checks", checks},
                   {"warnings", r.warnings}, {"results", r.results}};
    r.file("summary.json", out.summary.dump(2) + "\n");
    r.file("summary.txt", head.str() + (r.text.str().empty() ? "" : "\n" + r.text.str()));
    out.exit_code = failed ? 2 : 0;
    return out;
}

}  // namespace jko::cli
