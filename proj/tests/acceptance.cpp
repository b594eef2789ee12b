// Runs the shipped configs and re-derives each acceptance criterion from the
// raw numbers in summary.json. Prints one line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "cli/config.hpp"
#include "cli/experiments.hpp"

using jko::cli::Json;
namespace fs = std::filesystem;

namespace {

std::string base_dir;

struct Run {
    Json summary;
    double seconds = 0.0;
    std::string dir;
    std::string error;
};

std::map<std::string, Run> cache;

Run& run(const std::string& name, const std::string& subdir = "first", int jobs = 1) {
    const std::string key = subdir + "/" + name;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Run r;
    r.dir = base_dir + "/" + key;
    jko::cli::Overrides ov;
    ov.output = r.dir;
    ov.jobs = jobs;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto cfg = jko::cli::load_config(std::string(JKO_CONFIG_DIR) + "/" + name + ".json", ov);
        r.summary = jko::cli::run_experiment(cfg).summary;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cache.emplace(key, std::move(r)).first->second;
}

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

Verdict theorem_sweep() {
    const Run& r = run("c1_theorem_sweep");
    if (!r.error.empty()) return {false, r.error};
    int steps = 0, fails = 0, refine_bad = 0, cells = 0;
    std::map<std::pair<double, double>, int> per_pair;
    double worst = 1e300;
    for (const auto& e : r.summary["results"]["entries"]) {
        ++per_pair[{e["alpha"].get<double>(), e["tau"].get<double>()}];
        for (const auto& s : e["steps"]) {
            if (s["status"] == "vacuous") continue;
            ++steps;
            cells = s["n"].get<int>();
            const double lhs = s["lhs"], rhs = s["rhs"], tol = s["tol"];
            if (lhs > rhs + tol) ++fails;
            worst = std::min(worst, rhs + tol - lhs);
            if (!s.contains("margin_refined") || s["margin_refined"].get<double>() < s["margin"].get<double>() - 1e-3)
                ++refine_bad;
        }
    }
    bool grid_ok = per_pair.size() == 8;
    for (const auto& [k, v] : per_pair) grid_ok = grid_ok && v == 50;
    const bool ok = grid_ok && cells == 200 && steps == 400 && fails == 0 && refine_bad == 0 && r.seconds <= 300.0;
    return {ok, std::to_string(steps) + " steps over 8 (alpha, tau) x 50 instances, " + std::to_string(fails) +
                    " failures, min slack " + fmt(worst) + ", " + std::to_string(refine_bad) +
                    " refinement regressions, " + fmt(r.seconds) + " s"};
}

Verdict envelope(const std::string& name, double alpha, double tau, double limit_s) {
    const Run& r = run(name);
    if (!r.error.empty()) return {false, r.error};
    const Json& env = r.summary["results"]["envelope"];
    if (env.is_null()) return {false, "no envelope in results"};
    const double factor = 1.0 + alpha * tau;
    const double tol = env["tol_thm"];
    const auto& series = env["series"];
    const double lip0 = series[0]["lip_k"];
    bool ok = series.size() == 21 && std::abs(env["factor"].get<double>() - factor) < 1e-15;
    double worst = 1e300;
    for (const auto& s : series) {
        const int k = s["k"];
        const double bound = std::pow(factor, -k) * lip0 + k * tol;
        worst = std::min(worst, bound - s["lip_k"].get<double>());
        ok = ok && s["lip_k"].get<double>() <= bound;
    }
    for (const auto& c : r.summary["checks"]) ok = ok && c["status"] == "pass";
    ok = ok && r.seconds <= limit_s;
    return {ok, "K = " + std::to_string(series.size() - 1) + ", Lip_0 = " + fmt(lip0) + ", Lip_K = " +
                    fmt(series.back()["lip_k"].get<double>()) + ", min slack " + fmt(worst) + ", " +
                    fmt(r.seconds) + " s"};
}

Verdict oracle() {
    const Run& r = run("c4_oracle");
    if (!r.error.empty()) return {false, r.error};
    const auto& rows = r.summary["results"]["instances"];
    double de = 0.0, l1 = 0.0;
    for (const auto& x : rows) {
        de = std::max({de, std::abs(x["energy_ot1d"]["jko"].get<double>() - x["energy_ot1d"]["oracle"].get<double>()),
                       std::abs(x["energy_atomic"]["jko"].get<double>() - x["energy_atomic"]["oracle"].get<double>())});
        l1 = std::max(l1, x["l1"].get<double>());
    }
    const bool ok = rows.size() == 20 && de <= 1e-5 && l1 <= 1e-3;
    return {ok, std::to_string(rows.size()) + " instances at n = 32, max |dF| = " + fmt(de) + ", max L1 = " + fmt(l1)};
}

Verdict residuals() {
    const Run& r = run("c5_residuals");
    if (!r.error.empty()) return {false, r.error};
    std::vector<double> h, e;
    double opt = 0.0;
    for (const auto& x : r.summary["results"]["refinement"]) {
        h.push_back(x["h"]);
        e.push_back(x["monge_ampere"]);
        opt = std::max(opt, x["optimality_residual"].get<double>());
    }
    const double order = slope(h, e);
    return {opt <= 1e-7 && order >= 1.5 && h.size() >= 3,
            "max optimality residual " + fmt(opt) + ", Monge-Ampere order " + fmt(order) + " over " +
                std::to_string(h.size()) + " grids"};
}

Verdict gibbs() {
    const Run& a = run("c6_gibbs_1d");
    const Run& b = run("c6_gibbs_2d");
    if (!a.error.empty()) return {false, a.error};
    if (!b.error.empty()) return {false, b.error};
    double worst = 0.0;
    for (const auto& x : a.summary["results"]["gibbs"]) worst = std::max(worst, x["l1"].get<double>());
    bool shrink = true;
    std::string last;
    for (const auto& x : b.summary["results"]["gibbs"]) {
        double prev = 1e300;
        for (const auto& s : x["ladder"]) {
            shrink = shrink && s["l1"].get<double>() < prev;
            prev = s["l1"];
        }
        last = fmt(prev);
    }
    const bool ok = worst <= 1e-8 && shrink && a.summary["results"]["gibbs"].size() == 5 &&
                    b.summary["results"]["gibbs"].size() == 5;
    return {ok, "1-D max L1 " + fmt(worst) + "; entropic L1 strictly shrinks along eps ladder (last " + last + ")"};
}

Verdict fp() {
    const Run& r = run("c7_fp_compare");
    if (!r.error.empty()) return {false, r.error};
    std::vector<double> taus, finals;
    bool mono = true;
    double prev_f = 1e300, prev_m = 1e300;
    for (const auto& x : r.summary["results"]["ladder"]) {
        if (!x["complete"].get<bool>()) return {false, "incomplete trajectory"};
        taus.push_back(x["tau"]);
        finals.push_back(x["final_l1"]);
        mono = mono && x["final_l1"].get<double>() < prev_f && x["max_l1"].get<double>() < prev_m;
        prev_f = x["final_l1"];
        prev_m = x["max_l1"];
    }
    const double order = slope(taus, finals);
    return {mono && order >= 0.8 && taus.size() == 3,
            "L1 at t = 0.5: " + fmt(finals[0]) + ", " + fmt(finals[1]) + ", " + fmt(finals[2]) + "; order " + fmt(order)};
}

Verdict lemma() {
    const Run& r = run("c8_lemma_probe");
    if (!r.error.empty()) return {false, r.error};
    const Json& res = r.summary["results"];
    int n1 = 0, n2 = 0;
    bool ok = true;
    double min_margin = 1e300;
    for (const auto& x : res["interval"]) {
        ++n1;
        ok = ok && x["is_interior"].get<bool>() && x["margin"].get<double>() > 0.0 && x["boundary_bound_ok"].get<bool>();
    }
    for (const auto& x : res["disc"]) {
        ++n2;
        ok = ok && x["is_interior"].get<bool>() && x["margin"].get<double>() > 0.0 &&
             x["boundary_bound_ok"].get<bool>() && x["sinkhorn_converged"].get<bool>();
        min_margin = std::min(min_margin, x["margin"].get<double>());
    }
    const double h = 2.0 / 64.0;
    ok = ok && n1 == 20 && n2 >= 1 && std::abs(res["eps"].get<double>() - 2.0 * h * h) < 1e-15;
    return {ok, std::to_string(n1) + " interval pairs, " + std::to_string(n2) +
                    " disc pairs at n = 64, eps = 2h^2, min disc margin " + fmt(min_margin)};
}

Verdict extension() {
    const Run& r = run("c9_extension_audit");
    if (!r.error.empty()) return {false, r.error};
    bool ok = true;
    double prev = 1e300, excess = 0.0;
    std::vector<int> ns;
    for (const auto& x : r.summary["results"]["ladder"]) {
        const int n = x["n"];
        ns.push_back(n);
        ok = ok && x["sandwich_min"].get<double>() >= -1e-9 && x["sandwich_max"].get<double>() <= 1.0 / n + 1e-9;
        ok = ok && x["lip_excess"].get<double>() <= 2.05;
        ok = ok && x["grad_h_n_max"].get<double>() <= x["lip_h"].get<double>() + 0.02;
        ok = ok && x["mass_outside_dilation"].get<double>() < prev;
        prev = x["mass_outside_dilation"];
        excess = std::max(excess, x["lip_excess"].get<double>());
    }
    ok = ok && ns == std::vector<int>{5, 10, 20};
    return {ok, "n in {5, 10, 20}: sandwich within [0, 1/n], max Lip excess " + fmt(excess) +
                    ", |grad h_n| bound, outside mass decays"};
}

Verdict determinism() {
    const std::vector<std::string> configs = {"c1_theorem_sweep", "c2_decay_alpha1", "c3_growth_alpha_neg",
                                              "c4_oracle",        "c5_residuals",    "c6_gibbs_1d",
                                              "c6_gibbs_2d",      "c7_fp_compare",   "c8_lemma_probe",
                                              "c9_extension_audit", "vacuous_regime", "gibbs_sweep",
                                              "jko2d_step"};
    int files = 0;
    std::string diff;
    for (const auto& c : configs) {
        const Run& a = run(c, "first", 1);
        const Run& b = run(c, "rerun", 2);
        if (!a.error.empty() || !b.error.empty()) return {false, c + ": " + a.error + b.error};
        for (const auto& entry : fs::directory_iterator(a.dir)) {
            if (entry.path().extension() != ".json") continue;
            const fs::path other = fs::path(b.dir) / entry.path().filename();
            std::ifstream x(entry.path()), y(other);
            std::stringstream sx, sy;
            sx << x.rdbuf();
            sy << y.rdbuf();
            ++files;
            if (sx.str() != sy.str() && diff.empty()) diff = c + "/" + entry.path().filename().string();
        }
    }
    return {diff.empty(), std::to_string(configs.size()) + " configs rerun with 2 threads, " + std::to_string(files) +
                              " JSON files compared" + (diff.empty() ? "" : ", first difference in " + diff)};
}

}  // namespace

int main(int argc, char** argv) {
    base_dir = argc > 1 ? argv[1] : (fs::temp_directory_path() / "jkolip_acceptance").string();
    fs::remove_all(base_dir);
    fs::create_directories(base_dir);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"theorem sweep", theorem_sweep},
        {"exponential decay (alpha = 1)", [] { return envelope("c2_decay_alpha1", 1.0, 0.2, 60.0); }},
        {"controlled growth (alpha = -0.5)", [] { return envelope("c3_growth_alpha_neg", -0.5, 0.1, 1e9); }},
        {"JKO vs oracle", oracle},
        {"optimality and Monge-Ampere residuals", residuals},
        {"Gibbs fixed point", gibbs},
        {"JKO to PDE consistency", fp},
        {"ball lemma probe", lemma},
        {"extension pipeline audit", extension},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": " << criteria[i].first << " -- "
                  << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
