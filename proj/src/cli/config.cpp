#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cli/families.hpp"
#include "jko/extension.hpp"

namespace jko::cli {

namespace {

Json interval(double a, double b, int n) { return {{"shape", "interval"}, {"a", a}, {"b", b}, {"n", n}}; }
Json quadratic(double alpha) { return {{"family", "quadratic"}, {"alpha", alpha}}; }
Json perturbed_gibbs(double amplitude, double frequency) {
    return {{"family", "perturbed-gibbs"}, {"amplitude", amplitude}, {"frequency", frequency}};
}
Json potential_corpus() {
    return Json::array({quadratic(1.0), quadratic(0.0), quadratic(-0.5), quadratic(4.0),
                        {{"family", "double-well"}, {"a", 1.0}, {"b", 0.5}}});
}

std::vector<KindInfo> build_kinds() {
    std::vector<KindInfo> k;
    k.push_back({"jko1d",
                 "1-D JKO stepping. study = trajectory (Lipschitz contraction and decay envelope along K steps), "
                 "oracle (comparison with the discrete-LP minimiser on random instances), residuals "
                 "(optimality and Monge-Ampere residuals under refinement) or gibbs (fixed point).",
                 {{"study", "trajectory"},
                  {"domain", interval(-1.0, 1.0, 200)},
                  {"potential", quadratic(1.0)},
                  {"density", perturbed_gibbs(0.5, 3.0)},
                  {"target", {{"family", "truncated-gaussian"}, {"mu", 0.2}, {"sigma", 0.8}}},
                  {"tau", 0.2},
                  {"K", 20},
                  {"envelope", true},
                  {"instances", 20},
                  {"alphas", {-0.5, 0.0, 1.0, 4.0}},
                  {"n_values", {64, 128, 256}},
                  {"potentials", potential_corpus()},
                  {"oracle", {{"n", 32}, {"iterations", 20000}, {"subatoms", 8}}},
                  {"tolerances",
                   {{"tol_opt", 1e-7},
                    {"max_iter", 500},
                    {"tol_factor", 5.0},
                    {"energy_gap", 1e-5},
                    {"l1_gap", 1e-3},
                    {"gibbs_l1", 1e-8},
                    {"min_order", 1.5},
                    {"min_order_differentiated", 1.0}}}}});
    k.push_back({"jko2d",
                 "Entropic JKO stepping on a box or disc. study = step (K steps with Lipschitz checks and, on "
                 "boxes with separable data, the product-structure check) or gibbs (fixed-point defect along an "
                 "eps ladder for each corpus potential).",
                 {{"study", "step"},
                  {"domain", {{"shape", "box"}, {"x", {-1.0, 1.0}}, {"y", {-1.0, 1.0}}, {"n", {32, 32}}}},
                  {"potential", quadratic(1.0)},
                  {"density", perturbed_gibbs(0.5, 3.0)},
                  {"tau", 0.2},
                  {"K", 1},
                  {"eps", nullptr},
                  {"eps_factors", {8.0, 4.0, 2.0}},
                  {"potentials", potential_corpus()},
                  {"product_check", true},
                  {"tolerances",
                   {{"tol_rho", 1e-9},
                    {"tol_marg", 1e-8},
                    {"max_iter", 50000},
                    {"tol_factor", 5.0},
                    {"product_l1", 1e-6}}}}});
    k.push_back({"theorem-sweep",
                 "Per-step Lipschitz contraction on seeded random 1-D instances over an (alpha, tau) grid, with a "
                 "refinement pass comparing margins at n_refine.",
                 {{"domain", interval(-1.0, 1.0, 200)},
                  {"potential", {{"family", "random-convex"}}},
                  {"density", {{"family", "random-smooth"}, {"modes", 4}, {"scale", 1.0}}},
                  {"alphas", {-0.5, 0.0, 1.0, 4.0}},
                  {"taus", {0.05, 0.2}},
                  {"instances", 50},
                  {"K", 1},
                  {"n_refine", 400},
                  {"refine_slack", 1e-3},
                  {"tolerances", {{"tol_opt", 1e-7}, {"max_iter", 500}, {"tol_factor", 5.0}}}}});
    k.push_back({"extension-audit",
                 "Alpha-convex and Lipschitz extensions, mollified penalized approximants V_n, h_n, g_n on an "
                 "enclosing domain, audited along the mollifier ladder.",
                 {{"domain", interval(0.0, 1.0, 400)},
                  {"R", 1.5},
                  {"mollifier_n", {5, 10, 20}},
                  {"potential", {{"family", "quadratic"}, {"alpha", 1.0}, {"center", 0.5}}},
                  {"density", perturbed_gibbs(0.5, 3.0)},
                  {"dilation", 0.3},
                  {"tolerances", {{"sandwich", 1e-9}, {"lip_excess", 2.05}, {"grad_h", 0.02}, {"convexity", 1e-6}}}}});
    k.push_back({"fp-compare",
                 "JKO trajectories against the implicit finite-volume Fokker-Planck solver along a tau ladder at a "
                 "fixed final time.",
                 {{"domain", interval(-1.0, 1.0, 200)},
                  {"potential", quadratic(1.0)},
                  {"density", perturbed_gibbs(0.5, 3.0)},
                  {"t_final", 0.5},
                  {"taus", {0.1, 0.05, 0.025}},
                  {"dt_factor", 0.02},
                  {"min_order", 0.8},
                  {"tolerances", {{"tol_opt", 1e-7}, {"max_iter", 500}}}}});
    k.push_back({"lemma-probe",
                 "Location of max |grad phi| for smooth positive pairs: exact potentials on an interval and "
                 "entropic potentials on a disc, with the sqrt(2) R bound.",
                 {{"radius", 1.0},
                  {"n_1d", 200},
                  {"instances_1d", 20},
                  {"density", {{"family", "random-smooth"}, {"modes", 4}, {"scale", 1.0}}},
                  {"n_2d", 64},
                  {"instances_2d", 3},
                  {"eps_factor", 2.0},
                  {"bump", {{"sigma", {0.3, 0.45}}, {"offset", {0.2, 0.4}}}},
                  {"bound_tol_factor", 0.05},
                  {"tolerances", {{"tol_marg", 1e-8}, {"max_iter", 20000}}}}});
    return k;
}

// Objects that select a family are replaced wholesale; other objects merge key by key.
bool is_family_object(const std::string& key) {
    return key == "domain" || key == "potential" || key == "density" || key == "target";
}

void merge_params(Json& params, const Json& doc) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "schema" || key == "kind" || key == "seed" || key == "output") continue;
        if (!params.contains(key)) throw ConfigError(key, "unknown key");
        Json& slot = params[key];
        if (slot.is_object() && !is_family_object(key)) {
            if (!it.value().is_object()) throw ConfigError(key, "expected an object");
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                if (!slot.contains(jt.key())) throw ConfigError(key + "." + jt.key(), "unknown key");
                slot[jt.key()] = jt.value();
            }
        } else {
            slot = it.value();
        }
    }
}

void positive(const Json& p, const std::string& key, const std::string& where = "") {
    if (!(number(p, key, where) > 0.0)) throw ConfigError(where.empty() ? key : where + "." + key, "must be positive");
}

void at_least(const Json& p, const std::string& key, int lo, const std::string& where = "") {
    if (integer(p, key, where) < lo)
        throw ConfigError(where.empty() ? key : where + "." + key, "must be >= " + std::to_string(lo));
}

void positive_list(const Json& p, const std::string& key) {
    const auto v = number_list(p, key, "");
    if (v.empty()) throw ConfigError(key, "must not be empty");
    for (double x : v)
        if (!(x > 0.0)) throw ConfigError(key, "entries must be positive");
}

void check_families(const Json& p, const std::string& key_domain, const std::vector<std::string>& density_keys) {
    const Grid grid = make_grid(p[key_domain], key_domain);
    Rng rng = instance_rng(0, 0);
    const Potential V = make_potential(p["potential"], grid, rng, nullptr, "potential");
    for (const auto& k : density_keys) make_density(p[k], grid, V, rng, k);
}

void check_potential_list(const Json& p, const Grid& grid) {
    if (!p["potentials"].is_array() || p["potentials"].empty()) throw ConfigError("potentials", "expected a list");
    Rng rng = instance_rng(0, 0);
    for (std::size_t i = 0; i < p["potentials"].size(); ++i)
        make_potential(p["potentials"][i], grid, rng, nullptr, "potentials[" + std::to_string(i) + "]");
}

std::string study_of(const Json& p, const std::vector<std::string>& allowed) {
    if (!p["study"].is_string()) throw ConfigError("study", "expected a string");
    const std::string s = p["study"].get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) throw ConfigError("study", "unknown study '" + s + "'");
    return s;
}

void validate(const std::string& kind, const Json& p) {
    if (kind == "jko1d") {
        const auto study = study_of(p, {"trajectory", "oracle", "residuals", "gibbs"});
        const Grid grid = make_grid(p["domain"], "domain");
        if (grid.dim() != 1) throw ConfigError("domain.shape", "jko1d needs an interval");
        check_families(p, "domain", {"density", "target"});
        positive(p, "tau");
        at_least(p, "K", 1);
        if (!p["envelope"].is_boolean()) throw ConfigError("envelope", "expected true or false");
        at_least(p, "instances", 1);
        number_list(p, "alphas", "");
        for (int n : integer_list(p, "n_values", ""))
            if (n < 8) throw ConfigError("n_values", "entries must be >= 8");
        check_potential_list(p, grid);
        at_least(p["oracle"], "n", 2, "oracle");
        if (integer(p["oracle"], "n", "oracle") > 64) throw ConfigError("oracle.n", "must be <= 64");
        at_least(p["oracle"], "iterations", 2, "oracle");
        at_least(p["oracle"], "subatoms", 1, "oracle");
        const Json& t = p["tolerances"];
        for (const char* k : {"tol_opt", "tol_factor", "energy_gap", "l1_gap", "gibbs_l1"}) positive(t, k, "tolerances");
        at_least(t, "max_iter", 1, "tolerances");
        number(t, "min_order", "tolerances");
        number(t, "min_order_differentiated", "tolerances");
        (void)study;
    } else if (kind == "jko2d") {
        study_of(p, {"step", "gibbs"});
        const Grid grid = make_grid(p["domain"], "domain");
        if (grid.dim() != 2) throw ConfigError("domain.shape", "jko2d needs a box or a disc");
        check_families(p, "domain", {"density"});
        positive(p, "tau");
        at_least(p, "K", 1);
        if (!p["eps"].is_null()) positive(p, "eps");
        positive_list(p, "eps_factors");
        check_potential_list(p, grid);
        if (!p["product_check"].is_boolean()) throw ConfigError("product_check", "expected true or false");
        const Json& t = p["tolerances"];
        for (const char* k : {"tol_rho", "tol_marg", "tol_factor", "product_l1"}) positive(t, k, "tolerances");
        at_least(t, "max_iter", 1, "tolerances");
    } else if (kind == "theorem-sweep") {
        const Grid grid = make_grid(p["domain"], "domain");
        if (grid.dim() != 1) throw ConfigError("domain.shape", "theorem-sweep needs an interval");
        check_families(p, "domain", {"density"});
        if (number_list(p, "alphas", "").empty()) throw ConfigError("alphas", "must not be empty");
        positive_list(p, "taus");
        at_least(p, "instances", 1);
        at_least(p, "K", 1);
        at_least(p, "n_refine", 0);
        positive(p, "refine_slack");
        const Json& t = p["tolerances"];
        for (const char* k : {"tol_opt", "tol_factor"}) positive(t, k, "tolerances");
        at_least(t, "max_iter", 1, "tolerances");
    } else if (kind == "extension-audit") {
        check_families(p, "domain", {"density"});
        positive(p, "R");
        const auto ns = integer_list(p, "mollifier_n", "");
        if (ns.empty()) throw ConfigError("mollifier_n", "must not be empty");
        for (int n : ns)
            if (n < 1) throw ConfigError("mollifier_n", "entries must be >= 1");
        const Grid grid = make_grid(p["domain"], "domain");
        try {
            const auto setup = ExtensionSetup::make(grid, number(p, "R", ""));
            for (int n : ns) setup.require_support_fits(n);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("R", e.what());
        }
        positive(p, "dilation");
        const Json& t = p["tolerances"];
        for (const char* k : {"sandwich", "lip_excess", "grad_h", "convexity"}) positive(t, k, "tolerances");
    } else if (kind == "fp-compare") {
        const Grid grid = make_grid(p["domain"], "domain");
        if (grid.dim() != 1) throw ConfigError("domain.shape", "fp-compare needs an interval");
        check_families(p, "domain", {"density"});
        positive(p, "t_final");
        positive_list(p, "taus");
        const double tf = number(p, "t_final", "");
        for (double tau : number_list(p, "taus", "")) {
            const double k = tf / tau;
            if (std::abs(k - std::round(k)) > 1e-9 * k) throw ConfigError("taus", "each tau must divide t_final");
        }
        positive(p, "dt_factor");
        if (number(p, "dt_factor", "") > 1.0) throw ConfigError("dt_factor", "must be <= 1");
        number(p, "min_order", "");
        const Json& t = p["tolerances"];
        positive(t, "tol_opt", "tolerances");
        at_least(t, "max_iter", 1, "tolerances");
    } else if (kind == "lemma-probe") {
        positive(p, "radius");
        at_least(p, "n_1d", 8);
        at_least(p, "instances_1d", 0);
        at_least(p, "n_2d", 8);
        at_least(p, "instances_2d", 0);
        positive(p, "eps_factor");
        if (number(p, "eps_factor", "") < 0.25) throw ConfigError("eps_factor", "must be >= 0.25 (eps >= h^2/4)");
        positive(p, "bound_tol_factor");
        const Grid grid = Grid::interval(-1.0, 1.0, 8);
        Rng rng = instance_rng(0, 0);
        make_density(p["density"], grid, Potential(grid, std::vector<double>(8, 0.0), 0.0), rng, "density");
        for (const char* k : {"sigma", "offset"}) {
            const auto r = number_list(p["bump"], k, "bump");
            if (r.size() != 2 || !(r[0] > 0.0) || r[1] < r[0])
                throw ConfigError(std::string("bump.") + k, "expected [lo, hi] with 0 < lo <= hi");
        }
        const Json& t = p["tolerances"];
        positive(t, "tol_marg", "tolerances");
        at_least(t, "max_iter", 1, "tolerances");
    }
}

}  // namespace

const std::vector<KindInfo>& experiment_kinds() {
    static const std::vector<KindInfo> kinds = build_kinds();
    return kinds;
}

const KindInfo* find_kind(const std::string& name) {
    for (const auto& k : experiment_kinds())
        if (k.name == name) return &k;
    return nullptr;
}

std::string describe_kind(const KindInfo& k) {
    std::ostringstream os;
    os << k.name << "\n\n" << k.summary << "\n\n";
    os << "Required: \"schema\": \"" << kSchema << "\", \"kind\": \"" << k.name << "\"\n";
    os << "Optional: \"seed\" (default 0), \"output\" (default runs/" << k.name << ")\n\n";
    os << "Keys and defaults:\n" << k.defaults.dump(2) << "\n";
    return os.str();
}

double number(const Json& obj, const std::string& key, const std::string& where) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key)) throw ConfigError(path, "missing");
    const Json& v = obj[key];
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

int integer(const Json& obj, const std::string& key, const std::string& where) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key)) throw ConfigError(path, "missing");
    const Json& v = obj[key];
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<int>();
}

std::vector<double> number_list(const Json& obj, const std::string& key, const std::string& where) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key) || !obj[key].is_array()) throw ConfigError(path, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) throw ConfigError(path, "expected a list of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> integer_list(const Json& obj, const std::string& key, const std::string& where) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!obj.contains(key) || !obj[key].is_array()) throw ConfigError(path, "expected a list of integers");
    std::vector<int> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number_integer()) throw ConfigError(path, "expected a list of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

void require_keys(const Json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError(where + "." + it.key(), "unknown key");
}

RunConfig parse_config(const Json& doc, const Overrides& ov) {
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
    if (!doc.contains("schema")) throw ConfigError("schema", "missing (expected \"" + std::string(kSchema) + "\")");
    if (doc["schema"] != kSchema) throw ConfigError("schema", "unsupported schema (expected \"" + std::string(kSchema) + "\")");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("kind", "missing");
    const KindInfo* info = find_kind(doc["kind"].get<std::string>());
    if (!info) throw ConfigError("kind", "unknown experiment kind '" + doc["kind"].get<std::string>() + "'");

    RunConfig cfg;
    cfg.kind = info->name;
    cfg.params = info->defaults;
    merge_params(cfg.params, doc);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    cfg.output = "runs/" + cfg.kind;
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) throw ConfigError("output", "expected a string");
        cfg.output = doc["output"].get<std::string>();
    }
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.output) cfg.output = *ov.output;
    if (ov.jobs < 1) throw ConfigError("--jobs", "must be >= 1");
    cfg.jobs = ov.jobs;
    validate(cfg.kind, cfg.params);
    return cfg;
}

RunConfig load_config(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, ov);
}

}  // namespace jko::cli
