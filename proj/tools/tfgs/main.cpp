// tfgs: command-line front end for the Thomas-Fermi ground-state solver.
//
//   tfgs constants --N 3 --alpha 1 --p 1.5 --q 2.5
//   tfgs solve --config tools/recipes/compact_jump_3d.cfg --out run/
//   tfgs potential --profile rho.csv --N 3 --alpha 2
//   tfgs verify --profile run/profile.csv
//   tfgs sweep --alpha-grid 0.5,1,2 --N 3 --p 4 --q 10
//
// Exit codes: 0 ok, 2 configuration or admissibility, 3 not converged or a failed check,
// 4 degenerate state.

#include "tfgs/analysis.hpp"
#include "tfgs/errors.hpp"
#include "tfgs/flow.hpp"
#include "tfgs/functionals.hpp"
#include "tfgs/io.hpp"
#include "tfgs/riesz.hpp"
#include "tfgs/special_fn.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using tfgs::io::num;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitDegenerate = 4;

struct Options {
    int N = 3;
    double alpha = 1.0, p = 1.5, q = 2.5;
    double L = 0;
    int M = 512;
    std::string clustering;
    double dt0 = 0.1;
    double rtol = 0.05;
    double stall_tol = 1e-8;
    long max_steps = 20000;
    std::string init = "ansatz";
    std::string init_file;
    double init_width = 1.0;
    std::string out = ".";
    int jobs = 1;
    long seed = 0;
    bool verbose = false;
    bool json = false;
    std::string config_file;

    // subcommand inputs
    std::string profile;
    std::string method = "automatic";
    double tol = 1e-4;
    double residual_tol = 1e-4;
    double sigma_tol = 1e-3;
    std::vector<double> alpha_grid, eps_grid, eps_weights;
};

tfgs::Params params_of(const Options& o) { return tfgs::Params{o.N, o.alpha, o.p, o.q}; }

tfgs::FlowConfig flow_of(const Options& o) {
    tfgs::FlowConfig c;
    c.dt0 = o.dt0;
    c.rtol_step = o.rtol;
    c.stall_tol = o.stall_tol;
    c.max_steps = o.max_steps;
    c.init = tfgs::init_from_string(o.init);
    c.init_file = o.init_file;
    c.init_width = o.init_width;
    c.grid.L = o.L;
    c.grid.M = o.M;
    if (!o.clustering.empty()) c.grid.clustering = tfgs::clustering_from_string(o.clustering);
    c.verbose = o.verbose;
    tfgs::validate(c);
    return c;
}

// The full run configuration, embedded in every JSON output.
ordered_json run_config(const std::string& command, const Options& o) {
    ordered_json j;
    j["version"] = tfgs::io::kVersion;
    j["command"] = command;
    j["params"] = {{"N", o.N}, {"alpha", o.alpha}, {"p", o.p}, {"q", o.q}};
    j["grid"] = {{"L", o.L}, {"M", o.M}, {"clustering", o.clustering.empty() ? "uniform" : o.clustering}};
    j["flow"] = {{"dt0", o.dt0},
                 {"rtol", o.rtol},
                 {"stall_tol", o.stall_tol},
                 {"max_steps", o.max_steps},
                 {"init", o.init},
                 {"init_file", o.init_file},
                 {"init_width", o.init_width}};
    j["outputs"] = {{"dir", o.out}, {"formats", {"csv", "json"}}};
    j["seed"] = o.seed;
    j["jobs"] = o.jobs;
    if (!o.config_file.empty()) j["config_file"] = o.config_file;
    return j;
}

ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::string dump17(const ordered_json& j) { return tfgs::io::format_json(j.dump()); }

std::string out_path(const Options& o, const std::string& name) {
    return (std::filesystem::path(o.out) / name).string();
}

// --- constants ---------------------------------------------------------------

int cmd_constants(const Options& o) {
    auto P = params_of(o);
    tfgs::validate(P);
    const auto& K = tfgs::constants(P);
    ordered_json t;
    t["riesz_A"] = jnum(K.riesz_A);
    t["hls_C"] = jnum(K.hls_C);
    t["hls_over_A"] = jnum(K.hls_over_A);
    t["lambda_star"] = jnum(K.lambda_star);
    t["theta"] = jnum(K.theta);
    t["theta_star"] = jnum(K.theta_star);
    t["nu"] = jnum(K.nu);
    t["omega_N"] = jnum(K.omega_N);
    t["C_lower"] = tfgs::on_explicit_family(P) ? jnum(tfgs::explicit_family_constant(P.N, P.alpha)) : ordered_json(nullptr);
    t["tf_limit_regime"] = tfgs::tf_limit_regime(P);
    t["expected_class"] = tfgs::to_string(tfgs::expected_classification(P));
    t["ill_conditioned"] = K.ill_conditioned;
    if (o.json) {
        ordered_json j{{"constants", t}, {"config", run_config("constants", o)}};
        std::cout << dump17(j);
        return kExitOk;
    }
    std::printf("%s\n", tfgs::describe(P).c_str());
    for (auto it = t.begin(); it != t.end(); ++it) {
        const auto& v = it.value();
        std::string s = v.is_number_float() ? num(v.get<double>()) : v.is_null() ? "n/a" : v.dump();
        if (v.is_string()) s = v.get<std::string>();
        std::printf("  %-16s %s\n", it.key().c_str(), s.c_str());
    }
    return kExitOk;
}

// --- solve -------------------------------------------------------------------

void write_solution(const Options& o, const tfgs::SolveResult& r, const tfgs::Params& P) {
    tfgs::io::ProfileMeta meta;
    meta.params = P;
    meta.has_params = true;
    meta.scalars = {{"lambda_inf", r.report.lambda_inf}, {"d_alpha_target", r.d_alpha_target}};
    tfgs::io::write_profile(out_path(o, "profile.csv"), r.u, meta);
    tfgs::io::write_history(out_path(o, "history.csv"), r.history);
    tfgs::io::write_text(out_path(o, "report.json"), tfgs::io::report_json(r.report, run_config("solve", o).dump()));
}

int cmd_solve(const Options& o) {
    auto P = params_of(o);
    tfgs::validate(P);
    auto cfg = flow_of(o);
    try {
        auto r = tfgs::solve(cfg, P);
        write_solution(o, r, P);
        const auto& R = r.report;
        std::printf("class %s  converged %s  steps %ld  lambda_inf %s\n", tfgs::to_string(R.classification).c_str(),
                    R.converged ? "yes" : "no", R.steps, num(R.lambda_inf).c_str());
        std::printf("C_est %s  sigma %s  support %s  jump %s\n", num(R.functionals.rayleigh_R).c_str(),
                    num(R.sigma_star_est).c_str(), R.support_radius ? num(*R.support_radius).c_str() : "inf",
                    R.jump_lambda ? num(*R.jump_lambda).c_str() : "n/a");
        std::printf("wrote %s\n", out_path(o, "{profile.csv,report.json,history.csv}").c_str());
        return R.converged ? kExitOk : kExitNotConverged;
    } catch (const tfgs::InvariantError& e) {
        tfgs::io::write_history(out_path(o, "history.csv"), e.history);
        throw;
    } catch (const tfgs::CollapseError& e) {
        tfgs::io::write_history(out_path(o, "history.csv"), e.history);
        throw;
    }
}

// --- potential ---------------------------------------------------------------

tfgs::KernelMethod method_from_string(const std::string& s) {
    if (s == "automatic" || s == "auto") return tfgs::KernelMethod::automatic;
    if (s == "hypergeom-N") return tfgs::KernelMethod::hypergeom_N;
    if (s == "closed-3d") return tfgs::KernelMethod::closed_3d;
    if (s == "closed-1d") return tfgs::KernelMethod::closed_1d;
    throw tfgs::ConfigError("unknown kernel method '" + s + "'");
}

int cmd_potential(const Options& o) {
    tfgs::io::ProfileMeta meta;
    auto rho = tfgs::io::read_profile(o.profile, &meta, o.N);
    tfgs::Params P = params_of(o);
    P.N = rho.N();
    if (!(P.alpha > 0 && P.alpha < P.N)) throw tfgs::ConfigError("potential needs 0 < alpha < N");
    auto method = tfgs::resolve_method(P.N, method_from_string(o.method));
    auto field = tfgs::potential(rho, P, method);
    std::string path = out_path(o, "potential.csv");
    tfgs::io::write_field(path, field);
    std::printf("method %s\nwrote %s\n", tfgs::to_string(field.method).c_str(), path.c_str());
    return kExitOk;
}

// --- verify ------------------------------------------------------------------

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
    std::string note;
};

int cmd_verify(const Options& o) {
    tfgs::io::ProfileMeta meta;
    auto u = tfgs::io::read_profile(o.profile, &meta, o.N);
    tfgs::Params P = meta.has_params ? meta.params : params_of(o);
    P.N = u.N();
    tfgs::validate(P);

    std::vector<Check> checks;
    auto add = [&](std::string name, double v, double tol, bool pass, std::string note = "") {
        checks.push_back({std::move(name), v, tol, pass, std::move(note)});
    };

    auto F = tfgs::evaluate_all(u, P);
    auto res = tfgs::tf_residual(u, P);
    auto rep = tfgs::build_report(u, P, F, res);
    add("tf_residual", res.linf, o.residual_tol, res.linf <= o.residual_tol);
    add("nehari", F.nehari_rel(), o.tol, F.nehari_rel() <= o.tol);
    add("pohozaev", F.pohozaev_rel(), o.tol, F.pohozaev_rel() <= o.tol);
    double ratio = std::abs(rep.sigma.ratio_check - 1);
    add("norm_ratio", ratio, o.tol, ratio <= o.tol);
    add("sigma_relation", rep.sigma.gap(), o.sigma_tol, rep.sigma.gap() <= o.sigma_tol);
    bool cls = rep.classification == tfgs::expected_classification(P);
    add("classification", cls ? 0.0 : 1.0, 0.0, cls,
        tfgs::to_string(rep.classification) + " (expected " + tfgs::to_string(tfgs::expected_classification(P)) + ")");
    if (P.p < 2) {
        if (!u.tail().algebraic()) {
            add("tail_model", NAN, 0.0, false, "missing algebraic tail model for p < 2");
        } else {
            auto d = tfgs::decay_report(u, P);
            add("decay_exponent", d.exponent_gap, 0.02, d.exponent_gap <= 0.02,
                "fit " + num(d.exponent_fit) + " expected " + num(d.exponent_expected));
        }
    } else if (P.p > 2) {
        double ls = tfgs::lambda_star(P);
        double h = rep.jump_lambda.value_or(0.0);
        add("jump_lower_bound", h, ls * (1 - 1e-3), h >= ls * (1 - 1e-3), "lambda_star " + num(ls));
    }

    bool all = true;
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        ordered_json e{{"name", c.name}, {"value", jnum(c.value)}, {"tolerance", c.tolerance}, {"pass", c.pass}};
        if (!c.note.empty()) e["note"] = c.note;
        arr.push_back(e);
    }
    ordered_json j{{"input", o.profile}, {"pass", all}, {"checks", arr}};
    auto cfg = run_config("verify", o);
    cfg["params"] = {{"N", P.N}, {"alpha", P.alpha}, {"p", P.p}, {"q", P.q}};
    j["config"] = cfg;
    std::string text = dump17(j);
    std::cout << text;
    if (o.out != ".") tfgs::io::write_text(out_path(o, "verify.json"), text);
    return all ? kExitOk : kExitNotConverged;
}

// --- sweep -------------------------------------------------------------------

using Trends = std::vector<std::pair<std::string, bool>>;

bool trend(const std::vector<double>& v, int dir) { return tfgs::strictly_monotone(v, dir); }

// Prints the CSV and trend lines, and writes sweep.csv plus sweep.json with the run configuration.
void emit_sweep(const Options& o, const std::string& csv, const Trends& trends) {
    tfgs::io::write_text(out_path(o, "sweep.csv"), csv);
    std::cout << csv;
    ordered_json t = ordered_json::object();
    for (const auto& [name, ok] : trends) {
        std::printf("trend %s: %s\n", name.c_str(), ok ? "PASS" : "FAIL");
        t[name] = ok;
    }
    ordered_json j{{"csv", out_path(o, "sweep.csv")}, {"trends", t}, {"config", run_config("sweep", o)}};
    j["config"]["sweep"] = {{"alpha_grid", o.alpha_grid}, {"eps_grid", o.eps_grid}, {"eps_weights", o.eps_weights}};
    tfgs::io::write_text(out_path(o, "sweep.json"), dump17(j));
}

int sweep_alpha(const Options& o, const tfgs::FlowConfig& cfg) {
    auto base = params_of(o);
    for (double a : o.alpha_grid) {
        auto Q = base;
        Q.alpha = a;
        tfgs::validate(Q);
    }
    auto recs = tfgs::alpha_sweep(cfg, base, o.alpha_grid, o.jobs);
    std::ostringstream csv;
    csv << "alpha,C_est,hls_C,riesz_A,R_star,jump,lambda_star,jump_gap,sigma_star,converged,nehari_rel,pohozaev_rel,"
           "residual\n";
    bool conv = true, below = true;
    std::vector<double> R, c1, cA;
    for (const auto& r : recs) {
        const auto& Q = r.report.params;
        conv = conv && r.report.converged;
        double C = tfgs::hls_constant(Q);
        double ls = Q.p > 2 ? tfgs::lambda_star(Q) : NAN;
        double h = r.report.jump_lambda.value_or(NAN);
        below = below && r.C_est <= C;
        R.push_back(r.R_star);
        c1.push_back(std::abs(r.C_est - 1));
        cA.push_back(std::abs(r.C_est / tfgs::riesz_constant(Q) - 1));
        csv << num(r.value) << ',' << num(r.C_est) << ',' << num(C) << ',' << num(tfgs::riesz_constant(Q)) << ','
            << num(r.R_star) << ',' << num(h) << ',' << num(ls) << ',' << num(h - ls) << ',' << num(r.sigma_star_est)
            << ',' << (r.report.converged ? 1 : 0) << ',' << num(r.report.functionals.nehari_rel()) << ','
            << num(r.report.functionals.pohozaev_rel()) << ',' << num(r.report.residual_linf) << '\n';
    }
    Trends trends{{"C_est <= hls_C", below}};
    if (tfgs::strictly_monotone(o.alpha_grid, +1)) {
        if (o.p > 2) trends.push_back({"R_star decreasing in alpha", trend(R, -1)});
        if (recs.size() >= 3) {
            std::vector<double> lo(c1.begin(), c1.begin() + 3), hi(cA.end() - 3, cA.end());
            trends.push_back({"|C_est-1| decreasing as alpha decreases (three smallest)", trend(lo, +1)});
            trends.push_back({"|C_est/A-1| decreasing as alpha increases (three largest)", trend(hi, -1)});
        }
    }
    emit_sweep(o, csv.str(), trends);
    return conv ? kExitOk : kExitNotConverged;
}

int sweep_eps(const Options& o, const tfgs::FlowConfig& cfg) {
    auto P = params_of(o);
    tfgs::validate(P);
    tfgs::SolveResult ref;
    std::vector<tfgs::SweepRow> rows = o.eps_weights.empty()
                                           ? tfgs::epsilon_sweep(cfg, P, o.eps_grid, &ref, o.jobs)
                                           : tfgs::epsilon_sweep_weights(cfg, P, o.eps_weights, &ref, o.jobs);
    std::ostringstream csv;
    csv << "eps,weight,sigma_eps,sigma_star,grad_term,l2_dist,converged,nehari_rel,pohozaev_eps_rel\n";
    bool conv = ref.report.converged, above = true;
    std::vector<double> s, g, d;
    double sstar = ref.report.sigma_star_est;
    for (const auto& r : rows) {
        conv = conv && r.converged;
        s.push_back(r.sigma_eps);
        g.push_back(r.grad_term);
        d.push_back(r.l2_dist);
        above = above && r.sigma_eps > sstar;
        csv << num(r.eps) << ',' << num(r.weight) << ',' << num(r.sigma_eps) << ',' << num(sstar) << ','
            << num(r.grad_term) << ',' << num(r.l2_dist) << ',' << (r.converged ? 1 : 0) << ','
            << num(r.report.functionals.nehari_rel()) << ',' << num(r.report.functionals.pohozaev_eps_rel()) << '\n';
    }
    emit_sweep(o, csv.str(),
               {{"sigma_eps decreasing", trend(s, -1)},
                {"sigma_eps > sigma_star", above},
                {"grad term decreasing", trend(g, -1)},
                {"L2 distance decreasing", trend(d, -1)}});
    return conv ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Options& o) {
    int given = !o.alpha_grid.empty() + !o.eps_grid.empty() + !o.eps_weights.empty();
    if (given != 1) throw tfgs::ConfigError("sweep needs exactly one of --alpha-grid, --eps-grid, --eps-weights");
    auto cfg = flow_of(o);
    return o.alpha_grid.empty() ? sweep_eps(o, cfg) : sweep_alpha(o, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Radial ground states of the Thomas-Fermi integral equation u + u^{q-1} = (I_a * u^p) u^{p-1}"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Key-value config file; command-line flags override it");

    app.add_option("--N", o.N, "Dimension");
    app.add_option("--alpha", o.alpha, "Riesz order, 0 < alpha < N");
    app.add_option("--p", o.p, "Interaction exponent");
    app.add_option("--q", o.q, "Local exponent");
    app.add_option("--L", o.L, "Domain length (0: default for the regime)");
    app.add_option("--M", o.M, "Grid panels");
    app.add_option("--clustering", o.clustering, "uniform | boundary | origin_boundary");
    app.add_option("--dt0", o.dt0, "Initial pseudo-time step");
    app.add_option("--rtol", o.rtol, "Relative change bound per step");
    app.add_option("--stall-tol", o.stall_tol, "Stationarity threshold");
    app.add_option("--max-steps", o.max_steps, "Step budget per flow run");
    app.add_option("--init", o.init, "gaussian | ansatz | ball | file");
    app.add_option("--init-file", o.init_file, "Profile CSV for --init file");
    app.add_option("--init-width", o.init_width, "Width of the initial profile");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--jobs", o.jobs, "Sweep entries run in parallel (disables warm start)")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Seed recorded in the run configuration");
    app.add_flag("--verbose", o.verbose, "Progress on stderr");

    auto* constants = app.add_subcommand("constants", "Named constants for (N, alpha, p, q)");
    constants->add_flag("--json", o.json, "JSON output");

    auto* solve = app.add_subcommand("solve", "Ground state by the normalized flow");

    auto* potential = app.add_subcommand("potential", "Riesz potential of a radial profile");
    potential->add_option("--profile", o.profile, "CSV r,u")->required();
    potential->add_option("--method", o.method, "automatic | hypergeom-N | closed-3d | closed-1d");

    auto* verify = app.add_subcommand("verify", "Invariant suite on a profile");
    verify->add_option("--profile", o.profile, "CSV r,u (sidecar JSON supplies the parameters)")->required();
    verify->add_option("--tol", o.tol, "Identity tolerance (relative)");
    verify->add_option("--residual-tol", o.residual_tol, "Pointwise equation residual tolerance");
    verify->add_option("--sigma-tol", o.sigma_tol, "Tolerance of the two energy representations");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep with trend summary");
    sweep->add_option("--alpha-grid", o.alpha_grid, "Comma-separated alpha values")->delimiter(',');
    sweep->add_option("--eps-grid", o.eps_grid, "Comma-separated eps values")->delimiter(',');
    sweep->add_option("--eps-weights", o.eps_weights, "Comma-separated values of eps^nu")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (auto* c = app.get_config_ptr(); c && c->count()) o.config_file = c->as<std::string>();

    try {
        if (*constants) return cmd_constants(o);
        if (*solve) return cmd_solve(o);
        if (*potential) return cmd_potential(o);
        if (*verify) return cmd_verify(o);
        if (*sweep) return cmd_sweep(o);
    } catch (const tfgs::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const tfgs::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const tfgs::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const tfgs::InvariantError& e) {
        std::fprintf(stderr, "invariant broken: %s\n", e.what());
        return kExitDegenerate;
    } catch (const tfgs::DegenerateError& e) {
        std::fprintf(stderr, "degenerate: %s\n", e.what());
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitConfig;
}
