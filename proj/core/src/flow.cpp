#include "tfgs/flow.hpp"

#include "tfgs/analysis.hpp"
#include "tfgs/errors.hpp"
#include "tfgs/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

namespace tfgs {

namespace {

// Largest explicit factor (1 - e^{-dt}) times the local stiffness.
constexpr double kStabilityCap = 1.5;
// Values below this fraction of max u are flushed to zero when p >= 2.
constexpr double kFlushFrac = 1e-30;
constexpr double kMonotoneTol = 1e-8;
// Stage-B state counts as having lost its support edge below this ratio u(L)/u(0).
constexpr double kEdgeLost = 1e-3;

double tail_exponent(const Params& P) {
    return (P.N - P.alpha) / (2.0 - P.p);
}

double max_value(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// Integral over R^N of nodal data shaped like u (same support, edge rule and tail).
double integrate_like(const RadialFunction& u, const std::vector<double>& nodal) {
    std::vector<double> c;
    panel_samples(u.grid(), nodal, u.support_end(), u.tail().algebraic(), u.edge(), c);
    const std::vector<double>& m = u.grid().measure(u.N());
    double acc = 0;
    for (size_t i = 0; i < c.size(); ++i) acc += m[i] * c[i];
    return sphere_area(u.N()) * acc;
}

void scale_interaction(SelfInteraction& si, double c, double p) {
    double cp = std::pow(c, p);
    for (double& v : si.field.values) v *= cp;
    for (double& v : si.field.tail_values) v *= cp;
    si.rho = si.rho.scaled(cp);
    si.mass *= cp;
    si.d_alpha *= cp * cp;
}

// Three-point radial Laplacian: symmetric origin row, Neumann end row.
struct Tridiag {
    std::vector<double> lo, di, up;
};

Tridiag fd_laplacian(const RadialGrid& g, int N) {
    const auto& r = g.nodes();
    const int M = g.M();
    Tridiag L{std::vector<double>(M + 1, 0.0), std::vector<double>(M + 1, 0.0), std::vector<double>(M + 1, 0.0)};
    double c0 = 2.0 * N / (r[1] * r[1]);
    L.di[0] = -c0;
    L.up[0] = c0;
    for (int i = 1; i < M; ++i) {
        double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
        double f = (N - 1) / r[i];
        L.lo[i] = 2.0 / (h0 * (h0 + h1)) + f * (-h1 / (h0 * (h0 + h1)));
        L.di[i] = -2.0 / (h0 * h1) + f * ((h1 - h0) / (h0 * h1));
        L.up[i] = 2.0 / (h1 * (h0 + h1)) + f * (h0 / (h1 * (h0 + h1)));
    }
    double hM = r[M] - r[M - 1];
    L.lo[M] = 2.0 / (hM * hM);
    L.di[M] = -2.0 / (hM * hM);
    return L;
}

std::vector<double> tridiag_apply(const Tridiag& L, const std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        double acc = L.di[i] * x[i];
        if (i > 0) acc += L.lo[i] * x[i - 1];
        if (i + 1 < n) acc += L.up[i] * x[i + 1];
        y[i] = acc;
    }
    return y;
}

// Thomas algorithm for (1 - k Lap) x = rhs.
void implicit_diffusion(const Tridiag& L, double k, std::vector<double>& x) {
    const size_t n = x.size();
    std::vector<double> di(n), up(n);
    for (size_t i = 0; i < n; ++i) {
        di[i] = 1 - k * L.di[i];
        up[i] = -k * L.up[i];
    }
    for (size_t i = 1; i < n; ++i) {
        double w = -k * L.lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        x[i] -= w * x[i - 1];
    }
    x[n - 1] /= di[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = (x[i] - up[i] * x[i + 1]) / di[i];
}

struct LambdaParts {
    double num = 0, den = 0, diff = 0;  // diff: int I u^{p-1} Lap u
};

LambdaParts lambda_parts(const RadialFunction& u, const Params& P, const SelfInteraction& si,
                         const std::vector<double>* lap) {
    const auto& v = u.values();
    const auto& I = si.field.values;
    const double p = P.p, q = P.q;
    std::vector<double> a(v.size(), 0.0), b(v.size(), 0.0), c;
    if (lap) c.assign(v.size(), 0.0);
    for (size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0)) continue;
        double up = std::pow(v[i], p - 1);
        a[i] = I[i] * up * (v[i] + std::pow(v[i], q - 1));
        b[i] = I[i] * I[i] * up * up;
        if (lap) c[i] = I[i] * up * (*lap)[i];
    }
    LambdaParts out;
    out.num = integrate_like(u, a);
    out.den = integrate_like(u, b);
    if (lap) out.diff = integrate_like(u, c);
    if (u.tail().algebraic() && !si.field.tail_r.empty()) {
        const int N = P.N;
        double tn = 0, td = 0;
        for (size_t k = 0; k < si.field.tail_r.size(); ++k) {
            double r = si.field.tail_r[k];
            double ut = u.tail()(r), It = si.field.tail_values[k];
            double up = std::pow(ut, p - 1);
            double w = si.field.tail_w[k] * std::pow(r, N - 1);
            tn += w * It * up * (ut + std::pow(ut, q - 1));
            td += w * It * It * up * up;
        }
        out.num += sphere_area(N) * tn;
        out.den += sphere_area(N) * td;
    }
    if (!(out.den > 0)) throw DegenerateError("lambda_multiplier: zero denominator");
    return out;
}

// lambda with the diffusion weight eps lambda^{-2/alpha}: root of lambda - A + eps B lambda^{-2/alpha}.
double lambda_with_diffusion(const LambdaParts& lp, double eps_weight, double alpha) {
    double A = lp.num / lp.den, B = -lp.diff / lp.den;
    if (eps_weight == 0 || B == 0) return A;
    double x = A, e = -2.0 / alpha;
    for (int it = 0; it < 60; ++it) {
        double g = x - A - eps_weight * B * std::pow(x, e);
        double dg = 1 - eps_weight * B * e * std::pow(x, e - 1);
        double nx = x - g / dg;
        if (!(nx > 0)) nx = 0.5 * x;
        if (std::abs(nx - x) <= 1e-15 * x) return nx;
        x = nx;
    }
    return x;
}

void flush_small(std::vector<double>& v, const Params& P) {
    if (P.p < 2) return;
    double cut = kFlushFrac * max_value(v);
    for (double& x : v)
        if (x < cut) x = 0.0;
}

void make_monotone(std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i) v[i] = std::min(v[i], v[i - 1]);
}

GridPtr default_grid(const FlowConfig& cfg, const Params& P) {
    double L = cfg.grid.L > 0 ? cfg.grid.L : (P.p < 2 ? 50.0 : 8.0);
    return make_grid(L, cfg.grid.M, cfg.grid.clustering.value_or(Clustering::uniform), cfg.grid.order);
}

void checkpoint(const FlowState& s, const FlowConfig& cfg, const Params& P) {
    if (cfg.checkpoint_every <= 0 || cfg.checkpoint_dir.empty()) return;
    if (s.steps % cfg.checkpoint_every != 0) return;
    std::filesystem::create_directories(cfg.checkpoint_dir);
    char name[64];
    std::snprintf(name, sizeof name, "checkpoint_s%d_%08ld.csv", s.stage, s.steps);
    io::ProfileMeta meta;
    meta.params = P;
    meta.has_params = true;
    meta.scalars = {{"lambda", s.lambda_t},          {"time", s.time},
                    {"d_alpha_target", s.d_alpha_target}, {"eps_weight", s.eps_weight},
                    {"steps", double(s.steps)},       {"clip_events", double(s.clip_events)}};
    io::write_profile((std::filesystem::path(cfg.checkpoint_dir) / name).string(), s.u, meta);
}

// Multiplier of the current state; fills the three-point Laplacian when diffusion is on.
double state_lambda(double eps_weight, const RadialFunction& u, const Params& P, const SelfInteraction& si,
                    std::vector<double>& lap) {
    if (eps_weight == 0) {
        lap.clear();
        LambdaParts lp = lambda_parts(u, P, si, nullptr);
        return lp.num / lp.den;
    }
    lap = tridiag_apply(fd_laplacian(u.grid(), P.N), u.values());
    return lambda_with_diffusion(lambda_parts(u, P, si, &lap), eps_weight, P.alpha);
}

}  // namespace

std::string to_string(InitKind k) {
    switch (k) {
        case InitKind::gaussian: return "gaussian";
        case InitKind::explicit_family_ansatz: return "explicit-family-ansatz";
        case InitKind::ball_indicator: return "ball-indicator";
        case InitKind::file: return "file";
    }
    return "gaussian";
}

InitKind init_from_string(const std::string& s) {
    if (s == "gaussian") return InitKind::gaussian;
    if (s == "explicit-family-ansatz" || s == "ansatz") return InitKind::explicit_family_ansatz;
    if (s == "ball-indicator" || s == "ball") return InitKind::ball_indicator;
    if (s == "file") return InitKind::file;
    throw ConfigError("unknown init '" + s + "'");
}

void validate(const FlowConfig& c) {
    auto pos = [](double x, const char* name) {
        if (!(x > 0)) throw ConfigError(std::string("flow config: ") + name + " must be positive");
    };
    pos(c.dt0, "dt0");
    pos(c.dt_max, "dt_max");
    pos(c.rtol_step, "rtol_step");
    pos(c.stall_tol, "stall_tol");
    pos(double(c.max_steps), "max_steps");
    pos(double(c.renorm_every), "renorm_every");
    pos(c.init_width, "init_width");
    if (!(c.stall_tol < 1)) throw ConfigError("flow config: stall_tol must be < 1");
    if (c.grid.L < 0) throw ConfigError("grid length L must be positive");
    if (c.grid.M < 32) throw ConfigError("grid needs M >= 32 panels");
    if (c.init == InitKind::file && c.init_file.empty()) throw ConfigError("init=file needs an input profile");
}

void attach_tail(RadialFunction& u, const Params& P) {
    if (P.p >= 2) return;
    double beta = tail_exponent(P);
    double L = u.grid().L();
    u.mutable_tail() = TailModel::power(beta, u.values().back() * std::pow(L, beta));
}

double lambda_multiplier(const RadialFunction& u, const Params& P) {
    return lambda_multiplier(u, P, self_interaction(u, P));
}

double lambda_multiplier(const RadialFunction& u, const Params& P, const SelfInteraction& si) {
    LambdaParts lp = lambda_parts(u, P, si, nullptr);
    return lp.num / lp.den;
}

RadialFunction initial_profile(const FlowConfig& cfg, const Params& P, const GridPtr& grid) {
    validate(P);
    const int M = grid->M();
    const double w = cfg.init_width;
    std::vector<double> v(M + 1);
    EdgeRule edge = P.p == 2 ? EdgeRule::continuous : EdgeRule::jump;
    if (cfg.init == InitKind::file) {
        io::ProfileMeta meta;
        RadialFunction src = io::read_profile(cfg.init_file, &meta, P.N);
        if (src.N() != P.N) throw ConfigError("init profile dimension differs from N");
        for (int i = 0; i <= M; ++i) v[i] = std::max(0.0, src.eval(grid->node(i)));
    } else {
        for (int i = 0; i <= M; ++i) {
            double x = grid->node(i) / w;
            switch (cfg.init) {
                case InitKind::gaussian: v[i] = std::exp(-x * x); break;
                case InitKind::explicit_family_ansatz: v[i] = std::pow(1 + x * x, -0.5 * (P.N + 1)); break;
                default: v[i] = x <= 1 ? 1.0 : 0.0; break;
            }
        }
    }
    if (P.p < 2) {
        // full support is required for p < 2: lift zeros onto an algebraic profile
        double beta = tail_exponent(P);
        for (int i = 0; i <= M; ++i) {
            double floor = 1e-3 * std::min(1.0, std::pow(std::max(grid->node(i), w) / w, -beta));
            v[i] = std::max(v[i], floor);
        }
    }
    make_monotone(v);
    if (!(max_value(v) > 0)) throw DegenerateError("initial profile is identically zero");
    RadialFunction u(grid, std::move(v), P.N, {}, edge);
    attach_tail(u, P);
    double D = self_interaction(u, P).d_alpha;
    if (!(D > 0)) throw DegenerateError("initial profile has zero interaction energy");
    return u.scaled(std::pow(D, -1.0 / (2 * P.p)));
}

FlowState make_state(RadialFunction u, const Params& P, double eps_weight) {
    FlowState s;
    if (eps_weight > 0) {
        u.mutable_tail() = TailModel{};
    } else {
        attach_tail(u, P);
    }
    s.u = std::move(u);
    s.eps_weight = eps_weight;
    s.d_alpha_target = self_interaction(s.u, P).d_alpha;
    if (!(s.d_alpha_target > 0)) throw DegenerateError("state has zero interaction energy");
    return s;
}

StepInfo step(FlowState& s, const FlowConfig& cfg, const Params& P) {
    const double p = P.p, q = P.q;
    RadialFunction& u = s.u;
    SelfInteraction si = self_interaction(u, P);
    double D = si.d_alpha;
    if (!(D > 0) || !std::isfinite(D)) throw CollapseError("flow collapsed: interaction energy vanished", s.history);
    double drift = std::abs(D - s.d_alpha_target) / s.d_alpha_target;
    if (cfg.renorm_every > 0 && s.steps % cfg.renorm_every == 0) {
        double c = std::pow(s.d_alpha_target / D, 1.0 / (2 * p));
        u = u.scaled(c);
        scale_interaction(si, c, p);
    }
    std::vector<double> lap;
    double lambda = state_lambda(s.eps_weight, u, P, si, lap);
    if (!(lambda > 0) || !std::isfinite(lambda)) throw CollapseError("flow collapsed: lambda not positive", s.history);
    s.lambda_t = lambda;
    double rq = 0;
    {
        double n2 = lp_norm_pow(u, 2), nq = lp_norm_pow(u, q), th = theta(P);
        rq = si.d_alpha / (std::pow(n2, p * th) * std::pow(nq, 2 * p * (1 - th) / q));
    }

    const auto& v = u.values();
    const auto& I = si.field.values;
    const int M = u.grid().M();
    std::vector<double> force(M + 1, 0.0);
    double umax = max_value(v), stiff = 0, gap = 0;
    double w = s.eps_weight > 0 ? s.eps_weight * std::pow(lambda, -2.0 / P.alpha) : 0.0;
    for (int i = 0; i <= M; ++i) {
        if (!(v[i] > 0)) continue;
        force[i] = lambda * I[i] * std::pow(v[i], p - 1) - std::pow(v[i], q - 1);
        stiff = std::max(stiff, 2 - p + (q - p) * std::pow(v[i], q - 2));
        double rate = force[i] - v[i] + (w > 0 ? w * lap[i] : 0.0);
        gap = std::max(gap, std::abs(rate));
    }
    // dt from the relative-change bound and the local stability cap, grown geometrically
    double phi_max = 1.0;
    if (gap > 0) phi_max = std::min(phi_max, cfg.rtol_step * umax / gap);
    if (stiff > 0) phi_max = std::min(phi_max, kStabilityCap / stiff);
    double dt = std::min({cfg.dt_max, s.dt * 1.25, phi_max < 1 ? -std::log1p(-phi_max) : cfg.dt_max});
    if (s.steps == 0) dt = std::min(dt, cfg.dt0);
    if (!(dt > 1e-14)) throw CollapseError("flow stalled: time step underflow", s.history);
    double e = std::exp(-dt), phi = -std::expm1(-dt);

    std::vector<double> next(M + 1);
    for (int i = 0; i <= M; ++i) next[i] = e * v[i] + phi * force[i];
    if (w > 0) implicit_diffusion(fd_laplacian(u.grid(), P.N), phi * w, next);
    StepInfo info;
    for (double& x : next) {
        if (x < 0) {
            x = 0;
            info.clipped = true;
        }
    }
    flush_small(next, P);
    double du = 0;
    for (int i = 0; i <= M; ++i) du = std::max(du, std::abs(next[i] - v[i]));
    info.residual = du / (dt * umax);
    if (info.clipped) {
        ++s.clip_events;
        s.clip_steps.push_back(s.steps);
    }
    if (cfg.check_monotone) {
        double tol = kMonotoneTol * next[0];
        for (int i = 0; i < M; ++i) {
            if (next[i + 1] - next[i] > tol) {
                char msg[160];
                std::snprintf(msg, sizeof msg, "flow lost radial monotonicity at r=%.6g (step %ld)",
                              u.grid().node(i + 1), s.steps);
                throw InvariantError(msg, s.history);
            }
        }
    }
    u.mutable_values() = std::move(next);
    if (s.eps_weight == 0) attach_tail(u, P);
    s.time += dt;
    s.dt = dt;
    ++s.steps;
    HistoryEntry h;
    h.step = s.steps;
    h.time = s.time;
    h.dt = dt;
    h.lambda = lambda;
    h.residual = info.residual;
    h.drift = drift;
    h.rayleigh = rq;
    h.stage = s.stage;
    s.history.push_back(h);
    checkpoint(s, cfg, P);
    return info;
}

bool run(FlowState& s, const FlowConfig& cfg, const Params& P, long max_steps) {
    if (s.steps == 0 || s.dt <= 0) s.dt = cfg.dt0;
    for (long k = 0; k < max_steps; ++k) {
        StepInfo info = step(s, cfg, P);
        if (cfg.verbose && s.steps % 100 == 0)
            std::fprintf(stderr, "stage %d step %ld t=%.4g dt=%.3g lambda=%.12g res=%.3e\n", s.stage, s.steps,
                         s.time, s.dt, s.lambda_t, info.residual);
        if (info.residual < cfg.stall_tol && !info.clipped) return true;
    }
    return false;
}

namespace {

struct Normalized {
    RadialFunction v;
    Functionals F;
    TFResidual res;
};

// Normalizes a (near) stationary state: v(x) = u(lambda^{-1/alpha} x), functionals by scaling.
Normalized normalize_state(const FlowState& s, const Params& P) {
    SelfInteraction si = self_interaction(s.u, P);
    // the lambda-weighted residual of u equals the TF residual of v at the mapped nodes
    std::vector<double> lap;
    double lambda = state_lambda(s.eps_weight, s.u, P, si, lap);
    double w = s.eps_weight > 0 ? s.eps_weight * std::pow(lambda, -2.0 / P.alpha) : 0.0;
    Functionals Fu = evaluate_all(s.u, P, w, si);
    double b = std::pow(lambda, 1.0 / P.alpha);
    Normalized n;
    n.v = normalize_flow_stationary(s.u, lambda, P);
    n.F = dilate(Fu, b, P, s.eps_weight);
    // the lambda factor on D is absorbed by the dilation
    TFResidual res;
    const auto& v = s.u.values();
    double umax = max_value(v);
    const auto& r = s.u.grid().nodes();
    const int M = s.u.grid().M();
    double sw = 0, s2 = 0;
    for (int i = 0; i <= M; ++i) {
        if (!(v[i] > kSupportThreshold * umax)) continue;
        double e = v[i] + std::pow(v[i], P.q - 1) - lambda * si.field.values[i] * std::pow(v[i], P.p - 1);
        if (w > 0) e -= w * lap[i];
        double h = 0.5 * (r[std::min(i + 1, M)] - r[std::max(i - 1, 0)]);
        double wt = h * std::pow(std::max(r[i], 0.5 * r[1]), P.N - 1);
        res.linf = std::max(res.linf, std::abs(e));
        s2 += wt * e * e;
        sw += wt;
        ++res.points;
    }
    if (umax > 0) {
        res.linf /= umax;
        res.l2 = sw > 0 ? std::sqrt(s2 / sw) / umax : 0.0;
    }
    n.res = res;
    return n;
}

void finish_report(GroundStateReport& rep, const FlowState& s, bool converged, const FlowConfig& cfg, long run_start) {
    rep.lambda_inf = s.lambda_t;
    rep.converged = converged;
    rep.steps = s.steps;
    rep.pseudo_time = s.time;
    rep.clip_events = s.clip_events;
    long half = run_start + (s.steps - run_start) / 2;
    rep.late_clip_events = std::count_if(s.clip_steps.begin(), s.clip_steps.end(), [&](long k) { return k >= half; });
    rep.init = to_string(cfg.init);
}

SolveResult finalize(const FlowState& s, const Params& P, bool converged, const FlowConfig& cfg, long run_start) {
    Normalized n = normalize_state(s, P);
    SolveResult out;
    out.u = n.v;
    out.report = build_report(n.v, P, n.F, n.res);
    finish_report(out.report, s, converged, cfg, run_start);
    out.history = s.history;
    out.d_alpha_target = s.d_alpha_target;
    return out;
}

// Relative Pohozaev residual of the normalized state, from the unnormalized one.
double pohozaev_of_normalized(const FlowState& s, const Params& P) {
    SelfInteraction si = self_interaction(s.u, P);
    double lambda = lambda_multiplier(s.u, P, si);
    Functionals Fu = evaluate_all(s.u, P, 0.0, si);
    Functionals Fv = dilate(Fu, std::pow(lambda, 1.0 / P.alpha), P, 0.0);
    return Fv.pohozaev_P / (P.N * Fv.energy_E);
}

// Zeroes the values beyond node k (sub-threshold dust outside the support).
RadialFunction cut_support(const RadialFunction& u, int k) {
    std::vector<double> v = u.values();
    std::fill(v.begin() + k + 1, v.end(), 0.0);
    return RadialFunction(u.grid_ptr(), std::move(v), u.N(), {}, EdgeRule::jump);
}

SolveResult solve_compact_jump(const RadialFunction& start, const FlowConfig& cfg, const Params& P) {
    // stage A: the support is selected by the flow on a domain that contains it
    RadialFunction pilot = start;
    FlowState a;
    SupportInfo sup;
    for (int attempt = 0;; ++attempt) {
        a = make_state(pilot, P, 0.0);
        a.stage = 1;
        run(a, cfg, P, cfg.max_steps);
        sup = extract_support(a.u);
        if (sup.radius && sup.index < a.u.grid().M() - 2) break;
        if (attempt >= 3) throw ConfigError("support reaches the domain edge; increase L");
        // support reaches the edge: double the domain
        auto g = make_grid(2 * pilot.grid().L(), pilot.grid().M(), pilot.grid().clustering(), pilot.grid().order());
        pilot = a.u.resampled(g);
    }
    // a support that is badly resolved on the pilot domain: shrink the domain and rerun
    for (int attempt = 0; attempt < 3 && sup.index < a.u.grid().M() / 4; ++attempt) {
        auto g = make_grid(1.5 * *sup.radius, a.u.grid().M(), a.u.grid().clustering(), a.u.grid().order());
        FlowState t = make_state(cut_support(a.u, sup.index).resampled(g), P, 0.0);
        t.stage = 1;
        t.history = std::move(a.history);
        t.steps = a.steps;
        t.time = a.time;
        a = std::move(t);
        run(a, cfg, P, cfg.max_steps);
        sup = extract_support(a.u);
        if (!sup.radius || sup.index >= a.u.grid().M() - 2) throw DegenerateError("pilot support lost after shrinking");
    }
    if (cfg.verbose)
        std::fprintf(stderr, "pilot support R=%.8g (node %d), lambda=%.10g\n", *sup.radius, sup.index, a.lambda_t);

    // stage B: full support on [0, R] with a clustered edge, outer iteration on the conserved energy
    double R = *sup.radius;
    RadialFunction restricted = cut_support(a.u, sup.index);
    GridPolicy gp = cfg.grid;
    auto gb = make_grid(R, gp.M, Clustering::boundary, gp.order);
    std::vector<double> vb(gb->M() + 1);
    for (int i = 0; i <= gb->M(); ++i) vb[i] = std::max(0.0, restricted.eval(std::min(gb->node(i), R)));
    make_monotone(vb);
    FlowState b = make_state(RadialFunction(gb, vb, P.N, {}, EdgeRule::jump), P, 0.0);
    b.stage = 2;
    b.history = a.history;
    b.steps = a.steps;
    b.time = a.time;

    FlowState best = b;
    bool have_best = false;
    long run_start = b.steps;
    bool converged = false;
    auto evaluate = [&](double x, bool& lost) {
        FlowState trial = have_best ? best : b;
        trial.d_alpha_target = std::exp(x);
        trial.clip_events = 0;
        trial.clip_steps.clear();
        long start_step = trial.steps;
        bool ok = run(trial, cfg, P, cfg.max_steps);
        const auto& v = trial.u.values();
        lost = !(v.back() > kEdgeLost * v.front());
        double f = lost ? 1.0 : pohozaev_of_normalized(trial, P);
        if (cfg.verbose)
            std::fprintf(stderr, "outer logD0=%.10f F=%.6e lost=%d conv=%d edge=%.6g\n", x, f, int(lost), int(ok),
                         v.back() / v.front());
        if (!lost) {
            best = trial;
            have_best = true;
            run_start = start_step;
            converged = ok;
        }
        return f;
    };
    double x0 = std::log(b.d_alpha_target);
    bool lost0 = false, lost1 = false;
    double f0 = evaluate(x0, lost0);
    // the pilot energy may not sustain the edge on the fitted domain: probe around it
    const double probes[] = {0.1, -0.1, 0.3, -0.3, 0.6, -0.6, 1.0, -1.0};
    double xc = x0;
    for (double d : probes) {
        if (!lost0) break;
        x0 = xc + d;
        f0 = evaluate(x0, lost0);
    }
    if (lost0) throw DegenerateError("compact state lost its support edge near the pilot energy");
    double x1 = x0 + (f0 > 0 ? 0.2 : -0.2);
    double f1 = evaluate(x1, lost1);
    double xa = x0, fa = f0, xb = x1, fb = f1;
    bool bracket = fa * fb < 0;
    int side = 0;
    for (int it = 0; it < cfg.max_outer && std::abs(fb) > cfg.pohozaev_tol; ++it) {
        double xn;
        if (!bracket) {
            double slope = (fb - fa) / (xb - xa);
            xn = slope != 0 ? xb - fb / slope : xb + 0.2;
            double stepmax = 1.0;
            xn = std::clamp(xn, xb - stepmax, xb + stepmax);
        } else {
            xn = (xa * fb - xb * fa) / (fb - fa);
        }
        bool lost = false;
        double fn = evaluate(xn, lost);
        if (!bracket) {
            xa = xb;
            fa = fb;
            xb = xn;
            fb = fn;
            bracket = fa * fb < 0;
        } else if (fn * fb < 0) {
            xa = xb;
            fa = fb;
            xb = xn;
            fb = fn;
            side = 0;
        } else {
            // Illinois modification keeps the retained end from stalling
            xb = xn;
            fb = fn;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    if (!have_best) throw DegenerateError("compact state lost its support edge");
    bool pohozaev_ok = std::abs(pohozaev_of_normalized(best, P)) <= std::max(cfg.pohozaev_tol, 1e-6);
    return finalize(best, P, converged && pohozaev_ok, cfg, run_start);
}

}  // namespace

SolveResult solve(const FlowConfig& cfg, const Params& P, double eps_weight) {
    validate(P);
    validate(cfg);
    GridPtr g = default_grid(cfg, P);
    return solve_from(initial_profile(cfg, P, g), cfg, P, eps_weight);
}

SolveResult solve_from(const RadialFunction& start, const FlowConfig& cfg, const Params& P, double eps_weight) {
    validate(P);
    validate(cfg);
    if (eps_weight < 0) throw ConfigError("eps weight must be nonnegative");
    if (start.N() != P.N) throw ConfigError("start profile dimension differs from N");
    if (eps_weight > 0) {
        FlowState s = make_state(start, P, eps_weight);
        bool ok = run(s, cfg, P, cfg.max_steps);
        return finalize(s, P, ok, cfg, 0);
    }
    if (P.p > 2) return solve_compact_jump(start, cfg, P);
    FlowState s = make_state(start, P, 0.0);
    s.stage = 1;
    bool ok = run(s, cfg, P, cfg.max_steps);
    long run_start = 0;
    if (P.p < 2) {
        // re-centre so that the stationary multiplier is 1 and the grid needs no dilation
        for (int k = 0; k < cfg.max_recenter && ok && std::abs(s.lambda_t - 1) > cfg.recenter_tol; ++k) {
            double lambda = lambda_multiplier(s.u, P);
            RadialFunction v = normalize_flow_stationary(s.u, lambda, P);
            RadialFunction w = v.resampled(s.u.grid_ptr());
            FlowState t = make_state(w, P, 0.0);
            t.stage = s.stage + 1;
            t.history = std::move(s.history);
            t.steps = s.steps;
            t.time = s.time;
            t.dt = s.dt;
            run_start = t.steps;
            s = std::move(t);
            ok = run(s, cfg, P, cfg.max_steps);
        }
    }
    return finalize(s, P, ok, cfg, run_start);
}

int tf_limit_regime(const Params& P) {
    const double N = P.N, a = P.alpha, p = P.p, q = P.q;
    double pmax = P.N > 2 ? (N + a) / (N - 2) : INFINITY;
    double qsplit = 2 * (2 * p + a) / (2 + a);
    if (p > (N + a) / N && p < pmax) {
        if (q > qsplit) return 1;
        if (q < qsplit && q > 2 * N * p / (N + a)) return 2;
        return 0;
    }
    if (p > pmax && q > 2 * N * p / (N + a)) return 1;
    return 0;
}

std::vector<SweepRow> epsilon_sweep_weights(const FlowConfig& cfg, const Params& P, const std::vector<double>& weights,
                                            SolveResult* reference, int jobs) {
    validate(P);
    if (weights.empty()) throw ConfigError("epsilon sweep needs at least one entry");
    for (size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0)) throw ConfigError("epsilon sweep weights must be nonnegative");
        if (i > 0 && !(weights[i] < weights[i - 1]))
            throw ConfigError("epsilon sweep weights eps^nu must be strictly decreasing");
    }
    SolveResult ref = solve(cfg, P, 0.0);
    if (reference) *reference = ref;
    // the diffusive states need room beyond the compact support and no algebraic tail
    double L = ref.report.support_radius ? 2.0 * *ref.report.support_radius : ref.u.grid().L();
    auto g = make_grid(L, std::max(cfg.grid.M, 1024), Clustering::uniform, cfg.grid.order);
    auto fresh = [&](const RadialFunction& from) {
        RadialFunction w = from.resampled(g);
        w.mutable_tail() = TailModel{};
        return w;
    };
    std::vector<SweepRow> rows(weights.size());
    auto one = [&](size_t i, const RadialFunction& warm) {
        SweepRow& row = rows[i];
        row.weight = weights[i];
        row.eps = nu(P) != 0 ? std::pow(weights[i], 1.0 / nu(P)) : NAN;
        if (weights[i] == 0) {
            row.report = ref.report;
            row.sigma_eps = ref.report.functionals.energy_E;
            row.converged = ref.report.converged;
            return ref.u;
        }
        SolveResult r = solve_from(warm, cfg, P, weights[i]);
        row.report = r.report;
        row.sigma_eps = r.report.functionals.j_eps;
        row.grad_term = weights[i] * r.report.functionals.grad_sq;
        row.l2_dist = l2_distance(r.u, ref.u);
        row.converged = r.report.converged;
        return r.u;
    };
    if (jobs <= 1) {
        RadialFunction warm = fresh(ref.u);
        for (size_t i = 0; i < weights.size(); ++i) warm = fresh(one(i, warm));
        return rows;
    }
    RadialFunction start = fresh(ref.u);
    std::vector<std::exception_ptr> errs(weights.size());
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(weights.size()));
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&] {
            for (size_t i; (i = next++) < weights.size();) {
                try {
                    one(i, start);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::vector<SweepRow> epsilon_sweep(const FlowConfig& cfg, const Params& P, const std::vector<double>& eps,
                                    SolveResult* reference, int jobs) {
    validate(P);
    int regime = tf_limit_regime(P);
    if (regime == 0) throw ConfigError("parameters are in neither regime (i) nor regime (ii) of the Thomas-Fermi limit");
    double n = nu(P);
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0)) throw ConfigError("epsilon values must be positive");
        if (i == 0) continue;
        bool up = eps[i] > eps[i - 1];
        if (regime == 1 && !up) throw ConfigError("regime (i) needs an increasing eps grid (eps -> infinity)");
        if (regime == 2 && up) throw ConfigError("regime (ii) needs a decreasing eps grid (eps -> 0)");
    }
    std::vector<double> w;
    for (double e : eps) w.push_back(std::pow(e, n));
    for (size_t i = 1; i < w.size(); ++i)
        if (!(w[i] < w[i - 1]))
            throw ConfigError(std::string("eps^nu must decrease along the grid in regime ") +
                              (regime == 1 ? "(i)" : "(ii)"));
    auto rows = epsilon_sweep_weights(cfg, P, w, reference, jobs);
    for (size_t i = 0; i < rows.size(); ++i) rows[i].eps = eps[i];
    return rows;
}

}  // namespace tfgs
