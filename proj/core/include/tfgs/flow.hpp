#pragma once

#include "tfgs/errors.hpp"
#include "tfgs/functionals.hpp"
#include "tfgs/radial.hpp"
#include "tfgs/special_fn.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tfgs {

enum class InitKind { gaussian, explicit_family_ansatz, ball_indicator, file };
std::string to_string(InitKind k);
InitKind init_from_string(const std::string& s);

struct GridPolicy {
    double L = 0;  // 0: 50 for p < 2, 8 for p >= 2
    int M = 512;
    std::optional<Clustering> clustering;  // empty: uniform
    int order = 4;
};

struct FlowConfig {
    double dt0 = 0.1;
    double dt_max = 2.0;
    double rtol_step = 0.05;  // bound on max |du| / max u per step
    double stall_tol = 1e-8;  // stationarity: max |du| / (dt max u)
    long max_steps = 20000;
    int renorm_every = 1;
    InitKind init = InitKind::explicit_family_ansatz;
    std::string init_file;
    double init_width = 1.0;
    GridPolicy grid;
    // p < 2: re-centre the conserved energy until |lambda - 1| is below this
    double recenter_tol = 1e-6;
    int max_recenter = 6;
    // p > 2: outer iterations on the conserved energy driving the Pohozaev residual to zero
    int max_outer = 40;
    double pohozaev_tol = 1e-7;
    bool check_monotone = true;
    long checkpoint_every = 0;
    std::string checkpoint_dir;
    bool verbose = false;
};

void validate(const FlowConfig& cfg);

struct HistoryEntry {
    long step = 0;
    double time = 0;
    double dt = 0;
    double lambda = 0;
    double residual = 0;  // max |du| / (dt max u)
    double drift = 0;     // |D - D0| / D0 before renormalization
    double rayleigh = 0;
    int stage = 0;
};

struct FlowState {
    RadialFunction u;
    double lambda_t = 1;
    double time = 0;
    double dt = 0.1;
    double d_alpha_target = 1;
    double eps_weight = 0;  // effective weight after normalization
    long steps = 0;
    long clip_events = 0;
    std::vector<long> clip_steps;
    std::vector<HistoryEntry> history;
    int stage = 0;
};

struct StepInfo {
    double residual = 0;
    bool clipped = false;
};

// Flow invariant broken (monotonicity); carries the history for diagnostics.
struct InvariantError : std::runtime_error {
    InvariantError(const std::string& what, std::vector<HistoryEntry> h)
        : std::runtime_error(what), history(std::move(h)) {}
    std::vector<HistoryEntry> history;
};

// Collapse of the state; carries the history.
struct CollapseError : DegenerateError {
    CollapseError(const std::string& what, std::vector<HistoryEntry> h)
        : DegenerateError(what), history(std::move(h)) {}
    std::vector<HistoryEntry> history;
};

double lambda_multiplier(const RadialFunction& u, const Params& P);
double lambda_multiplier(const RadialFunction& u, const Params& P, const SelfInteraction& si);

// Fixes the tail coefficient by continuity at L (p < 2 only).
void attach_tail(RadialFunction& u, const Params& P);

RadialFunction initial_profile(const FlowConfig& cfg, const Params& P, const GridPtr& grid);
FlowState make_state(RadialFunction u, const Params& P, double eps_weight);

// One step of the lambda-weighted flow; renormalizes to the conserved interaction energy.
StepInfo step(FlowState& state, const FlowConfig& cfg, const Params& P);

// Runs step() until stationary or max_steps; returns true on convergence.
bool run(FlowState& state, const FlowConfig& cfg, const Params& P, long max_steps);

struct SolveResult {
    RadialFunction u;  // normalized TF (or rescaled Choquard) solution
    GroundStateReport report;
    std::vector<HistoryEntry> history;
    double d_alpha_target = 0;
};

// Full solve from cfg.init (or from `start` when given).
SolveResult solve(const FlowConfig& cfg, const Params& P, double eps_weight = 0.0);
SolveResult solve_from(const RadialFunction& start, const FlowConfig& cfg, const Params& P, double eps_weight);

struct SweepRow {
    double eps = 0;
    double weight = 0;  // eps^nu
    double sigma_eps = 0;
    double grad_term = 0;  // eps^nu |grad u|^2
    double l2_dist = 0;
    bool converged = false;
    GroundStateReport report;
};

// Weights eps^nu, strictly decreasing and nonnegative; 0 is the plain solve.
// The reference eps = 0 state is solved first. With jobs == 1 every entry is warm-started from the
// previous one; with jobs > 1 entries run in parallel, each from the reference state.
std::vector<SweepRow> epsilon_sweep_weights(const FlowConfig& cfg, const Params& P, const std::vector<double>& weights,
                                            SolveResult* reference = nullptr, int jobs = 1);

// Regime of the Thomas-Fermi limit: 1 (eps -> inf), 2 (eps -> 0), 0 when neither applies.
int tf_limit_regime(const Params& P);
// eps values; the direction must match the regime so that eps^nu decreases.
std::vector<SweepRow> epsilon_sweep(const FlowConfig& cfg, const Params& P, const std::vector<double>& eps,
                                    SolveResult* reference = nullptr, int jobs = 1);

}  // namespace tfgs
