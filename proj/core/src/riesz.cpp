#include "tfgs/riesz.hpp"

#include "tfgs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numbers>

namespace tfgs {

namespace {

constexpr double kPi = std::numbers::pi;

// expm1(a y) / a, continuous at a = 0
double expm1_over(double a, double y) {
    if (a == 0.0) return y;
    return std::expm1(a * y) / a;
}

}  // namespace

std::string to_string(KernelMethod m) {
    switch (m) {
        case KernelMethod::automatic: return "automatic";
        case KernelMethod::hypergeom_N: return "hypergeom-N";
        case KernelMethod::closed_3d: return "closed-3d";
        case KernelMethod::closed_1d: return "closed-1d";
    }
    return "automatic";
}

KernelMethod resolve_method(int N, KernelMethod requested) {
    if (requested == KernelMethod::closed_3d && N != 3) throw ConfigError("closed-3d kernel requires N = 3");
    if (requested == KernelMethod::closed_1d && N != 1) throw ConfigError("closed-1d kernel requires N = 1");
    if (requested != KernelMethod::automatic) return requested;
    if (N == 3) return KernelMethod::closed_3d;
    if (N == 1) return KernelMethod::closed_1d;
    return KernelMethod::hypergeom_N;
}

double kernel_3d(double r, double s, double alpha) {
    double mx = std::max(r, s), mn = std::min(r, s);
    if (mx <= 0) throw DomainError("kernel_3d: r and s both zero");
    double a = alpha - 1.0;
    double x = mn / mx;
    if (x == 0.0) return 2.0 * std::pow(mx, alpha - 3.0);
    if (x == 1.0) return INFINITY;
    return std::pow(mx, alpha - 3.0) * std::pow(1.0 - x, a) * expm1_over(a, 2.0 * std::atanh(x)) / x;
}

double kernel_1d(double r, double s, double alpha) {
    return std::pow(std::abs(r - s), alpha - 1.0) + std::pow(r + s, alpha - 1.0);
}

RadialKernel::RadialKernel(int N, double alpha, KernelMethod method)
    : N_(N), alpha_(alpha), method_(resolve_method(N, method)),
      F_(0.25 * (N - alpha), 0.25 * (N - alpha) + 0.5, 0.5 * N) {
    if (!(alpha > 0 && alpha < N)) throw DomainError("RadialKernel: need 0 < alpha < N");
    A_ = riesz_constant(N, alpha);
    farfield_C_ = A_ * sphere_area(N);
}

double RadialKernel::operator()(double r, double s) const {
    switch (method_) {
        case KernelMethod::closed_3d: return 2.0 * kPi * A_ * kernel_3d(r, s, alpha_);
        case KernelMethod::closed_1d: return A_ * kernel_1d(r, s, alpha_);
        default: break;
    }
    double r2 = r * r, s2 = s * s, t = r2 + s2;
    double d = (r - s) * (r + s) / t;
    double omw = d * d;
    double w = omw < 0.5 ? 1.0 - omw : 4.0 * r2 * s2 / (t * t);
    return farfield_C_ * std::pow(t, 0.5 * (alpha_ - N_)) * F_.eval(w, omw);
}

RieszOperator::RieszOperator(GridPtr grid, int N, double alpha, Options opt)
    : grid_(std::move(grid)), kernel_(N, alpha, opt.method), opt_(opt) {
    const RadialGrid& g = *grid_;
    const int M = g.M();
    const int S = g.samples_per_panel();
    cols_ = M * S;
    targets_.assign(g.nodes().begin(), g.nodes().end());
    tail_panels(tail_edges_);
    if (opt_.tail) {
        const GaussRule& gr = gauss_rule(S);
        for (size_t j = 0; j + 1 < tail_edges_.size(); ++j) {
            double a = tail_edges_[j], b = tail_edges_[j + 1];
            for (int k = 0; k < S; ++k) {
                tail_r_.push_back(0.5 * (a + b) + 0.5 * (b - a) * gr.x[k]);
                tail_w_.push_back(0.5 * (b - a) * gr.w[k]);
            }
        }
        targets_.insert(targets_.end(), tail_r_.begin(), tail_r_.end());
    }
    if (!opt_.build) return;
    W_.assign(static_cast<size_t>(targets_.size()) * cols_, 0.0);
    std::vector<double> w;
    for (size_t t = 0; t < targets_.size(); ++t) {
        row(targets_[t], w);
        std::copy(w.begin(), w.end(), W_.begin() + t * cols_);
    }
}

void RieszOperator::tail_panels(std::vector<double>& edges) const {
    edges.clear();
    double L = grid_->L();
    double r = L;
    edges.push_back(r);
    while (r < opt_.tail_extent * L) {
        r *= opt_.tail_ratio;
        edges.push_back(r);
    }
}

// Adaptive integration of K(rt, s) s^{N-1} (...) over [a,b]; emit(s, weight).
template <class Emit>
void RieszOperator::integrate_near(double rt, double a, double b, int depth, Emit&& emit) const {
    if (rt > a && rt < b) {
        integrate_near(rt, a, rt, depth, emit);
        integrate_near(rt, rt, b, depth, emit);
        return;
    }
    const int N = kernel_.N();
    double width = b - a;
    if (!(width > 0)) return;
    // pieces at rounding resolution can no longer be bisected
    bool tiny = width <= 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    double dist = rt <= a ? a - rt : (rt >= b ? rt - b : 0.0);
    double deff = std::min(dist, std::hypot(a, rt));
    if (deff >= opt_.near_factor * width || ((depth >= opt_.depth_cap || tiny) && dist > 0)) {
        const GaussRule& gr = gauss_rule(grid_->samples_per_panel());
        for (size_t k = 0; k < gr.x.size(); ++k) {
            double s = 0.5 * (a + b) + 0.5 * width * gr.x[k];
            emit(s, 0.5 * width * gr.w[k] * kernel_(rt, s) * std::pow(s, N - 1));
        }
        return;
    }
    if (depth >= opt_.depth_cap || tiny) {
        // integrable endpoint singularity ~ |s - rt|^{a-1}
        double s = rt == a ? b : a;
        if (s == rt) return;
        double f = kernel_(rt, s) * std::pow(s, N - 1);
        double alpha = kernel_.alpha();
        emit(s, f * (alpha < 1 ? width / alpha : width));
        return;
    }
    double m = 0.5 * (a + b);
    integrate_near(rt, a, m, depth + 1, emit);
    integrate_near(rt, m, b, depth + 1, emit);
}

void RieszOperator::row(double rt, std::vector<double>& w) const {
    const RadialGrid& g = *grid_;
    const int M = g.M();
    const int S = g.samples_per_panel();
    const int N = kernel_.N();
    w.assign(cols_, 0.0);
    const auto& sr = g.sample_r();
    const auto& sw = g.sample_w();
    double basis[64];
    for (int j = 0; j < M; ++j) {
        double a = g.node(j), b = g.node(j + 1);
        double width = b - a;
        double dist = rt <= a ? a - rt : (rt >= b ? rt - b : 0.0);
        double deff = std::min(dist, std::hypot(a, rt));
        double* out = &w[j * S];
        if (deff >= opt_.near_factor * width) {
            for (int k = 0; k < S; ++k) {
                double s = sr[j * S + k];
                out[k] = sw[j * S + k] * kernel_(rt, s) * std::pow(s, N - 1);
            }
            continue;
        }
        const double* nodes = &sr[j * S];
        integrate_near(rt, a, b, 0, [&](double s, double weight) {
            lagrange_weights(nodes, S, s, basis);
            for (int k = 0; k < S; ++k) out[k] += weight * basis[k];
        });
    }
}

double RieszOperator::tail_entry(double rt, double gamma) const {
    const std::vector<double>& edges = tail_edges_;
    double acc = 0;
    for (size_t j = 0; j + 1 < edges.size(); ++j)
        integrate_near(rt, edges[j], edges[j + 1], 0,
                       [&](double s, double weight) { acc += weight * std::pow(s, -gamma); });
    double Smax = edges.back();
    double alpha = kernel_.alpha();
    if (gamma <= alpha) throw DivergenceError("tail potential diverges: exponent <= alpha");
    acc += kernel_.farfield_C() * std::pow(Smax, alpha - gamma) / (gamma - alpha);
    return acc;
}

const std::vector<double>& RieszOperator::tail_column(double gamma) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tail_cols_.find(gamma);
    if (it != tail_cols_.end()) return it->second;
    std::vector<double> col(targets_.size());
    for (size_t t = 0; t < targets_.size(); ++t) col[t] = tail_entry(targets_[t], gamma);
    if (tail_cols_.size() > 16) tail_cols_.clear();
    return tail_cols_.emplace(gamma, std::move(col)).first->second;
}

void RieszOperator::apply(const std::vector<double>& c, double tail_coef, double tail_exp,
                          std::vector<double>& out) const {
    const size_t T = targets_.size();
    out.assign(T, 0.0);
    const double* W = W_.data();
    const double* x = c.data();
    // skip trailing zero panels
    int n = cols_;
    while (n > 0 && x[n - 1] == 0.0) --n;
    for (size_t t = 0; t < T; ++t) {
        const double* row = W + t * cols_;
        double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
        int k = 0;
        for (; k + 4 <= n; k += 4) {
            s0 += row[k] * x[k];
            s1 += row[k + 1] * x[k + 1];
            s2 += row[k + 2] * x[k + 2];
            s3 += row[k + 3] * x[k + 3];
        }
        for (; k < n; ++k) s0 += row[k] * x[k];
        out[t] = (s0 + s1) + (s2 + s3);
    }
    if (tail_coef != 0.0) {
        const std::vector<double>& col = tail_column(tail_exp);
        for (size_t t = 0; t < T; ++t) out[t] += tail_coef * col[t];
    }
}

std::shared_ptr<const RieszOperator> RieszOperator::get(const GridPtr& grid, int N, double alpha, bool tail,
                                                        KernelMethod method) {
    struct Entry {
        const RadialGrid* grid;
        int N;
        double alpha;
        bool tail;
        KernelMethod method;
        std::shared_ptr<const RieszOperator> op;
    };
    static std::mutex mu;
    static std::list<Entry> cache;
    constexpr size_t kMaxEntries = 4;
    method = resolve_method(N, method);
    {
        std::lock_guard<std::mutex> lock(mu);
        for (auto it = cache.begin(); it != cache.end(); ++it) {
            if (it->grid == grid.get() && it->N == N && it->alpha == alpha && it->tail == tail &&
                it->method == method) {
                cache.splice(cache.begin(), cache, it);
                return cache.front().op;
            }
        }
    }
    Options opt;
    opt.tail = tail;
    opt.method = method;
    auto op = std::make_shared<const RieszOperator>(grid, N, alpha, opt);
    std::lock_guard<std::mutex> lock(mu);
    cache.push_front(Entry{grid.get(), N, alpha, tail, method, op});
    if (cache.size() > kMaxEntries) cache.pop_back();
    return op;
}

std::vector<double> PotentialField::samples() const {
    std::vector<double> out;
    int split = source_end >= grid->M() ? grid->M() : source_end;
    panel_samples_split(*grid, values, split, out);
    return out;
}

PotentialField potential(const RadialFunction& rho, const Params& P, KernelMethod method, bool tail_targets) {
    if (rho.N() != P.N) throw ConfigError("potential: profile dimension differs from N");
    bool tail = rho.tail().algebraic();
    auto op = RieszOperator::get(rho.grid_ptr(), P.N, P.alpha, tail || tail_targets, method);
    std::vector<double> c, out;
    rho.samples(c);
    op->apply(c, tail ? rho.tail().coefficient : 0.0, rho.tail().exponent, out);
    PotentialField f;
    f.grid = rho.grid_ptr();
    f.method = op->kernel().method();
    int nr = op->node_rows();
    f.values.assign(out.begin(), out.begin() + nr);
    if (op->has_tail()) {
        f.tail_r = op->tail_r();
        f.tail_w = op->tail_w();
        f.tail_end = op->tail_end();
        f.tail_values.assign(out.begin() + nr, out.end());
    }
    f.source_end = tail ? rho.grid().M() : rho.support_end();
    return f;
}

std::vector<double> potential_at(const RadialFunction& rho, const Params& P, const std::vector<double>& radii,
                                 KernelMethod method) {
    if (rho.N() != P.N) throw ConfigError("potential_at: profile dimension differs from N");
    RieszOperator::Options opt;
    opt.method = method;
    opt.build = false;
    RieszOperator real(rho.grid_ptr(), P.N, P.alpha, opt);
    std::vector<double> c, w, out;
    rho.samples(c);
    for (double r : radii) {
        real.row(r, w);
        double acc = 0;
        for (size_t k = 0; k < c.size(); ++k) acc += w[k] * c[k];
        if (rho.tail().algebraic()) acc += rho.tail().coefficient * real.tail_entry(r, rho.tail().exponent);
        out.push_back(acc);
    }
    return out;
}

double closed_form_ball(double R, double x, const Params& P) {
    if (!(R > 0)) throw DomainError("closed_form_ball: R must be positive");
    const int N = P.N;
    const double a = P.alpha;
    x = std::abs(x);
    if (x <= R) {
        double pre = std::tgamma(0.5 * (N - a)) * std::pow(R, a) /
                     (std::pow(2.0, a) * std::tgamma(1.0 + 0.5 * a) * std::tgamma(0.5 * N));
        double z = (x / R) * (x / R);
        return pre * hyp2f1(-0.5 * a, 0.5 * (N - a), 0.5 * N, z);
    }
    auto g = make_grid(R, 64, Clustering::uniform);
    RadialFunction ball(g, std::vector<double>(g->M() + 1, 1.0), N);
    return potential_at(ball, P, {x})[0];
}

bool on_explicit_family(const Params& P) {
    double p = (P.N + P.alpha + 2.0) / (P.N + 1.0);
    double q = 2.0 * (P.N + 2.0) / (P.N + 1.0);
    return std::abs(P.p - p) <= 1e-12 && std::abs(P.q - q) <= 1e-12;
}

Params explicit_family_params(int N, double alpha) {
    return Params{N, alpha, (N + alpha + 2.0) / (N + 1.0), 2.0 * (N + 2.0) / (N + 1.0)};
}

double closed_form_explicit_family(double x, const Params& P) {
    double p = (P.N + P.alpha + 2.0) / (P.N + 1.0);
    if (std::abs(P.p - p) > 1e-12) throw DomainError("closed_form_explicit_family: not on the explicit family");
    const int N = P.N;
    const double a = P.alpha;
    double x2 = x * x;
    return std::pow(2.0, -1.0 - a) * std::tgamma(0.5 * (N - a)) / std::tgamma(0.5 * (N + a + 2.0)) *
           std::pow(1.0 + x2, -1.0 - 0.5 * N + 0.5 * a) * (N + a * x2);
}

std::vector<FarfieldSample> farfield_check(const RadialFunction& rho, const PotentialField& field, const Params& P) {
    double mass = lp_norm_pow(rho, 1.0);
    double A = riesz_constant(P);
    std::vector<FarfieldSample> out;
    if (mass <= 0) return out;
    const RadialGrid& g = rho.grid();
    int start = g.M() - std::max(1, g.M() / 5);
    for (int i = start; i <= g.M(); ++i) {
        double r = g.node(i);
        out.push_back({r, field.values[i] / (A * std::pow(r, P.alpha - P.N) * mass)});
    }
    for (size_t i = 0; i < field.tail_r.size(); ++i) {
        double r = field.tail_r[i];
        out.push_back({r, field.tail_values[i] / (A * std::pow(r, P.alpha - P.N) * mass)});
    }
    return out;
}

}  // namespace tfgs
