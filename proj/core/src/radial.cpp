#include "tfgs/radial.hpp"

#include "tfgs/errors.hpp"
#include "tfgs/special_fn.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace tfgs {

std::string to_string(Clustering c) {
    switch (c) {
        case Clustering::uniform: return "uniform";
        case Clustering::boundary: return "boundary-clustered";
        case Clustering::origin_boundary: return "origin-and-boundary";
    }
    return "uniform";
}

Clustering clustering_from_string(const std::string& s) {
    if (s == "uniform") return Clustering::uniform;
    if (s == "boundary-clustered" || s == "boundary") return Clustering::boundary;
    if (s == "origin-and-boundary" || s == "origin_boundary") return Clustering::origin_boundary;
    throw ConfigError("unknown clustering '" + s + "'");
}

const GaussRule& gauss_rule(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw DomainError("gauss_rule: n < 1");
    std::vector<double> pos = boost::math::legendre_p_zeros<double>(n);
    GaussRule rule;
    for (auto it2 = pos.rbegin(); it2 != pos.rend(); ++it2)
        if (*it2 != 0.0) rule.x.push_back(-*it2);
    for (double x : pos) rule.x.push_back(x);
    for (double x : rule.x) {
        double dp = boost::math::legendre_p_prime(n, x);
        rule.w.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

void lagrange_weights(const double* t, int n, double x, double* out) {
    for (int i = 0; i < n; ++i) {
        double v = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) v *= (x - t[j]) / (t[i] - t[j]);
        out[i] = v;
    }
}

RadialGrid::RadialGrid(std::vector<double> nodes, int order, Clustering clustering)
    : nodes_(std::move(nodes)), order_(order), clustering_(clustering) {
    if (order_ < 2) throw ConfigError("grid order must be >= 2");
    if (nodes_.size() < 3) throw ConfigError("grid needs at least 2 panels");
    if (nodes_.front() != 0.0) throw ConfigError("grid must start at r = 0");
    for (size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("grid nodes must be strictly increasing");
    const int S = samples_per_panel();
    const GaussRule& g = gauss_rule(S);
    const int M = this->M();
    sample_r_.resize(static_cast<size_t>(M) * S);
    sample_w_.resize(sample_r_.size());
    for (int j = 0; j < M; ++j) {
        double a = nodes_[j], b = nodes_[j + 1];
        for (int k = 0; k < S; ++k) {
            sample_r_[j * S + k] = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
            sample_w_[j * S + k] = 0.5 * (b - a) * g.w[k];
        }
    }
    stencils_.resize(M);
    for (int j = 0; j < M; ++j) stencils_[j] = restricted_stencil(j, 0, M);
}

// Interpolation weights at x for nodal data of an even function. Stencils that
// would start left of the origin use mirrored nodes, folded back onto [0, ...].
// Returns the first node index; width is updated to the folded width.
static int even_lagrange(const std::vector<double>& nodes, int j, int lo, int hi, int& width, double x, double* w) {
    int W = width;
    int first = j - (W / 2 - 1);
    first = std::min(first, hi + 1 - W);
    if (lo > 0 || first >= 0) {
        first = std::max(first, lo);
        lagrange_weights(&nodes[first], W, x, w);
        return first;
    }
    double t[64], v[64];
    for (int i = 0; i < W; ++i) {
        int idx = first + i;
        t[i] = idx < 0 ? -nodes[-idx] : nodes[idx];
    }
    lagrange_weights(t, W, x, v);
    width = first + W;
    std::fill(w, w + width, 0.0);
    for (int i = 0; i < W; ++i) w[std::abs(first + i)] += v[i];
    return 0;
}

RadialGrid::Stencil RadialGrid::restricted_stencil(int panel, int lo, int hi) const {
    const int S = samples_per_panel();
    const int W = std::min(stencil_width(), hi - lo + 1);
    Stencil st;
    double buf[64];
    for (int k = 0; k < S; ++k) {
        int width = W;
        st.first = even_lagrange(nodes_, panel, lo, hi, width, sample_r_[panel * S + k], buf);
        st.width = width;
        if (k == 0) st.w.resize(static_cast<size_t>(S) * width);
        std::copy(buf, buf + width, &st.w[k * width]);
    }
    return st;
}

const std::vector<double>& RadialGrid::measure(int N) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (measure_cache_.size() <= static_cast<size_t>(N)) measure_cache_.resize(N + 1);
    auto& m = measure_cache_[N];
    if (m.empty()) {
        m.resize(sample_r_.size());
        for (size_t i = 0; i < m.size(); ++i) m[i] = sample_w_[i] * std::pow(sample_r_[i], N - 1);
    }
    return m;
}

int RadialGrid::panel_of(double r) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    int j = static_cast<int>(it - nodes_.begin()) - 1;
    return std::clamp(j, 0, M() - 1);
}

std::shared_ptr<const RadialGrid> RadialGrid::scaled(double factor) const {
    std::vector<double> n(nodes_);
    for (double& x : n) x *= factor;
    return std::make_shared<const RadialGrid>(std::move(n), order_, clustering_);
}

namespace {

// Ratio rho in (0,1) with sum_{k=1..n} h rho^k = target.
double geometric_ratio(double h, int n, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double s = 0, t = 1;
        for (int k = 1; k <= n; ++k) {
            t *= mid;
            s += h * t;
        }
        (s < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

GridPtr make_grid(double L, int M, Clustering clustering, int order) {
    if (!(L > 0)) throw ConfigError("grid length L must be positive");
    if (M < 32) throw ConfigError("grid needs M >= 32 panels");
    std::vector<double> r(M + 1, 0.0);
    constexpr double kZone = 0.05;
    constexpr double kShare = 0.25;
    if (clustering == Clustering::uniform) {
        for (int i = 0; i <= M; ++i) r[i] = L * i / M;
    } else {
        int nb = static_cast<int>(std::lround(kShare * M));
        int no = clustering == Clustering::origin_boundary ? nb : 0;
        int nu = M - nb - no;
        double inner = no > 0 ? kZone * L : 0.0;
        double span = L - inner - kZone * L;
        double h = span / nu;
        double rho = geometric_ratio(h, nb, kZone * L);
        int i = 0;
        r[0] = 0.0;
        if (no > 0) {
            std::vector<double> w(no);
            double t = 1;
            for (int k = 0; k < no; ++k) {
                t *= rho;
                w[k] = h * t;
            }
            for (int k = no - 1; k >= 0; --k, ++i) r[i + 1] = r[i] + w[k];
            r[i] = inner;
        }
        for (int k = 0; k < nu; ++k, ++i) r[i + 1] = inner + h * (k + 1);
        double t = 1;
        for (int k = 0; k < nb; ++k, ++i) {
            t *= rho;
            r[i + 1] = r[i] + h * t;
        }
        r[M] = L;
    }
    return std::make_shared<const RadialGrid>(std::move(r), order, clustering);
}

double TailModel::operator()(double r) const {
    if (kind == Kind::none) return 0.0;
    return coefficient * std::pow(r, -exponent);
}

TailModel TailModel::power(double exponent, double coefficient) {
    TailModel t;
    t.kind = Kind::algebraic;
    t.exponent = exponent;
    t.coefficient = coefficient;
    return t;
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values, int N, TailModel tail, EdgeRule edge)
    : grid_(std::move(grid)), values_(std::move(values)), N_(N), tail_(tail), edge_(edge) {
    if (!grid_) throw ConfigError("RadialFunction: null grid");
    if (static_cast<int>(values_.size()) != grid_->M() + 1)
        throw ConfigError("RadialFunction: value count does not match grid");
    if (N_ < 1) throw ConfigError("RadialFunction: N < 1");
}

int RadialFunction::support_end() const {
    for (int i = static_cast<int>(values_.size()) - 1; i >= 0; --i)
        if (values_[i] != 0.0) return i;
    return -1;
}

void panel_samples(const RadialGrid& g, const std::vector<double>& values, int last, bool full_support,
                   EdgeRule edge, std::vector<double>& out) {
    const int M = g.M();
    const int S = g.samples_per_panel();
    out.assign(static_cast<size_t>(M) * S, 0.0);
    if (full_support) last = M;
    if (last < 0) return;
    for (int j = 0; j < std::min(last, M); ++j) {
        const RadialGrid::Stencil* st = &g.stencil(j);
        RadialGrid::Stencil local;
        if (last < M && st->first + st->width - 1 > last) {
            local = g.restricted_stencil(j, 0, last);
            st = &local;
        }
        for (int k = 0; k < S; ++k) {
            const double* w = &st->w[k * st->width];
            double acc = 0;
            for (int i = 0; i < st->width; ++i) acc += w[i] * values[st->first + i];
            out[j * S + k] = acc;
        }
    }
    if (last < M && last >= 0 && edge == EdgeRule::continuous) {
        double a = g.node(last), b = g.node(last + 1);
        for (int k = 0; k < S; ++k) {
            double r = g.sample_r()[last * S + k];
            out[last * S + k] = values[last] * (b - r) / (b - a);
        }
    }
}

void panel_samples_split(const RadialGrid& g, const std::vector<double>& values, int split,
                         std::vector<double>& out) {
    const int M = g.M();
    const int S = g.samples_per_panel();
    out.assign(static_cast<size_t>(M) * S, 0.0);
    for (int j = 0; j < M; ++j) {
        const RadialGrid::Stencil* st = &g.stencil(j);
        RadialGrid::Stencil local;
        if (split > 0 && split < M) {
            int lo = j < split ? 0 : split;
            int hi = j < split ? split : M;
            if (st->first < lo || st->first + st->width - 1 > hi) {
                local = g.restricted_stencil(j, lo, hi);
                st = &local;
            }
        }
        for (int k = 0; k < S; ++k) {
            const double* w = &st->w[k * st->width];
            double acc = 0;
            for (int i = 0; i < st->width; ++i) acc += w[i] * values[st->first + i];
            out[j * S + k] = acc;
        }
    }
}

void RadialFunction::samples(std::vector<double>& out) const {
    panel_samples(*grid_, values_, support_end(), tail_.algebraic(), edge_, out);
}

std::vector<double> RadialFunction::samples() const {
    std::vector<double> out;
    samples(out);
    return out;
}

double RadialFunction::eval(double r) const {
    const RadialGrid& g = *grid_;
    if (r < 0) r = -r;
    if (r > g.L()) return tail_.algebraic() ? tail_(r) : 0.0;
    int last = tail_.algebraic() ? g.M() : support_end();
    if (last < 0) return 0.0;
    int j = g.panel_of(r);
    if (r == g.node(j)) return values_[j];
    if (r == g.node(j + 1)) return values_[j + 1];
    if (j > last) return 0.0;
    if (j == last) {
        if (last == g.M()) return values_[last];
        if (edge_ == EdgeRule::continuous) {
            double a = g.node(last), b = g.node(last + 1);
            return values_[last] * (b - r) / (b - a);
        }
        return 0.0;
    }
    int width = std::min(g.stencil_width(), last + 1);
    double w[64];
    int first = even_lagrange(g.nodes(), j, 0, last, width, r, w);
    double acc = 0;
    for (int i = 0; i < width; ++i) acc += w[i] * values_[first + i];
    return acc;
}

bool RadialFunction::monotone(double tol) const {
    for (size_t i = 0; i + 1 < values_.size(); ++i)
        if (values_[i + 1] > values_[i] + tol) return false;
    return true;
}

double RadialFunction::tail_consistency() const {
    if (!tail_.algebraic()) return 0.0;
    const int M = grid_->M();
    int start = M - std::max(1, M / 10);
    double worst = 0;
    for (int i = start; i <= M; ++i) {
        double model = tail_(grid_->node(i));
        if (model <= 0) return INFINITY;
        worst = std::max(worst, std::abs(values_[i] / model - 1.0));
    }
    return worst;
}

RadialFunction RadialFunction::scaled(double a) const {
    RadialFunction out(*this);
    for (double& v : out.values_) v *= a;
    out.tail_.coefficient *= a;
    return out;
}

RadialFunction RadialFunction::dilated(double b) const {
    RadialFunction out(*this);
    out.grid_ = grid_->scaled(b);
    out.tail_.coefficient *= std::pow(b, tail_.exponent);
    return out;
}

RadialFunction RadialFunction::power(double s) const {
    RadialFunction out(*this);
    for (double& v : out.values_) v = std::pow(std::abs(v), s);
    if (tail_.algebraic()) {
        out.tail_.exponent *= s;
        out.tail_.coefficient = std::pow(tail_.coefficient, s);
    }
    return out;
}

RadialFunction RadialFunction::resampled(GridPtr grid) const {
    std::vector<double> v(grid->M() + 1);
    for (int i = 0; i <= grid->M(); ++i) v[i] = eval(grid->node(i));
    return RadialFunction(std::move(grid), std::move(v), N_, tail_, edge_);
}

double tail_integral(int N, double L, double coefficient, double exponent, double s) {
    double e = exponent * s;
    if (e <= N) throw DivergenceError("tail integral diverges: s*exponent <= N");
    return sphere_area(N) * std::pow(coefficient, s) * std::pow(L, N - e) / (e - N);
}

double lp_norm_pow(const RadialFunction& u, double s) {
    if (!(s > 0)) throw DomainError("lp_norm_pow: s must be positive");
    const RadialGrid& g = u.grid();
    std::vector<double> c;
    u.samples(c);
    const std::vector<double>& m = g.measure(u.N());
    double acc = 0;
    if (s == 2.0) {
        for (size_t i = 0; i < c.size(); ++i) acc += m[i] * c[i] * c[i];
    } else {
        for (size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0.0) acc += m[i] * std::pow(std::abs(c[i]), s);
    }
    acc *= sphere_area(u.N());
    if (u.tail().algebraic()) acc += tail_integral(u.N(), g.L(), u.tail().coefficient, u.tail().exponent, s);
    return acc;
}

namespace {

// Three-point first and second derivative weights at x1 with neighbours x0, x2.
void fd3(double x0, double x1, double x2, double d1[3], double d2[3]) {
    double h0 = x1 - x0, h1 = x2 - x1;
    d1[0] = -h1 / (h0 * (h0 + h1));
    d1[1] = (h1 - h0) / (h0 * h1);
    d1[2] = h0 / (h1 * (h0 + h1));
    d2[0] = 2.0 / (h0 * (h0 + h1));
    d2[1] = -2.0 / (h0 * h1);
    d2[2] = 2.0 / (h1 * (h0 + h1));
}

// One-sided weights at x2 using x0, x1, x2.
void fd3_end(double x0, double x1, double x2, double d1[3], double d2[3]) {
    double a = x0 - x2, b = x1 - x2;
    d1[0] = -b / (a * (a - b));
    d1[1] = -a / (b * (b - a));
    d1[2] = -(d1[0] + d1[1]);
    d2[0] = 2.0 / (a * (a - b));
    d2[1] = 2.0 / (b * (b - a));
    d2[2] = -(d2[0] + d2[1]);
}

}  // namespace

std::vector<double> radial_laplacian(const RadialFunction& u) {
    const auto& r = u.grid().nodes();
    const auto& v = u.values();
    const int M = u.grid().M();
    const int N = u.N();
    std::vector<double> out(M + 1, 0.0);
    out[0] = N * 2.0 * (v[1] - v[0]) / (r[1] * r[1]);
    double d1[3], d2[3];
    for (int i = 1; i < M; ++i) {
        fd3(r[i - 1], r[i], r[i + 1], d1, d2);
        double s1 = d1[0] * v[i - 1] + d1[1] * v[i] + d1[2] * v[i + 1];
        double s2 = d2[0] * v[i - 1] + d2[1] * v[i] + d2[2] * v[i + 1];
        out[i] = s2 + (N - 1) / r[i] * s1;
    }
    fd3_end(r[M - 2], r[M - 1], r[M], d1, d2);
    double s1 = d1[0] * v[M - 2] + d1[1] * v[M - 1] + d1[2] * v[M];
    double s2 = d2[0] * v[M - 2] + d2[1] * v[M - 1] + d2[2] * v[M];
    out[M] = s2 + (N - 1) / r[M] * s1;
    return out;
}

std::vector<double> radial_derivative(const RadialFunction& u) {
    const auto& r = u.grid().nodes();
    const auto& v = u.values();
    const int M = u.grid().M();
    std::vector<double> out(M + 1, 0.0);
    double d1[3], d2[3];
    for (int i = 1; i < M; ++i) {
        fd3(r[i - 1], r[i], r[i + 1], d1, d2);
        out[i] = d1[0] * v[i - 1] + d1[1] * v[i] + d1[2] * v[i + 1];
    }
    fd3_end(r[M - 2], r[M - 1], r[M], d1, d2);
    out[M] = d1[0] * v[M - 2] + d1[1] * v[M - 1] + d1[2] * v[M];
    return out;
}

double grad_sq(const RadialFunction& u) {
    std::vector<double> d = radial_derivative(u);
    std::vector<double> c;
    panel_samples(u.grid(), d, u.grid().M(), true, EdgeRule::jump, c);
    const std::vector<double>& m = u.grid().measure(u.N());
    double acc = 0;
    for (size_t i = 0; i < c.size(); ++i) acc += m[i] * c[i] * c[i];
    return sphere_area(u.N()) * acc;
}

TailFit fit_tail(const RadialFunction& u, double window) {
    if (!(window > 0 && window <= 1)) throw ConfigError("fit_tail: window must be in (0,1]");
    const int M = u.grid().M();
    int count = std::max(3, static_cast<int>(std::lround(window * M)));
    int start = std::max(1, M + 1 - count);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = start; i <= M; ++i) {
        double v = u[i];
        if (!(v > 0)) throw FitError("fit_tail: non-positive value in the tail window");
        double x = std::log(u.grid().node(i)), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double den = n * sxx - sx * sx;
    if (n < 2 || den == 0) throw FitError("fit_tail: degenerate window");
    double slope = (n * sxy - sx * sy) / den;
    double intercept = (sy - slope * sx) / n;
    TailFit f;
    f.exponent = -slope;
    f.coefficient = std::exp(intercept);
    f.r_min = u.grid().node(start);
    f.r_max = u.grid().L();
    return f;
}

double l2_distance(const RadialFunction& u, const RadialFunction& v) {
    if (u.N() != v.N()) throw ConfigError("l2_distance: dimension mismatch");
    std::vector<double> nodes(u.grid().nodes());
    nodes.insert(nodes.end(), v.grid().nodes().begin(), v.grid().nodes().end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double Lmax = nodes.back();
    bool tails = u.tail().algebraic() || v.tail().algebraic();
    if (tails) {
        double r = Lmax;
        for (int k = 0; k < 60; ++k) {
            r *= 1.25;
            nodes.push_back(r);
        }
    }
    const GaussRule& g = gauss_rule(8);
    const int N = u.N();
    double acc = 0;
    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
        double a = nodes[j], b = nodes[j + 1];
        for (size_t k = 0; k < g.x.size(); ++k) {
            double r = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
            double d = u.eval(r) - v.eval(r);
            acc += 0.5 * (b - a) * g.w[k] * std::pow(r, N - 1) * d * d;
        }
    }
    return std::sqrt(sphere_area(N) * acc);
}

}  // namespace tfgs
