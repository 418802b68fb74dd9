#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tfgs {

enum class Clustering { uniform, boundary, origin_boundary };

std::string to_string(Clustering c);
Clustering clustering_from_string(const std::string& s);

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1], ascending
    std::vector<double> w;
};

// Gauss-Legendre rule with n points, cached.
const GaussRule& gauss_rule(int n);

// Nodes r_0 = 0 < ... < r_M = L. Each panel carries 2*order Gauss points which
// serve both as quadrature nodes and as the panel-local interpolation samples.
class RadialGrid {
public:
    RadialGrid(std::vector<double> nodes, int order = 4, Clustering clustering = Clustering::uniform);

    const std::vector<double>& nodes() const { return nodes_; }
    double node(int i) const { return nodes_[i]; }
    int M() const { return static_cast<int>(nodes_.size()) - 1; }
    double L() const { return nodes_.back(); }
    int order() const { return order_; }
    int samples_per_panel() const { return 2 * order_; }
    int stencil_width() const { return 2 * order_; }
    Clustering clustering() const { return clustering_; }

    // Sample radii and plain Gauss weights (h/2 * w), panel-major.
    const std::vector<double>& sample_r() const { return sample_r_; }
    const std::vector<double>& sample_w() const { return sample_w_; }
    // sample_w * r^{N-1}, cached per N.
    const std::vector<double>& measure(int N) const;

    // Lagrange stencil for panel j using only nodes in [lo, hi]:
    // first node index and S x W weight matrix (row-major).
    struct Stencil {
        int first = 0;
        int width = 0;
        std::vector<double> w;
    };
    const Stencil& stencil(int panel) const { return stencils_[panel]; }
    Stencil restricted_stencil(int panel, int lo, int hi) const;

    // Index of the panel containing r (clamped to [0, M-1]).
    int panel_of(double r) const;

    std::shared_ptr<const RadialGrid> scaled(double factor) const;

private:
    std::vector<double> nodes_;
    int order_;
    Clustering clustering_;
    std::vector<double> sample_r_, sample_w_;
    std::vector<Stencil> stencils_;
    mutable std::mutex mu_;
    mutable std::vector<std::vector<double>> measure_cache_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double L, int M, Clustering clustering, int order = 4);

// Lagrange basis values of nodes t[0..n) at x.
void lagrange_weights(const double* t, int n, double x, double* out);

struct TailModel {
    enum class Kind { none, algebraic };
    Kind kind = Kind::none;
    double exponent = 0;
    double coefficient = 0;

    bool algebraic() const { return kind == Kind::algebraic; }
    double operator()(double r) const;
    static TailModel power(double exponent, double coefficient);
};

// What happens on the panel after the last nonzero node when no tail is attached.
enum class EdgeRule {
    jump,        // zero on the whole panel (inner-limit convention)
    continuous,  // linear decay to zero at the next node
};

class RadialFunction {
public:
    RadialFunction() = default;
    RadialFunction(GridPtr grid, std::vector<double> values, int N, TailModel tail = {},
                   EdgeRule edge = EdgeRule::jump);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    double operator[](int i) const { return values_[i]; }
    int N() const { return N_; }
    const TailModel& tail() const { return tail_; }
    TailModel& mutable_tail() { return tail_; }
    EdgeRule edge() const { return edge_; }
    void set_edge(EdgeRule e) { edge_ = e; }
    bool empty() const { return !grid_; }

    // Largest node index with a nonzero value, -1 for the zero function.
    int support_end() const;
    // Panel samples honoring support, edge rule and tail (size M * S).
    std::vector<double> samples() const;
    void samples(std::vector<double>& out) const;
    double eval(double r) const;

    bool monotone(double tol) const;
    // Largest relative deviation from the tail model over the last 10% of nodes.
    double tail_consistency() const;

    RadialFunction scaled(double a) const;   // a * u
    RadialFunction dilated(double b) const;  // u(x / b)
    RadialFunction power(double s) const;    // |u|^s, tail included
    // Resample onto another grid via eval.
    RadialFunction resampled(GridPtr grid) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    int N_ = 3;
    TailModel tail_;
    EdgeRule edge_ = EdgeRule::jump;
};

// Panel samples of arbitrary nodal data.
void panel_samples(const RadialGrid& g, const std::vector<double>& values, int last_nonzero,
                   bool full_support, EdgeRule edge, std::vector<double>& out);

// Panel samples of data that is smooth on [0, r_split] and on [r_split, L]
// separately (a potential whose source ends at node split).
void panel_samples_split(const RadialGrid& g, const std::vector<double>& values, int split,
                         std::vector<double>& out);

double lp_norm_pow(const RadialFunction& u, double s);
// Integral of a nonnegative tail c r^{-beta} raised to s beyond L.
double tail_integral(int N, double L, double coefficient, double exponent, double s);

std::vector<double> radial_laplacian(const RadialFunction& u);
std::vector<double> radial_derivative(const RadialFunction& u);
double grad_sq(const RadialFunction& u);

struct TailFit {
    double exponent = 0;
    double coefficient = 0;
    double r_min = 0, r_max = 0;
};
TailFit fit_tail(const RadialFunction& u, double window = 0.2);

// ‖u − v‖₂ over R^N; each profile is evaluated through its own interpolant.
double l2_distance(const RadialFunction& u, const RadialFunction& v);

}  // namespace tfgs
