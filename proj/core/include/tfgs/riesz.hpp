#pragma once

#include "tfgs/radial.hpp"
#include "tfgs/special_fn.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tfgs {

enum class KernelMethod { automatic, hypergeom_N, closed_3d, closed_1d };

std::string to_string(KernelMethod m);
KernelMethod resolve_method(int N, KernelMethod requested);

// Angular factor ((r+s)^{a-1} - |r-s|^{a-1}) / (r s (a-1)), log form at a = 1.
double kernel_3d(double r, double s, double alpha);
// |r-s|^{a-1} + (r+s)^{a-1}
double kernel_1d(double r, double s, double alpha);

// K(r,s) with (I_a * rho)(r) = int_0^inf s^{N-1} rho(s) K(r,s) ds.
class RadialKernel {
public:
    RadialKernel(int N, double alpha, KernelMethod method = KernelMethod::automatic);
    double operator()(double r, double s) const;
    // Far-field constant: K(r,s) ~ farfield_C * s^{a-N} as s -> inf.
    double farfield_C() const { return farfield_C_; }
    KernelMethod method() const { return method_; }
    int N() const { return N_; }
    double alpha() const { return alpha_; }

private:
    int N_;
    double alpha_;
    KernelMethod method_;
    double A_, farfield_C_;
    Hyp2F1 F_;
};

// Dense linear map from panel samples of rho (plus an optional algebraic tail)
// to the potential at the grid nodes and, when enabled, at tail quadrature points.
class RieszOperator {
public:
    struct Options {
        KernelMethod method = KernelMethod::automatic;
        bool tail = false;
        double tail_ratio = 1.5;     // geometric growth of tail panels
        double tail_extent = 1e3;    // tail panels cover [L, tail_extent * L]
        int depth_cap = 40;          // bisection depth toward the diagonal
        double near_factor = 1.0;    // panel is near when distance < near_factor * width
        bool build = true;           // false: only row()/tail_entry() are usable
    };

    RieszOperator(GridPtr grid, int N, double alpha, Options opt);
    RieszOperator(GridPtr grid, int N, double alpha) : RieszOperator(std::move(grid), N, alpha, Options{}) {}

    // Shared instance from a small cache.
    static std::shared_ptr<const RieszOperator> get(const GridPtr& grid, int N, double alpha, bool tail,
                                                    KernelMethod method = KernelMethod::automatic);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const RadialKernel& kernel() const { return kernel_; }
    int N() const { return kernel_.N(); }
    double alpha() const { return kernel_.alpha(); }
    bool has_tail() const { return opt_.tail; }
    int rows() const { return static_cast<int>(targets_.size()); }
    int cols() const { return cols_; }
    int node_rows() const { return grid_->M() + 1; }
    const std::vector<double>& targets() const { return targets_; }
    // Tail quadrature points (rows node_rows() .. rows()-1) and their plain weights.
    const std::vector<double>& tail_r() const { return tail_r_; }
    const std::vector<double>& tail_w() const { return tail_w_; }
    double tail_end() const { return tail_edges_.back(); }

    // out[t] = potential at target t of rho given by panel samples and a tail
    // c * s^{-gamma} beyond L (tail_coef = 0 for none).
    void apply(const std::vector<double>& samples, double tail_coef, double tail_exp,
               std::vector<double>& out) const;

    // Potential from the tail c = 1, s^{-gamma} at every target.
    const std::vector<double>& tail_column(double gamma) const;

    // Row and tail entry for an arbitrary radius.
    void row(double r, std::vector<double>& w) const;
    double tail_entry(double r, double gamma) const;

private:
    template <class Emit>
    void integrate_near(double rt, double a, double b, int depth, Emit&& emit) const;
    void tail_panels(std::vector<double>& edges) const;

    GridPtr grid_;
    RadialKernel kernel_;
    Options opt_;
    int cols_ = 0;
    std::vector<double> targets_;
    std::vector<double> tail_r_, tail_w_, tail_edges_;
    std::vector<double> W_;  // rows x cols, row-major
    mutable std::mutex mu_;
    mutable std::map<double, std::vector<double>> tail_cols_;
};

struct PotentialField {
    GridPtr grid;
    std::vector<double> values;       // at grid nodes
    std::vector<double> tail_r;       // tail quadrature points, when requested or the source has a tail
    std::vector<double> tail_w;       // plain quadrature weights at tail_r
    double tail_end = 0;              // outer edge of the tail panels
    std::vector<double> tail_values;
    KernelMethod method = KernelMethod::automatic;
    int source_end = -1;              // last nonzero source node; M when the source has a tail

    // Panel samples, interpolated separately inside and outside the source support.
    std::vector<double> samples() const;
};

// tail_targets also evaluates the field at the tail quadrature points beyond L.
PotentialField potential(const RadialFunction& rho, const Params& P,
                         KernelMethod method = KernelMethod::automatic, bool tail_targets = false);
// Potential evaluated directly at arbitrary radii.
std::vector<double> potential_at(const RadialFunction& rho, const Params& P, const std::vector<double>& radii,
                                 KernelMethod method = KernelMethod::automatic);

double closed_form_ball(double R, double x, const Params& P);
double closed_form_explicit_family(double x, const Params& P);
// True when p and q sit on the explicit family for (N, alpha), within 1e-12.
bool on_explicit_family(const Params& P);
Params explicit_family_params(int N, double alpha);

struct FarfieldSample {
    double r;
    double ratio;
};
// (I*rho)(r) / (A r^{a-N} int rho) over the outer 20% of nodes and any tail points.
std::vector<FarfieldSample> farfield_check(const RadialFunction& rho, const PotentialField& field, const Params& P);

}  // namespace tfgs
