#pragma once

#include "tfgs/flow.hpp"
#include "tfgs/functionals.hpp"
#include "tfgs/radial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tfgs {

constexpr double kSupportFrac = 1e-6;

struct SupportInfo {
    std::optional<double> radius;  // empty: unbounded (tail above threshold at L)
    std::optional<double> jump;    // inner limit at the support edge
    int index = -1;                // last node above the threshold
    bool low_confidence = false;   // non-monotone edge data, widened fit
};

SupportInfo extract_support(const RadialFunction& u, double threshold_frac = kSupportFrac);

// Classes read from the data: unbounded support, or the edge value relative to u(0).
Classification classify(const RadialFunction& u, const SupportInfo& s);

struct SupportBounds {
    double measured_volume = 0;  // |B_{R*}|
    double upper_volume = 0;
    bool upper_ok = false;
    std::optional<double> lower_lhs, lower_rhs;  // |B_R| R^{aq/(q-2p)} >= rhs
    bool lower_ok = false;
    std::string lower_skipped;  // reason when the lower bound does not apply
};
SupportBounds support_bounds(const GroundStateReport& report, const Params& P);

double sharp_constant_estimate(const RadialFunction& u, const Params& P);

struct DecayReport {
    double exponent_expected = 0;
    double exponent_fit = 0;
    double coefficient_fit = 0;
    double coefficient_predicted = 0;
    double exponent_gap = 0;     // relative
    double coefficient_gap = 0;  // relative
    double r_min = 0, r_max = 0;
};
// p < 2 only; throws DomainError otherwise.
DecayReport decay_report(const RadialFunction& u, const Params& P, double normp_p, double window);
DecayReport decay_report(const RadialFunction& u, const Params& P, double window = 0.2);

// Report for a normalized state given its functionals and the pointwise residual.
GroundStateReport build_report(const RadialFunction& v, const Params& P, const Functionals& F, const TFResidual& res);

struct ExplicitFamilyRecord {
    Params params;
    // closed forms of the unscaled profile (1 + r^2)^{-(N+1)/2}
    double norm2_exact = 0, normq_exact = 0, d_alpha_exact = 0;
    double c1 = 0, c2 = 0;              // recovered from the ansatz
    double c1_exact = 0, c2_exact = 0;
    double a = 0, b = 0;                // u(x) = a v(x / b) solves TF
    double norm2_rel = 0, normq_rel = 0, potential_rel = 0, d_alpha_rel = 0;
    double residual_linf = 0;
    double nehari_rel = 0, pohozaev_rel = 0;
    double rayleigh = 0, c_estimate = 0;
    bool pass = false;
};
// radii: the two interior radii for the 2x2 system.
ExplicitFamilyRecord explicit_family_suite(int N, double alpha, double r1 = 0.5, double r2 = 1.5, int M = 512,
                                           double L = 25.0);

struct SweepRecord {
    std::string parameter;
    double value = 0;
    GroundStateReport report;
    double C_est = 0;
    double R_star = 0;  // inf when unbounded
    double sigma_star_est = 0;
};

// Entries are independent and run on up to `jobs` threads.
std::vector<SweepRecord> alpha_sweep(const FlowConfig& cfg, const Params& base, const std::vector<double>& alphas,
                                     int jobs = 1);

// Strict monotonicity of a series; direction +1 increasing, -1 decreasing.
bool strictly_monotone(const std::vector<double>& v, int direction);

}  // namespace tfgs
