#pragma once

#include "tfgs/radial.hpp"
#include "tfgs/riesz.hpp"
#include "tfgs/special_fn.hpp"

#include <optional>
#include <string>

namespace tfgs {

struct Functionals {
    int N = 3;
    double norm2_sq = 0;
    double normq_q = 0;
    double normp_p = 0;
    double d_alpha = 0;
    double energy_E = 0;
    double pohozaev_P = 0;
    double nehari_res = 0;
    double rayleigh_R = 0;
    bool rayleigh_defined = false;
    double eps_weight = 0;
    double grad_sq = 0;  // only when eps_weight > 0
    double j_eps = 0;
    double pohozaev_Peps = 0;

    // Dimensionless residuals used by every identity check.
    double nehari_rel() const;
    double pohozaev_rel() const;
    double pohozaev_eps_rel() const;
};

// u^p, its potential (with values at the tail quadrature points) and D(u^p, u^p).
struct SelfInteraction {
    RadialFunction rho;
    PotentialField field;
    double mass = 0;  // int rho
    double d_alpha = 0;
};

SelfInteraction self_interaction(const RadialFunction& u, const Params& P);

// int f (I * g), with g's field precomputed.
double pairing(const RadialFunction& f, const PotentialField& g_field, double g_mass, const Params& P);

// D(f, g), symmetrized.
double interaction_energy(const RadialFunction& f, const RadialFunction& g, const Params& P);

Functionals evaluate_all(const RadialFunction& u, const Params& P, double eps_weight = 0.0);
Functionals evaluate_all(const RadialFunction& u, const Params& P, double eps_weight, const SelfInteraction& si);

// Derived fields from the raw integrals.
Functionals assemble_functionals(const Params& P, double eps_weight, double norm2_sq, double normq_q,
                                 double normp_p, double d_alpha, double grad_sq);
// Functionals of u(x / b) from those of u, with eps_weight replaced.
Functionals dilate(const Functionals& F, double b, const Params& P, double eps_weight);

double rayleigh(const RadialFunction& u, const Params& P);

struct EulerLagrange {
    double A = 0, B = 0, C = 0;
};
EulerLagrange euler_lagrange_coefficients(const Functionals& F, const Params& P);

struct MaximizerScaling {
    double lambda = 1;  // amplitude
    double mu = 1;      // v(x) = lambda u(mu x)
};
MaximizerScaling maximizer_scaling(const Functionals& F, const Params& P);
RadialFunction normalize_maximizer(const RadialFunction& u, const Params& P);
// v(x) = u(lambda_inf^{-1/alpha} x) turns a solution of the lambda-weighted equation into one of TF.
RadialFunction normalize_flow_stationary(const RadialFunction& u, double lambda_inf, const Params& P);

struct SigmaRelations {
    double sigma_from_q = 0;
    double sigma_from_C = 0;
    double ratio_check = 0;  // 1 on ground states
    double gap() const;      // |sigma_from_q - sigma_from_C| / sigma_from_q
};
SigmaRelations sigma_relations(const Functionals& F, const Params& P);

struct TFResidual {
    double linf = 0;
    double l2 = 0;
    int points = 0;
};
constexpr double kSupportThreshold = 1e-8;
TFResidual tf_residual(const RadialFunction& u, const Params& P);
TFResidual tf_residual(const RadialFunction& u, const Params& P, const SelfInteraction& si);

enum class Classification { full_support_smooth, compact_continuous, compact_jump };
std::string to_string(Classification c);
// Expected class from p alone.
Classification expected_classification(const Params& P);

struct GroundStateReport {
    Params params;
    Functionals functionals;
    double sigma_star_est = 0;
    std::optional<double> support_radius;  // empty: unbounded support
    std::optional<double> jump_lambda;
    bool jump_low_confidence = false;
    double center_value = 0;
    double decay_exponent = 0, decay_coefficient = 0, decay_predicted = 0;
    bool decay_fitted = false;
    double residual_linf = 0, residual_l2 = 0;
    Classification classification = Classification::full_support_smooth;
    SigmaRelations sigma;
    double lambda_inf = 1;
    bool converged = false;
    long steps = 0;
    double pseudo_time = 0;
    long clip_events = 0;
    long late_clip_events = 0;  // in the final half of the run
    std::string init;
};

}  // namespace tfgs
