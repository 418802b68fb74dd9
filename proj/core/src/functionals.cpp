#include "tfgs/functionals.hpp"

#include "tfgs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfgs {

double Functionals::nehari_rel() const {
    return norm2_sq > 0 ? std::abs(nehari_res) / norm2_sq : 0.0;
}

double Functionals::pohozaev_rel() const {
    return energy_E != 0 ? std::abs(pohozaev_P) / (N * std::abs(energy_E)) : 0.0;
}

double Functionals::pohozaev_eps_rel() const {
    return j_eps != 0 ? std::abs(pohozaev_Peps) / (N * std::abs(j_eps)) : 0.0;
}

double pairing(const RadialFunction& f, const PotentialField& gf, double g_mass, const Params& P) {
    const RadialGrid& g = f.grid();
    if (gf.grid->nodes() != g.nodes()) throw ConfigError("pairing: profile and field live on different grids");
    const int N = P.N;
    std::vector<double> fs = f.samples();
    std::vector<double> is = gf.samples();
    const std::vector<double>& m = g.measure(N);
    double acc = 0;
    for (size_t i = 0; i < fs.size(); ++i) acc += m[i] * fs[i] * is[i];
    if (f.tail().algebraic()) {
        if (gf.tail_r.empty()) throw ConfigError("pairing: field lacks values beyond L");
        for (size_t i = 0; i < gf.tail_r.size(); ++i) {
            double r = gf.tail_r[i];
            acc += gf.tail_w[i] * std::pow(r, N - 1) * f.tail()(r) * gf.tail_values[i];
        }
        // beyond the tail panels the field is A * mass * r^{a-N}
        double beta = f.tail().exponent;
        if (beta <= P.alpha) throw DivergenceError("pairing: tail decays too slowly");
        double S = gf.tail_end;
        acc += riesz_constant(P) * g_mass * f.tail().coefficient * std::pow(S, P.alpha - beta) / (beta - P.alpha);
    }
    return sphere_area(N) * acc;
}

SelfInteraction self_interaction(const RadialFunction& u, const Params& P) {
    SelfInteraction si;
    si.rho = u.power(P.p);
    si.field = potential(si.rho, P, KernelMethod::automatic, u.tail().algebraic());
    si.mass = lp_norm_pow(si.rho, 1.0);
    si.d_alpha = pairing(si.rho, si.field, si.mass, P);
    return si;
}

double interaction_energy(const RadialFunction& f, const RadialFunction& g, const Params& P) {
    bool tails = f.tail().algebraic() || g.tail().algebraic();
    PotentialField fg = potential(g, P, KernelMethod::automatic, tails);
    double mg = lp_norm_pow(g, 1.0);
    double d1 = pairing(f, fg, mg, P);
    if (&f == &g || (f.values() == g.values() && f.grid().nodes() == g.grid().nodes() &&
                     f.tail().coefficient == g.tail().coefficient && f.tail().exponent == g.tail().exponent))
        return d1;
    PotentialField ff = potential(f, P, KernelMethod::automatic, tails);
    double mf = lp_norm_pow(f, 1.0);
    return 0.5 * (d1 + pairing(g, ff, mf, P));
}

Functionals evaluate_all(const RadialFunction& u, const Params& P, double eps_weight) {
    return evaluate_all(u, P, eps_weight, self_interaction(u, P));
}

Functionals evaluate_all(const RadialFunction& u, const Params& P, double eps_weight, const SelfInteraction& si) {
    validate(P);
    if (eps_weight < 0) throw ConfigError("eps_weight must be nonnegative");
    return assemble_functionals(P, eps_weight, lp_norm_pow(u, 2.0), lp_norm_pow(u, P.q), si.mass, si.d_alpha,
                                eps_weight > 0 ? grad_sq(u) : 0.0);
}

Functionals assemble_functionals(const Params& P, double eps_weight, double norm2_sq, double normq_q,
                                 double normp_p, double d_alpha, double grad) {
    const double N = P.N, a = P.alpha, p = P.p, q = P.q;
    Functionals F;
    F.N = P.N;
    F.eps_weight = eps_weight;
    F.norm2_sq = norm2_sq;
    F.normq_q = normq_q;
    F.normp_p = normp_p;
    F.d_alpha = d_alpha;
    F.energy_E = 0.5 * F.norm2_sq + F.normq_q / q - F.d_alpha / (2 * p);
    F.pohozaev_P = 0.5 * N * F.norm2_sq + N / q * F.normq_q - (N + a) / (2 * p) * F.d_alpha;
    if (F.norm2_sq > 0 && F.normq_q > 0) {
        double th = theta(P);
        F.rayleigh_R = F.d_alpha / (std::pow(F.norm2_sq, p * th) * std::pow(F.normq_q, 2 * p * (1 - th) / q));
        F.rayleigh_defined = true;
    } else {
        F.rayleigh_R = std::nan("");
    }
    F.grad_sq = eps_weight > 0 ? grad : 0.0;
    F.nehari_res = eps_weight * F.grad_sq + F.norm2_sq + F.normq_q - F.d_alpha;
    F.j_eps = 0.5 * eps_weight * F.grad_sq + F.energy_E;
    F.pohozaev_Peps = 0.5 * (N - 2) * eps_weight * F.grad_sq + F.pohozaev_P;
    return F;
}

Functionals dilate(const Functionals& F, double b, const Params& P, double eps_weight) {
    double bn = std::pow(b, P.N);
    return assemble_functionals(P, eps_weight, bn * F.norm2_sq, bn * F.normq_q, bn * F.normp_p,
                                bn * std::pow(b, P.alpha) * F.d_alpha, bn / (b * b) * F.grad_sq);
}

double rayleigh(const RadialFunction& u, const Params& P) {
    Functionals F = evaluate_all(u, P, 0.0);
    if (!F.rayleigh_defined) throw DegenerateError("rayleigh: zero profile");
    return F.rayleigh_R;
}

EulerLagrange euler_lagrange_coefficients(const Functionals& F, const Params& P) {
    if (!(F.norm2_sq > 0 && F.normq_q > 0 && F.d_alpha > 0))
        throw DegenerateError("euler_lagrange_coefficients: zero norm");
    double th = theta(P);
    return {2 * P.p * th / F.norm2_sq, 2 * P.p * (1 - th) / F.normq_q, 2 * P.p / F.d_alpha};
}

MaximizerScaling maximizer_scaling(const Functionals& F, const Params& P) {
    if (!(F.norm2_sq > 0 && F.normq_q > 0 && F.d_alpha > 0))
        throw DegenerateError("normalize_maximizer: zero norm");
    double th = theta(P);
    MaximizerScaling s;
    s.lambda = std::pow((1 - th) / th * F.norm2_sq / F.normq_q, 1.0 / (P.q - 2));
    s.mu = std::pow((1 - th) / std::pow(s.lambda, P.q - 2 * P.p) * F.d_alpha / F.normq_q, 1.0 / P.alpha);
    return s;
}

RadialFunction normalize_maximizer(const RadialFunction& u, const Params& P) {
    MaximizerScaling s = maximizer_scaling(evaluate_all(u, P), P);
    return u.scaled(s.lambda).dilated(1.0 / s.mu);
}

RadialFunction normalize_flow_stationary(const RadialFunction& u, double lambda_inf, const Params& P) {
    if (!(lambda_inf > 0) || !std::isfinite(lambda_inf))
        throw DomainError("normalize_flow_stationary: lambda_inf must be positive");
    return u.dilated(std::pow(lambda_inf, 1.0 / P.alpha));
}

double SigmaRelations::gap() const {
    return std::abs(sigma_from_q - sigma_from_C) / std::abs(sigma_from_q);
}

SigmaRelations sigma_relations(const Functionals& F, const Params& P) {
    const double N = P.N, a = P.alpha, p = P.p, q = P.q;
    SigmaRelations s;
    s.sigma_from_q = a * (q - 2) / (2 * (N * p - N - a) * q) * F.normq_q;
    s.sigma_from_C = a * std::pow(2 * N * p, N / a) * std::pow(theta_star(P) / (N + a), (N + a) / a) *
                     std::pow(F.rayleigh_R, -N / a);
    s.ratio_check = F.norm2_sq * q * (N * p - N - a) / (((N + a) * q - 2 * p * N) * F.normq_q);
    return s;
}

TFResidual tf_residual(const RadialFunction& u, const Params& P) {
    return tf_residual(u, P, self_interaction(u, P));
}

TFResidual tf_residual(const RadialFunction& u, const Params& P, const SelfInteraction& si) {
    TFResidual res;
    const auto& v = u.values();
    double umax = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    if (!(umax > 0)) return res;
    const auto& r = u.grid().nodes();
    const int M = u.grid().M();
    double cut = kSupportThreshold * umax;
    double sw = 0, s2 = 0;
    for (int i = 0; i <= M; ++i) {
        if (!(v[i] > cut)) continue;
        double e = v[i] + std::pow(v[i], P.q - 1) - si.field.values[i] * std::pow(v[i], P.p - 1);
        double h = 0.5 * (r[std::min(i + 1, M)] - r[std::max(i - 1, 0)]);
        double w = h * std::pow(std::max(r[i], 0.5 * r[1]), P.N - 1);
        res.linf = std::max(res.linf, std::abs(e));
        s2 += w * e * e;
        sw += w;
        ++res.points;
    }
    res.linf /= umax;
    res.l2 = sw > 0 ? std::sqrt(s2 / sw) / umax : 0.0;
    return res;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::full_support_smooth: return "full-support-smooth";
        case Classification::compact_continuous: return "compact-continuous";
        case Classification::compact_jump: return "compact-jump";
    }
    return "full-support-smooth";
}

Classification expected_classification(const Params& P) {
    if (P.p < 2) return Classification::full_support_smooth;
    if (P.p == 2) return Classification::compact_continuous;
    return Classification::compact_jump;
}

}  // namespace tfgs
