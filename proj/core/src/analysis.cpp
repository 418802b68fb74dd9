#include "tfgs/analysis.hpp"

#include "tfgs/errors.hpp"
#include "tfgs/riesz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace tfgs {

namespace {

// Quadratic through (x_i, y_i), i = 0..2, evaluated at x.
double quadratic_at(const double* x, const double* y, double t) {
    double w[3];
    lagrange_weights(x, 3, t, w);
    return w[0] * y[0] + w[1] * y[1] + w[2] * y[2];
}

// Least-squares quadratic in (x - t) over n points, value at t.
double lsq_quadratic_at(const double* x, const double* y, int n, double t) {
    double S[3][4] = {};
    for (int i = 0; i < n; ++i) {
        double d = x[i] - t, b[3] = {1, d, d * d};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) S[r][c] += b[r] * b[c];
            S[r][3] += b[r] * y[i];
        }
    }
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(S[r][k]) > std::abs(S[piv][k])) piv = r;
        std::swap(S[k], S[piv]);
        if (S[k][k] == 0) throw FitError("edge fit: singular normal equations");
        for (int r = 0; r < 3; ++r) {
            if (r == k) continue;
            double f = S[r][k] / S[k][k];
            for (int c = k; c < 4; ++c) S[r][c] -= f * S[k][c];
        }
    }
    return S[0][3] / S[0][0];
}

// int (1 + r^2)^{-s(N+1)/2} over R^N
double explicit_norm(int N, double s) {
    double e = 0.5 * s * (N + 1);
    return std::pow(M_PI, 0.5 * N) * std::tgamma(e - 0.5 * N) / std::tgamma(e);
}

double explicit_d_alpha(int N, double a) {
    return std::pow(M_PI, 0.5 * N) * N * (N + a + 2) / std::pow(2.0, a + 2) * std::tgamma(0.5 * (N - a)) *
           std::tgamma(0.5 * N + 1) / (std::tgamma(0.5 * (N + a) + 1) * std::tgamma(N + 2.0));
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

SupportInfo extract_support(const RadialFunction& u, double threshold_frac) {
    if (!(threshold_frac > 0 && threshold_frac < 1)) throw ConfigError("threshold_frac must be in (0,1)");
    SupportInfo s;
    const auto& v = u.values();
    const int M = u.grid().M();
    double u0 = v[0];
    if (!(u0 > 0)) throw DegenerateError("extract_support: u(0) must be positive");
    double thr = threshold_frac * u0;
    if (u.tail().algebraic() && u.tail()(u.grid().L()) > thr) {
        s.index = M;
        return s;
    }
    int k = M;
    while (k > 0 && !(v[k] > thr)) --k;
    s.index = k;
    const double R = u.grid().node(k);
    s.radius = R;
    if (k < 2) {
        s.jump = v[k];
        s.low_confidence = true;
        return s;
    }
    const auto& r = u.grid().nodes();
    // oscillating edge data: widen to a least-squares fit over five nodes
    int lo = std::max(0, k - 4);
    bool oscillating = false;
    for (int i = lo; i < k; ++i)
        if (v[i + 1] > v[i]) oscillating = true;
    if (oscillating && k >= 4) {
        s.jump = lsq_quadratic_at(&r[k - 4], &v[k - 4], 5, R);
        s.low_confidence = true;
    } else {
        s.jump = quadratic_at(&r[k - 2], &v[k - 2], R);
        s.low_confidence = oscillating;
    }
    return s;
}

Classification classify(const RadialFunction& u, const SupportInfo& s) {
    if (!s.radius) return Classification::full_support_smooth;
    double u0 = u.values()[0];
    double edge = s.jump ? *s.jump : u.values()[s.index];
    return edge > 0.1 * u0 ? Classification::compact_jump : Classification::compact_continuous;
}

SupportBounds support_bounds(const GroundStateReport& report, const Params& P) {
    validate(P);
    if (!(P.p > 2)) throw DomainError("support_bounds: needs p > 2");
    if (!report.support_radius) throw DomainError("support_bounds: the state has unbounded support");
    const double N = P.N, a = P.alpha, p = P.p, q = P.q;
    const double R = *report.support_radius, sigma = report.sigma_star_est;
    SupportBounds b;
    b.measured_volume = ball_volume(P.N, R);
    double k = 2 * (N * p - N - a) * q / (a * (q - 2));
    b.upper_volume = std::pow(lambda_star(P), -q) * k * sigma;
    b.upper_ok = b.measured_volume <= b.upper_volume;
    if (q > 2 * p) {
        b.lower_lhs = b.measured_volume * std::pow(R, a * q / (q - 2 * p));
        b.lower_rhs = k * std::pow(riesz_constant(P) * sphere_area(P.N) / a, -q / (q - 2 * p)) * sigma;
        b.lower_ok = *b.lower_lhs >= *b.lower_rhs;
    } else {
        b.lower_skipped = "lower bound needs q > 2p";
    }
    return b;
}

double sharp_constant_estimate(const RadialFunction& u, const Params& P) { return rayleigh(u, P); }

DecayReport decay_report(const RadialFunction& u, const Params& P, double normp_p, double window) {
    if (!(P.p < 2)) throw DomainError("decay_report: algebraic decay applies to p < 2 only");
    DecayReport d;
    d.exponent_expected = (P.N - P.alpha) / (2 - P.p);
    TailFit f = fit_tail(u, window);
    d.exponent_fit = f.exponent;
    d.coefficient_fit = f.coefficient;
    d.r_min = f.r_min;
    d.r_max = f.r_max;
    d.coefficient_predicted = std::pow(riesz_constant(P) * normp_p, 1.0 / (2 - P.p));
    d.exponent_gap = rel(d.exponent_fit, d.exponent_expected);
    d.coefficient_gap = rel(d.coefficient_fit, d.coefficient_predicted);
    return d;
}

DecayReport decay_report(const RadialFunction& u, const Params& P, double window) {
    return decay_report(u, P, lp_norm_pow(u, P.p), window);
}

GroundStateReport build_report(const RadialFunction& v, const Params& P, const Functionals& F, const TFResidual& res) {
    GroundStateReport r;
    r.params = P;
    r.functionals = F;
    r.sigma_star_est = F.eps_weight > 0 ? F.j_eps : F.energy_E;
    r.center_value = v.values()[0];
    r.residual_linf = res.linf;
    r.residual_l2 = res.l2;
    r.sigma = sigma_relations(F, P);
    SupportInfo s = extract_support(v);
    r.support_radius = s.radius;
    if (P.p > 2 && s.jump) {
        r.jump_lambda = s.jump;
        r.jump_low_confidence = s.low_confidence;
    }
    r.classification = classify(v, s);
    if (P.p < 2 && v.tail().algebraic()) {
        DecayReport d = decay_report(v, P, F.normp_p, 0.2);
        r.decay_exponent = d.exponent_fit;
        r.decay_coefficient = d.coefficient_fit;
        r.decay_predicted = d.coefficient_predicted;
        r.decay_fitted = true;
    }
    return r;
}

ExplicitFamilyRecord explicit_family_suite(int N, double alpha, double r1, double r2, int M, double L) {
    ExplicitFamilyRecord rec;
    Params P = explicit_family_params(N, alpha);
    validate(P);
    rec.params = P;
    if (!(r1 > 0 && r2 > r1 && r2 < L)) throw ConfigError("explicit_family_suite: need 0 < r1 < r2 < L");
    auto g = make_grid(L, M, Clustering::uniform);
    std::vector<double> vals(M + 1);
    for (int i = 0; i <= M; ++i) vals[i] = std::pow(1 + g->node(i) * g->node(i), -0.5 * (N + 1));
    TailModel tail = TailModel::power(N + 1.0, vals[M] * std::pow(L, N + 1.0));
    RadialFunction v(g, vals, N, tail);

    // 2x2 system c1 v + c2 v^{q-1} = (I * v^p) v^{p-1} at r1, r2
    RadialFunction rho = v.power(P.p);
    std::vector<double> pot = potential_at(rho, P, {r1, r2});
    auto prof = [&](double r) { return std::pow(1 + r * r, -0.5 * (N + 1)); };
    double a11 = prof(r1), a12 = std::pow(prof(r1), P.q - 1), a21 = prof(r2), a22 = std::pow(prof(r2), P.q - 1);
    double b1 = pot[0] * std::pow(prof(r1), P.p - 1), b2 = pot[1] * std::pow(prof(r2), P.p - 1);
    double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-14 * std::abs(a11 * a22)) throw DegenerateError("explicit_family_suite: singular system");
    rec.c1 = (b1 * a22 - b2 * a12) / det;
    rec.c2 = (a11 * b2 - a21 * b1) / det;
    double K = std::pow(2.0, -1 - alpha) * std::tgamma(0.5 * (N - alpha)) / std::tgamma(0.5 * (N + alpha + 2));
    rec.c1_exact = alpha * K;
    rec.c2_exact = (N - alpha) * K;

    rec.norm2_exact = explicit_norm(N, 2);
    rec.normq_exact = explicit_norm(N, P.q);
    rec.d_alpha_exact = explicit_d_alpha(N, alpha);
    SelfInteraction si = self_interaction(v, P);
    rec.norm2_rel = rel(lp_norm_pow(v, 2), rec.norm2_exact);
    rec.normq_rel = rel(lp_norm_pow(v, P.q), rec.normq_exact);
    rec.d_alpha_rel = rel(si.d_alpha, rec.d_alpha_exact);
    for (int i = 0; i <= M; ++i) {
        double r = g->node(i);
        if (r > 10.0) break;
        rec.potential_rel = std::max(rec.potential_rel, rel(si.field.values[i], closed_form_explicit_family(r, P)));
    }

    rec.a = std::pow(rec.c2 / rec.c1, 1.0 / (P.q - 2));
    rec.b = std::pow(std::pow(rec.a, 2 - 2 * P.p) / rec.c1, 1.0 / alpha);
    RadialFunction u = v.scaled(rec.a).dilated(rec.b);
    SelfInteraction su = self_interaction(u, P);
    Functionals F = evaluate_all(u, P, 0.0, su);
    rec.residual_linf = tf_residual(u, P, su).linf;
    rec.nehari_rel = F.nehari_rel();
    rec.pohozaev_rel = F.pohozaev_rel();
    rec.rayleigh = F.rayleigh_R;
    rec.c_estimate = explicit_family_constant(N, alpha);
    const double tol = 1e-6;
    rec.pass = rec.norm2_rel <= tol && rec.normq_rel <= tol && rec.d_alpha_rel <= tol && rec.potential_rel <= tol &&
               rec.residual_linf <= tol && rec.nehari_rel <= tol && rec.pohozaev_rel <= tol &&
               rel(rec.rayleigh, rec.c_estimate) <= 1e-4;
    return rec;
}

std::vector<SweepRecord> alpha_sweep(const FlowConfig& cfg, const Params& base, const std::vector<double>& alphas,
                                     int jobs) {
    std::vector<Params> ps;
    for (double a : alphas) {
        Params P = base;
        P.alpha = a;
        validate(P);
        ps.push_back(P);
    }
    std::vector<SweepRecord> out(ps.size());
    std::vector<std::exception_ptr> errs(ps.size());
    auto one = [&](size_t i) {
        try {
            SolveResult r = solve(cfg, ps[i], 0.0);
            SweepRecord& s = out[i];
            s.parameter = "alpha";
            s.value = ps[i].alpha;
            s.report = r.report;
            s.C_est = r.report.functionals.rayleigh_R;
            s.R_star = r.report.support_radius ? *r.report.support_radius : std::numeric_limits<double>::infinity();
            s.sigma_star_est = r.report.sigma_star_est;
        } catch (...) {
            errs[i] = std::current_exception();
        }
    };
    int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(ps.size())));
    if (nthreads == 1) {
        for (size_t i = 0; i < ps.size(); ++i) one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i; (i = next++) < ps.size();) one(i);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

bool strictly_monotone(const std::vector<double>& v, int direction) {
    if (direction != 1 && direction != -1) throw ConfigError("strictly_monotone: direction must be +1 or -1");
    for (size_t i = 1; i < v.size(); ++i)
        if (!(direction * (v[i] - v[i - 1]) > 0)) return false;
    return true;
}

}  // namespace tfgs
