#pragma once
// Test-side reference values. Nothing here calls into tfgs numerics.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

// 2F1 by direct summation in long double; valid for |z| < 1 away from 1.
inline double hyp2f1_series(double a, double b, double c, double z) {
    long double term = 1, sum = 1;
    for (int n = 0; n < 200000; ++n) {
        term *= (a + n) * (long double)(b + n) / ((c + n) * (long double)(n + 1)) * z;
        sum += term;
        if (std::fabs((double)term) < 1e-19 * std::fabs((double)sum) && n > 5) break;
    }
    return (double)sum;
}

inline double gauss_sum(double a, double b, double c) {
    return std::tgamma(c) * std::tgamma(c - a - b) / (std::tgamma(c - a) * std::tgamma(c - b));
}

inline double riesz_A(int N, double a) {
    return std::tgamma(0.5 * (N - a)) / (std::pow(pi, 0.5 * N) * std::pow(2.0, a) * std::tgamma(0.5 * a));
}

inline double hls_C(int N, double a) {
    return std::tgamma(0.5 * (N - a)) / (std::pow(2.0, a) * std::pow(pi, 0.5 * a) * std::tgamma(0.5 * (N + a))) *
           std::pow(std::tgamma(N) / std::tgamma(0.5 * N), a / N);
}

// Potential of the indicator of B_R at |x| <= R, with the series 2F1 above.
inline double ball_inside(int N, double a, double R, double x) {
    double pre = std::tgamma(0.5 * (N - a)) * std::pow(R, a) /
                 (std::pow(2.0, a) * std::tgamma(1 + 0.5 * a) * std::tgamma(0.5 * N));
    double z = (x / R) * (x / R);
    if (z < 0.9) return pre * hyp2f1_series(-0.5 * a, 0.5 * (N - a), 0.5 * N, z);
    // 1 - z transformation (c - a - b = a is not an integer in the cases used).
    double A = -0.5 * a, B = 0.5 * (N - a), C = 0.5 * N;
    double t1 = gauss_sum(A, B, C) * hyp2f1_series(A, B, A + B - C + 1, 1 - z);
    double t2 = std::pow(1 - z, C - A - B) * std::tgamma(C) * std::tgamma(A + B - C) /
                (std::tgamma(A) * std::tgamma(B)) * hyp2f1_series(C - A, C - B, C - A - B + 1, 1 - z);
    return pre * (t1 + t2);
}

// Newtonian ball, N = 3, alpha = 2, any x.
inline double newton_ball(double R, double x) {
    return x <= R ? 0.5 * (R * R - x * x / 3) : R * R * R / (3 * x);
}

// Explicit family v = (1+r^2)^{-(N+1)/2}.
inline double v(int N, double r) { return std::pow(1 + r * r, -0.5 * (N + 1)); }
inline double v_norm2(int N) { return std::pow(pi, 0.5 * N) * std::tgamma(0.5 * N + 1) / std::tgamma(N + 1.0); }
inline double v_normq(int N) { return std::pow(pi, 0.5 * N) * std::tgamma(0.5 * N + 2) / std::tgamma(N + 2.0); }
inline double v_p(int N, double a) { return (N + a + 2.0) / (N + 1.0); }
inline double v_q(int N) { return 2.0 * (N + 2.0) / (N + 1.0); }
inline double v_potential(int N, double a, double x) {
    return std::pow(2.0, -1 - a) * std::tgamma(0.5 * (N - a)) / std::tgamma(0.5 * (N + a + 2)) *
           std::pow(1 + x * x, -1 - 0.5 * N + 0.5 * a) * (N + a * x * x);
}
inline double v_d_alpha(int N, double a) {
    return std::pow(pi, 0.5 * N) * N * (N + a + 2) / std::pow(2.0, a + 2) * std::tgamma(0.5 * (N - a)) *
           std::tgamma(0.5 * N + 1) / (std::tgamma(0.5 * (N + a) + 1) * std::tgamma(N + 2.0));
}
inline double c_estimate(int N, double a) {
    return N * (N + a + 2) / (std::pow(pi, 0.5 * a) * std::pow(2.0, a + 1) * (N + 2)) *
           std::tgamma(0.5 * (N - a)) / std::tgamma(0.5 * (N + a) + 1) *
           std::pow((N + 2.0) / (2 * (N + 1)) * std::tgamma(N + 1.0) / std::tgamma(0.5 * N + 1), a / N);
}

// Rescaled explicit solution u(x) = amp v(x / width) of the TF equation; the coefficients follow
// from the potential identity I*v^p = c1 v^{2-p} + c2 v^{q-p}.
struct Scaled {
    double amp, width;
};
inline Scaled explicit_solution(int N, double a) {
    double K = std::pow(2.0, -1 - a) * std::tgamma(0.5 * (N - a)) / std::tgamma(0.5 * (N + a + 2));
    double c1 = a * K, c2 = (N - a) * K, q = v_q(N), p = v_p(N, a);
    double amp = std::pow(c2 / c1, 1 / (q - 2));
    double width = std::pow(std::pow(amp, 2 - 2 * p) / c1, 1 / a);
    return {amp, width};
}

inline double lambda_star(double p, double q) { return std::pow((p - 2) / (q - p), 1 / (q - 2)); }

// Golden-section minimum of f on [lo, hi].
template <class F>
double golden_min(F f, double lo, double hi, int iters = 200) {
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < iters; ++i) {
        if (f(c) < f(d))
            b = d;
        else
            a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return f(0.5 * (a + b));
}

}  // namespace oracle
