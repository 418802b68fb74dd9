#pragma once

#include <string>

namespace tfgs {

struct Params {
    int N = 3;
    double alpha = 1.0;
    double p = 1.5;
    double q = 2.5;
};

// Throws ConfigError naming the first violated inequality.
void validate(const Params& P);
bool admissible(const Params& P);

double theta(const Params& P);
double nu(const Params& P);

double gamma_fn(double x);
double rgamma(double x);  // 1/Gamma, zero at the poles
double digamma(double x);

// Gauss hypergeometric 2F1(a,b;c;z) for z in [0,1].
double hyp2f1(double a, double b, double c, double z);

// 2F1 with fixed (a,b,c); transformation coefficients are precomputed.
// eval() takes z and 1-z separately so callers can pass an accurate complement.
class Hyp2F1 {
public:
    Hyp2F1(double a, double b, double c);
    double operator()(double z) const { return eval(z, 1.0 - z); }
    double eval(double z, double omz) const;
    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }

private:
    double near_z1(double omz) const;
    double generic_z1(double d, double omz) const;
    double integer_z1(int m, double omz) const;

    double a_, b_, c_;
    double d_;              // c - a - b
    bool terminating_ = false;
    int m_ = 0;             // nearest integer to d
    bool integer_d_ = false;
    bool near_integer_ = false;
    double g1_ = 0, g2_ = 0;  // generic connection prefactors
};

double sphere_area(int N);  // omega_N = 2 pi^{N/2} / Gamma(N/2)
double ball_volume(int N, double R);

double riesz_constant(const Params& P);
double riesz_constant(int N, double alpha);
double hls_constant(const Params& P);
double hls_constant(int N, double alpha);
// A_alpha^{-1} * C_{N,alpha}, evaluated without the Gamma((N-alpha)/2) pole.
double hls_over_riesz(int N, double alpha);
double lambda_star(const Params& P);
double theta_star(const Params& P);
// Value of the explicit family quotient, p=(N+a+2)/(N+1), q=2(N+2)/(N+1).
double explicit_family_constant(int N, double alpha);

struct NamedConstants {
    double riesz_A = 0;
    double hls_C = 0;
    double hls_over_A = 0;
    double lambda_star = 0;  // NaN when p < 2
    double theta = 0;
    double theta_star = 0;
    double nu = 0;
    double omega_N = 0;
    bool ill_conditioned = false;  // alpha within 1e-6 of N
};

// Cached per Params; thread safe.
const NamedConstants& constants(const Params& P);

std::string describe(const Params& P);

}  // namespace tfgs
