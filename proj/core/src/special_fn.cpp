#include "tfgs/special_fn.hpp"

#include "tfgs/errors.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace tfgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTerms = 100000;
constexpr double kSeriesTol = 1e-16;
// |d - m| below this uses the integer-d formula directly
constexpr double kIntegerTol = 1e-13;
// |d - m| below this interpolates between integer and generic evaluations
constexpr double kNearIntegerTol = 1e-4;

bool is_nonpositive_integer(double x) {
    return x <= 0 && x == std::floor(x);
}

// Plain power series, also used for terminating cases at any z in [0,1].
double series(double a, double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (term == 0.0) break;
        if (std::abs(term) < kSeriesTol * std::abs(sum) && n > 2) break;
    }
    return sum;
}

}  // namespace

void validate(const Params& P) {
    auto fail = [&](const std::string& what) {
        throw ConfigError("inadmissible parameters (" + describe(P) + "): " + what);
    };
    if (P.N < 1) fail("N < 1");
    if (!std::isfinite(P.alpha) || !std::isfinite(P.p) || !std::isfinite(P.q)) fail("non-finite value");
    if (P.alpha <= 0) fail("α ≤ 0");
    if (P.alpha >= P.N) fail("α ≥ N");
    if (P.p <= (P.N + P.alpha) / P.N) fail("p ≤ (N+α)/N");
    if (P.q <= 2.0 * P.N * P.p / (P.N + P.alpha)) fail("q ≤ 2Np/(N+α)");
}

bool admissible(const Params& P) {
    try {
        validate(P);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

double theta(const Params& P) {
    return ((P.N + P.alpha) * P.q - 2.0 * P.N * P.p) / (P.N * P.p * (P.q - 2.0));
}

double nu(const Params& P) {
    return (2.0 * (2.0 * P.p + P.alpha) - P.q * (2.0 + P.alpha)) / (P.alpha * (P.q - 2.0));
}

double gamma_fn(double x) {
    if (!(x > 0)) throw DomainError("gamma_fn: non-positive argument");
    return std::tgamma(x);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

double digamma(double x) {
    return boost::math::digamma(x);
}

Hyp2F1::Hyp2F1(double a, double b, double c) : a_(a), b_(b), c_(c), d_(c - a - b) {
    if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
    terminating_ = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    m_ = static_cast<int>(std::lround(d_));
    double gap = std::abs(d_ - m_);
    integer_d_ = gap < kIntegerTol;
    near_integer_ = !integer_d_ && gap < kNearIntegerTol;
    if (!integer_d_ && !near_integer_) {
        g1_ = std::tgamma(c) * std::tgamma(d_) * rgamma(c - a) * rgamma(c - b);
        g2_ = std::tgamma(c) * std::tgamma(-d_) * rgamma(a) * rgamma(b);
    }
}

double Hyp2F1::eval(double z, double omz) const {
    if (z < 0 || z > 1 || std::isnan(z)) throw DomainError("hyp2f1: z outside [0,1]");
    if (z == 0) return 1.0;
    if (terminating_) return series(a_, b_, c_, z);
    if (omz <= 0) {
        if (d_ > 0) return std::tgamma(c_) * std::tgamma(d_) * rgamma(c_ - a_) * rgamma(c_ - b_);
        throw KernelSingular("hyp2f1: divergent at z = 1 (c - a - b <= 0)");
    }
    if (z <= 0.5) return series(a_, b_, c_, z);
    return near_z1(omz);
}

double Hyp2F1::near_z1(double omz) const {
    if (integer_d_) return integer_z1(m_, omz);
    if (!near_integer_) {
        return g1_ * series(a_, b_, 1.0 - d_, omz) +
               std::pow(omz, d_) * g2_ * series(c_ - a_, c_ - b_, 1.0 + d_, omz);
    }
    // quadratic interpolation in d through m, m+h, m+2h (h on the side of d)
    double h = (d_ > m_ ? 1.0 : -1.0) * kNearIntegerTol;
    double f0 = integer_z1(m_, omz);
    double f1 = generic_z1(m_ + h, omz);
    double f2 = generic_z1(m_ + 2 * h, omz);
    double t = (d_ - m_) / h;
    return f0 + t * (f1 - f0) + 0.5 * t * (t - 1.0) * (f2 - 2 * f1 + f0);
}

// Connection formula with c replaced by a + b + d.
double Hyp2F1::generic_z1(double d, double omz) const {
    double c = a_ + b_ + d;
    double g1 = std::tgamma(c) * std::tgamma(d) * rgamma(c - a_) * rgamma(c - b_);
    double g2 = std::tgamma(c) * std::tgamma(-d) * rgamma(a_) * rgamma(b_);
    return g1 * series(a_, b_, 1.0 - d, omz) +
           std::pow(omz, d) * g2 * series(c - a_, c - b_, 1.0 + d, omz);
}

// Logarithmic connection formulas for c = a + b + m.
double Hyp2F1::integer_z1(int m, double omz) const {
    double a = a_, b = b_;
    double prefactor = 1.0;
    if (m < 0) {
        // Euler transformation maps c - a - b = m to -m.
        prefactor = std::pow(omz, m);
        double c = a + b + m;
        a = c - a_;
        b = c - b_;
        m = -m;
    }
    double c = a + b + m;
    double lw = std::log(omz);
    double result = 0.0;
    if (m > 0) {
        double finite = 0.0, term = 1.0;
        for (int n = 0; n < m; ++n) {
            if (n > 0) term *= (a + n - 1) * (b + n - 1) / (n * (1.0 - m + n - 1)) * omz;
            finite += term;
        }
        result += std::tgamma(m) * std::tgamma(c) * rgamma(a + m) * rgamma(b + m) * finite;
    }
    double pre = std::tgamma(c) * rgamma(a) * rgamma(b);
    if (pre != 0.0) {
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        double wm = std::pow(omz, m);
        double psi1 = digamma(1.0);
        double psim = digamma(m + 1.0);
        double psia = digamma(a + m);
        double psib = digamma(b + m);
        double coef = 1.0 / std::tgamma(m + 1.0);
        double sum = 0.0;
        for (int n = 0; n < kMaxTerms; ++n) {
            double term = coef * (lw - psi1 - psim + psia + psib);
            sum += term;
            if (n > 2 && std::abs(term) < kSeriesTol * std::abs(sum)) break;
            coef *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * omz;
            psi1 += 1.0 / (n + 1.0);
            psim += 1.0 / (n + m + 1.0);
            psia += 1.0 / (a + n + m);
            psib += 1.0 / (b + n + m);
        }
        if (m == 0) {
            result += -pre * sum;
        } else {
            result += -sign * wm * pre * sum;
        }
    }
    return prefactor * result;
}

double hyp2f1(double a, double b, double c, double z) {
    return Hyp2F1(a, b, c)(z);
}

double sphere_area(int N) {
    return 2.0 * std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N);
}

double ball_volume(int N, double R) {
    return sphere_area(N) * std::pow(R, N) / N;
}

double riesz_constant(int N, double alpha) {
    return std::tgamma(0.5 * (N - alpha)) /
           (std::pow(kPi, 0.5 * N) * std::pow(2.0, alpha) * std::tgamma(0.5 * alpha));
}

double riesz_constant(const Params& P) {
    return riesz_constant(P.N, P.alpha);
}

double hls_constant(int N, double alpha) {
    return std::tgamma(0.5 * (N - alpha)) /
           (std::pow(2.0, alpha) * std::pow(kPi, 0.5 * alpha) * std::tgamma(0.5 * (N + alpha))) *
           std::pow(std::tgamma(N) / std::tgamma(0.5 * N), alpha / N);
}

double hls_constant(const Params& P) {
    return hls_constant(P.N, P.alpha);
}

double hls_over_riesz(int N, double alpha) {
    return std::pow(kPi, 0.5 * (N - alpha)) * std::tgamma(0.5 * alpha) /
           std::tgamma(0.5 * (N + alpha)) * std::pow(std::tgamma(N) / std::tgamma(0.5 * N), alpha / N);
}

double lambda_star(const Params& P) {
    if (P.p < 2) throw DomainError("lambda_star: undefined for p < 2");
    if (P.q <= P.p) throw DomainError("lambda_star: requires q > p");
    return std::pow((P.p - 2.0) / (P.q - P.p), 1.0 / (P.q - 2.0));
}

double theta_star(const Params& P) {
    double th = theta(P);
    double q = P.q;
    return std::pow((1.0 - th) / th, q * th / (2.0 * (1.0 - th) + q * th)) * (P.N + P.alpha) /
           (2.0 * P.N * P.p * (1.0 - th));
}

double explicit_family_constant(int N, double alpha) {
    double n = N;
    return n * (n + alpha + 2) / (std::pow(kPi, 0.5 * alpha) * std::pow(2.0, alpha + 1) * (n + 2)) *
           std::tgamma(0.5 * (n - alpha)) / std::tgamma(0.5 * (n + alpha) + 1) *
           std::pow((n + 2) / (2 * (n + 1)) * std::tgamma(n + 1) / std::tgamma(0.5 * n + 1), alpha / n);
}

const NamedConstants& constants(const Params& P) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double, double>, NamedConstants> cache;
    auto key = std::make_tuple(P.N, P.alpha, P.p, P.q);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    NamedConstants c;
    c.riesz_A = riesz_constant(P);
    c.hls_C = hls_constant(P);
    c.hls_over_A = hls_over_riesz(P.N, P.alpha);
    c.lambda_star = (P.p >= 2 && P.q > P.p) ? lambda_star(P) : std::nan("");
    c.theta = theta(P);
    c.theta_star = theta_star(P);
    c.nu = nu(P);
    c.omega_N = sphere_area(P.N);
    c.ill_conditioned = (P.N - P.alpha) < 1e-6;
    return cache.emplace(key, c).first->second;
}

std::string describe(const Params& P) {
    std::ostringstream os;
    os.precision(17);
    os << "N=" << P.N << " alpha=" << P.alpha << " p=" << P.p << " q=" << P.q;
    return os.str();
}

}  // namespace tfgs
