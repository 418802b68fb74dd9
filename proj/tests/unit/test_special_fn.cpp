#include "oracles.hpp"
#include "tfgs/errors.hpp"
#include "tfgs/special_fn.hpp"

#include <doctest.h>

#include <random>

using namespace tfgs;

TEST_SUITE("special_fn") {

TEST_CASE("gamma at integers and half integers") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(oracle::pi)).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("gamma recursion on random arguments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.5, 20.0);
    for (int i = 0; i < 100; ++i) {
        double x = U(rng);
        CHECK(gamma_fn(x + 1) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
    }
}

TEST_CASE("rgamma vanishes at the poles") {
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-3.0) == 0.0);
    CHECK(rgamma(4.0) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("digamma") {
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-13));
    CHECK(digamma(3.5) - digamma(2.5) == doctest::Approx(1 / 2.5).epsilon(1e-13));
}

TEST_CASE("hyp2f1 at z = 0") {
    CHECK(hyp2f1(0.3, -1.7, 2.2, 0.0) == 1.0);
    CHECK(hyp2f1(-0.5, 1.0, 1.5, 0.0) == 1.0);
}

TEST_CASE("hyp2f1 against direct series") {
    // (-a/2, (N-a)/2; N/2; z) with N = 3, a = 2
    CHECK(hyp2f1(-1.0, 0.5, 1.5, 0.25) == doctest::Approx(oracle::hyp2f1_series(-1.0, 0.5, 1.5, 0.25)).epsilon(1e-13));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> A(-2.0, 2.0), C(0.3, 4.0), Z(0.0, 0.9);
    for (int i = 0; i < 200; ++i) {
        double a = A(rng), b = A(rng), c = C(rng), z = Z(rng);
        double ref = oracle::hyp2f1_series(a, b, c, z);
        CHECK(hyp2f1(a, b, c, z) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("hyp2f1 near z = 1 reproduces Gauss summation") {
    struct Case {
        double a, b, c;
    } cases[] = {{-0.25, 1.25, 1.5}, {-1.0, 0.5, 1.5}, {0.2, 0.3, 1.9}, {-0.75, 0.25, 0.5}};
    for (auto [a, b, c] : cases) {
        double lim = oracle::gauss_sum(a, b, c);
        CHECK(hyp2f1(a, b, c, 1.0) == doctest::Approx(lim).epsilon(1e-12));
        CHECK(hyp2f1(a, b, c, 1 - 1e-12) == doctest::Approx(lim).epsilon(1e-5));
    }
}

TEST_CASE("hyp2f1 across the transformation boundary is continuous") {
    for (double a : {-1.25, -0.25, 0.75}) {
        double lo = hyp2f1(a, 1.1, 1.5, 0.5 - 1e-9), hi = hyp2f1(a, 1.1, 1.5, 0.5 + 1e-9);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-8));
        double x = 0.995;
        CHECK(hyp2f1(a, 0.4, 1.5, x) == doctest::Approx(oracle::hyp2f1_series(a, 0.4, 1.5, x)).epsilon(1e-9));
    }
}

TEST_CASE("hyp2f1 integer c - a - b") {
    // c - a - b = 0 and 1 hit the logarithmic connection branch.
    for (double z : {0.6, 0.9, 0.97, 0.99}) {
        CHECK(hyp2f1(0.5, 0.5, 1.0, z) == doctest::Approx(oracle::hyp2f1_series(0.5, 0.5, 1.0, z)).epsilon(1e-9));
        CHECK(hyp2f1(0.5, 1.5, 3.0, z) == doctest::Approx(oracle::hyp2f1_series(0.5, 1.5, 3.0, z)).epsilon(1e-9));
        CHECK(hyp2f1(-0.5, 1.5, 2.0, z) == doctest::Approx(oracle::hyp2f1_series(-0.5, 1.5, 2.0, z)).epsilon(1e-9));
    }
}

TEST_CASE("hyp2f1 divergent at z = 1 signals kernel singularity") {
    CHECK_THROWS_AS(hyp2f1(0.5, 1.0, 1.2, 1.0), KernelSingular);
}

TEST_CASE("hyp2f1 contiguous relation in a") {
    // (c-a)F(a-1) + (2a-c+(b-a)z)F(a) + a(z-1)F(a+1) = 0
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> A(-1.5, 1.5), C(0.5, 3.0), Z(0.0, 0.9);
    for (int i = 0; i < 100; ++i) {
        double a = A(rng), b = A(rng), c = C(rng), z = Z(rng);
        double fm = hyp2f1(a - 1, b, c, z), f0 = hyp2f1(a, b, c, z), fp = hyp2f1(a + 1, b, c, z);
        double lhs = (c - a) * fm + (2 * a - c + (b - a) * z) * f0 + a * (z - 1) * fp;
        double scale = std::abs((c - a) * fm) + std::abs((2 * a - c + (b - a) * z) * f0) + std::abs(a * (z - 1) * fp);
        CHECK(std::abs(lhs) <= 1e-9 * std::max(1.0, scale));
    }
}

TEST_CASE("Hyp2F1 object matches the free function") {
    Hyp2F1 F(-0.75, 1.25, 1.5);
    for (double z : {0.0, 0.3, 0.7, 0.99, 1.0}) CHECK(F(z) == doctest::Approx(hyp2f1(-0.75, 1.25, 1.5, z)).epsilon(1e-14));
}

TEST_CASE("riesz constant") {
    CHECK(riesz_constant(3, 2.0) == doctest::Approx(1 / (4 * oracle::pi)).epsilon(1e-14));
    CHECK(riesz_constant(1, 0.5) == doctest::Approx(1 / std::sqrt(2 * oracle::pi)).epsilon(1e-14));
    for (int N : {1, 2, 3}) {
        double a = N - 1e-3;
        CHECK(riesz_constant(N, a) == doctest::Approx(oracle::riesz_A(N, a)).epsilon(1e-12));
        CHECK(riesz_constant(N, a) > riesz_constant(N, N - 1e-2));  // grows without bound as a -> N
    }
}

TEST_CASE("hls constant") {
    for (int N : {1, 2, 3})
        for (double a : {0.1, 0.5, 0.9 * N}) CHECK(hls_constant(N, a) == doctest::Approx(oracle::hls_C(N, a)).epsilon(1e-13));
    CHECK(hls_constant(3, 1e-8) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hls_constant(3, 2.0) >= oracle::c_estimate(3, 2.0));
    CHECK(hls_over_riesz(3, 3 - 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hls limits are approached monotonically on a log grid") {
    for (int N : {1, 3}) {
        double prev_lo = 0, prev_hi = 1e300;
        for (int k = 1; k <= 8; ++k) {
            double a = N * std::pow(10.0, -k);
            double gap = std::abs(hls_constant(N, a) - 1);
            if (k > 1) CHECK(gap < prev_lo);
            prev_lo = gap;
            double b = N - N * std::pow(10.0, -k);
            double gapN = std::abs(hls_over_riesz(N, b) - 1);
            CHECK(gapN < prev_hi);
            prev_hi = gapN;
        }
    }
}

TEST_CASE("lambda star") {
    CHECK(lambda_star(Params{3, 2, 2, 4}) == 0.0);
    CHECK(lambda_star(Params{3, 2.5, 4, 8}) == doctest::Approx(0.890899).epsilon(1e-6));
    CHECK(lambda_star(Params{1, 0.5, 2.5, 4}) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(lambda_star(Params{3, 1, 1.5, 2.5}), DomainError);
    double q = 8;
    for (double p = 2.1; p < 7.5; p += 0.2) {
        CHECK(lambda_star(Params{3, 2.5, p + 0.1, q}) > lambda_star(Params{3, 2.5, p, q}));
        CHECK(lambda_star(Params{3, 2.5, p, q}) == doctest::Approx(oracle::lambda_star(p, q)).epsilon(1e-14));
    }
}

TEST_CASE("theta and theta star") {
    Params P{3, 1, 1.5, 2.5};
    CHECK(theta(P) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    // min over t of E(w_t) / (|w|_2^{2p theta} |w|_q^{2p(1-theta)})^{N/(N+a)} for w_t = t^{-(N+a)/2p} w(./t)
    for (auto Q : {P, Params{3, 2.5, 4, 8}, Params{1, 0.5, 2.5, 4}, Params{2, 1.2, 2.0, 5.0}}) {
        double th = theta(Q), n = Q.N, a = Q.alpha;
        double e1 = n - (n + a) / Q.p, e2 = n - Q.q * (n + a) / (2 * Q.p);
        for (auto [A, B] : {std::pair{1.0, 1.0}, std::pair{2.3, 0.7}}) {
            auto E = [&](double s) { return 0.5 * A * std::exp(s * e1) + B / Q.q * std::exp(s * e2); };
            double m = oracle::golden_min(E, -30, 30);
            double ref = std::pow(std::pow(A, Q.p * th) * std::pow(B, 2 * Q.p * (1 - th) / Q.q), n / (n + a));
            CHECK(theta_star(Q) == doctest::Approx(m / ref).epsilon(1e-10));
        }
        CHECK(theta_star(Q) > 0);
    }
}

TEST_CASE("theta star limit as alpha -> 0") {
    double p = 2.2, q = 6;
    double bar = std::pow(q * (p - 1) / (q - 2 * p), (q - 2 * p) / (2 * (p - 1) + q - 2 * p)) *
                 ((q - 2 * p) / (2 * q * (p - 1)) + 1 / q);
    CHECK(theta_star(Params{3, 1e-7, p, q}) == doctest::Approx(bar).epsilon(1e-6));
}

TEST_CASE("nu and regimes") {
    Params P{3, 2, 2.5, 6};
    CHECK(nu(P) == doctest::Approx((2 * (2 * 2.5 + 2) - 6 * 4.0) / (2 * 4.0)));
    CHECK(nu(P) < 0);
    CHECK(nu(Params{3, 1, 1.5, 2.5}) > 0);
}

TEST_CASE("admissibility names the violated inequality") {
    CHECK(admissible(Params{3, 1, 1.5, 2.5}));
    auto msg = [](Params P) {
        try {
            validate(P);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(msg(Params{3, 2, 1, 4}).find("p ≤ (N+α)/N") != std::string::npos);
    CHECK(msg(Params{1, 0.25, 2.5, 4}).find("q ≤ 2Np/(N+α)") != std::string::npos);
    CHECK(msg(Params{1, 1.0, 2.5, 4}).find("α") != std::string::npos);
    CHECK(msg(Params{0, 1.0, 2.5, 4}) != "");
}

TEST_CASE("constants cache and explicit family value") {
    Params P{3, 1, 1.5, 2.5};
    const auto& K = constants(P);
    CHECK(&K == &constants(P));
    CHECK(K.theta == doctest::Approx(4.0 / 9.0));
    CHECK(std::isnan(K.lambda_star));
    CHECK(explicit_family_constant(3, 1.0) == doctest::Approx(oracle::c_estimate(3, 1.0)).epsilon(1e-14));
    CHECK(explicit_family_constant(3, 1.0) == doctest::Approx(0.359).epsilon(2e-3));
    CHECK(sphere_area(3) == doctest::Approx(4 * oracle::pi));
    CHECK(ball_volume(3, 2.0) == doctest::Approx(32 * oracle::pi / 3));
}

}
