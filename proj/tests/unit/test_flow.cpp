#include "oracles.hpp"
#include "tfgs/errors.hpp"
#include "tfgs/flow.hpp"
#include "tfgs/riesz.hpp"

#include <doctest.h>

using namespace tfgs;

namespace {

// amp * v(x / width) sampled on g, with the r^{-(N+1)} tail.
RadialFunction explicit_on(const GridPtr& g, int N, double amp, double width) {
    std::vector<double> v(g->M() + 1);
    for (int i = 0; i <= g->M(); ++i) v[i] = amp * oracle::v(N, g->node(i) / width);
    double L = g->L();
    return RadialFunction(g, std::move(v), N, TailModel::power(N + 1.0, amp * oracle::v(N, L / width) * std::pow(L, N + 1.0)));
}

FlowConfig gaussian_config() {
    FlowConfig cfg;
    cfg.init = InitKind::gaussian;
    return cfg;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("lambda multiplier") {
    Params P = explicit_family_params(3, 1.0);
    auto s = oracle::explicit_solution(3, 1.0);
    auto g = make_grid(50.0, 512, Clustering::origin_boundary);
    CHECK(lambda_multiplier(explicit_on(g, 3, s.amp, s.width), P) == doctest::Approx(1.0).epsilon(1e-6));
    // u(x) = w(b x) carries the multiplier b^alpha
    for (double b : {0.5, 2.0})
        CHECK(lambda_multiplier(explicit_on(g, 3, s.amp, s.width / b), P) ==
              doctest::Approx(std::pow(b, P.alpha)).epsilon(1e-5));
}

TEST_CASE("a step from the solution barely moves it") {
    Params P = explicit_family_params(3, 1.0);
    auto s = oracle::explicit_solution(3, 1.0);
    auto g = make_grid(50.0, 512, Clustering::origin_boundary);
    auto w = explicit_on(g, 3, s.amp, s.width);
    auto st = make_state(w, P, 0.0);
    FlowConfig cfg;
    auto info = step(st, cfg, P);
    CHECK(info.residual < 1e-5);
    CHECK(l2_distance(st.u, w) < 1e-5 * std::sqrt(lp_norm_pow(w, 2.0)));
    CHECK(st.steps == 1);
    CHECK(st.time > 0);
}

TEST_CASE("gaussian start converges to the explicit solution") {
    Params P{3, 1.0, 1.5, 2.5};
    auto res = solve(gaussian_config(), P);
    CHECK(res.report.converged);
    CHECK(res.report.classification == Classification::full_support_smooth);
    CHECK(!res.report.support_radius);
    auto s = oracle::explicit_solution(3, 1.0);
    auto ref = explicit_on(res.u.grid_ptr(), 3, s.amp, s.width);
    CHECK(l2_distance(res.u, ref) / std::sqrt(lp_norm_pow(ref, 2.0)) < 1e-3);
    CHECK(std::abs(res.report.functionals.nehari_rel()) < 1e-6);
    CHECK(std::abs(res.report.functionals.pohozaev_rel()) < 1e-6);
    REQUIRE(!res.history.empty());
    for (size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i].step > res.history[i - 1].step);
}

TEST_CASE("compact support with a jump for p > 2") {
    Params P{3, 2.5, 4.0, 8.0};
    auto res = solve(gaussian_config(), P);
    CHECK(res.report.converged);
    CHECK(res.report.classification == Classification::compact_jump);
    REQUIRE(res.report.support_radius);
    REQUIRE(res.report.jump_lambda);
    double ls = oracle::lambda_star(4.0, 8.0);
    CHECK(*res.report.jump_lambda >= ls * (1 - 1e-3));
    // jump h = lambda_* (q/2)^{1/(q-2)}
    CHECK(*res.report.jump_lambda == doctest::Approx(ls * std::pow(4.0, 1.0 / 6)).epsilon(1e-3));
    CHECK(std::abs(res.report.functionals.pohozaev_rel()) < 1e-6);
    CHECK(res.report.residual_linf < 1e-4);
}

TEST_CASE("one-dimensional jump") {
    Params P{1, 0.5, 2.5, 4.0};
    auto res = solve(gaussian_config(), P);
    CHECK(res.report.converged);
    REQUIRE(res.report.jump_lambda);
    CHECK(*res.report.jump_lambda > oracle::lambda_star(2.5, 4.0));
    CHECK(*res.report.jump_lambda == doctest::Approx(std::sqrt(2.0 / 3)).epsilon(1e-3));
}

TEST_CASE("zero-weight sweep reproduces the plain solve") {
    Params P{3, 1.0, 1.5, 2.5};
    auto cfg = gaussian_config();
    auto plain = solve(cfg, P);
    SolveResult ref;
    auto rows = epsilon_sweep_weights(cfg, P, {0.0}, &ref);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].converged);
    CHECK(rows[0].grad_term == 0.0);
    CHECK(l2_distance(ref.u, plain.u) < 1e-12);
    CHECK(rows[0].sigma_eps == doctest::Approx(plain.report.sigma_star_est).epsilon(1e-9));
}

TEST_CASE("thomas-fermi limit regimes") {
    CHECK(tf_limit_regime(Params{3, 2.0, 2.5, 6.0}) == 1);
    CHECK(tf_limit_regime(Params{3, 1.0, 1.5, 2.5}) == 2);
    auto cfg = gaussian_config();
    CHECK_THROWS_AS(epsilon_sweep(cfg, Params{3, 2.0, 2.5, 6.0}, {1.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(epsilon_sweep(cfg, Params{3, 1.0, 1.5, 2.5}, {0.5, 1.0}), ConfigError);
    CHECK_THROWS_AS(epsilon_sweep(cfg, Params{3, 1.0, 1.5, 2.5}, {1.0, -0.5}), ConfigError);
    CHECK_THROWS_AS(epsilon_sweep_weights(cfg, Params{3, 1.0, 1.5, 2.5}, {0.1, 0.2}), ConfigError);
}

TEST_CASE("configuration checks") {
    FlowConfig ok;
    CHECK_NOTHROW(validate(ok));
    auto bad = [](auto mutate) {
        FlowConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(validate(bad([](FlowConfig& c) { c.dt0 = 0; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](FlowConfig& c) { c.stall_tol = 2; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](FlowConfig& c) { c.grid.M = 8; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](FlowConfig& c) { c.grid.L = -1; })), ConfigError);
    CHECK_THROWS_AS(validate(bad([](FlowConfig& c) { c.init = InitKind::file; })), ConfigError);
    CHECK(init_from_string("ansatz") == InitKind::explicit_family_ansatz);
    CHECK(to_string(init_from_string("ball")) == "ball-indicator");
    CHECK_THROWS_AS(init_from_string("sphere"), ConfigError);
    CHECK_THROWS_AS(solve(ok, Params{3, 1.0, 1.2, 2.5}), ConfigError);
}

}
