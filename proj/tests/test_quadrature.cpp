#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gf/quadrature.hpp"

using namespace gf::quad;

TEST_CASE("gauss16 integrates degree-31 polynomials exactly") {
    // x^k on [0, 1]
    for (int k : {0, 1, 7, 15, 25, 31}) {
        const double got = gauss16([&](double x) { return std::pow(x, k); }, 0.0, 1.0);
        CHECK(got == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
}

TEST_CASE("graded panels resolve endpoint power singularities") {
    QuadConfig cfg;
    // ∫_0^{1/2} s^(-0.7) ds = (1/2)^0.3 / 0.3
    auto r = integrate_graded([](double s) { return std::pow(s, -0.7); }, 0.0, 0.5, cfg);
    CHECK_FALSE(r.diverged);
    CHECK(r.value == doctest::Approx(std::pow(0.5, 0.3) / 0.3).epsilon(1e-12));

    // singularity at the upper end: ∫_0^1 (1-s)^(-0.5) ds = 2
    r = integrate_graded([](double s) { return std::pow(1.0 - s, -0.5); }, 0.0, 1.0, cfg);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("smooth integrands meet the default tolerance with early exit") {
    auto r = integrate_graded([](double s) { return std::exp(-s) * std::cos(3 * s); }, 0.0, 2.0);
    const double exact = (3 * std::sin(6.0) - std::cos(6.0)) * std::exp(-2.0) / 10.0 + 0.1;
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
    CHECK(r.evals < 20000);
}

TEST_CASE("near-threshold exponents are still classified finite") {
    // s^(-0.99): finite but very slowly convergent toward 0.
    auto r = probe_lower_end([](double s) { return std::pow(s, -0.99); }, 0.0, 0.5);
    CHECK_FALSE(r.diverged);
    CHECK(r.value == doctest::Approx(std::pow(0.5, 0.01) / 0.01).epsilon(1e-4));
}

TEST_CASE("divergence detector flags power and log divergences") {
    auto r = probe_lower_end([](double s) { return std::pow(s, -1.3); }, 0.0, 0.5);
    CHECK(r.diverged);

    r = probe_lower_end([](double s) { return 1.0 / s; }, 0.0, 0.5);
    CHECK(r.diverged);
}

TEST_CASE("zero integrand terminates with zero value") {
    auto r = integrate_graded([](double) { return 0.0; }, 0.0, 0.5);
    CHECK(r.value == 0.0);
    CHECK_FALSE(r.diverged);
}

TEST_CASE("fixed graded rule matches the adaptive engine on a singular moment") {
    const auto rule = FixedGradedRule::build(0.5);
    std::vector<double> f(rule.nodes.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(rule.nodes[i], -0.75);
    const double got = rule.apply(f);
    const double exact = std::pow(0.5, 0.25) / 0.25;
    CHECK(got == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("quadrature results are bit-identical across reruns") {
    auto f = [](double s) { return std::pow(s, -0.4) * std::cos(s); };
    const auto a = integrate_graded(f, 0.0, 0.5);
    const auto b = integrate_graded(f, 0.0, 0.5);
    CHECK(a.value == b.value);
    CHECK(a.est_error == b.est_error);
}
