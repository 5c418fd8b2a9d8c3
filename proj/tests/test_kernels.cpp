#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gf/errors.hpp"
#include "gf/moments.hpp"
#include "gf/rng.hpp"

using namespace gf;
using namespace gf::kernels;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvFourPi = 1.0 / (4.0 * kPi);

// Independent route for lambda_e on the scaled-power family: binomial series
// of ∫ s^-(1+beta) [(1 - m s)^q - 1] ds plus the closed-form a^q moment.
double lambda_scaled_power_series(double k_e, double beta, const RestitutionParams& rp, double q) {
    const double m = rp.a_plus * (1.0 + rp.a_minus);
    double lam = k_e * std::pow(rp.a_plus, 2.0 * q) * std::pow(0.5, q - beta) / (q - beta);
    double binom = 1.0;  // generalized binomial coefficient C(q, j)
    for (int j = 1; j < 400; ++j) {
        binom *= (q - (j - 1)) / j;
        const double term = k_e * binom * std::pow(-m, j) * std::pow(0.5, j - beta) / (j - beta);
        lam += term;
        if (std::fabs(term) < 1e-17 && j > 8) break;
    }
    return lam;
}

}  // namespace

TEST_CASE("restitution parameters satisfy the exact identities") {
    for (double e : {0.25, 0.5, 0.75, 1.0}) {
        const auto rp = RestitutionParams::from_e(e);
        CHECK(rp.a_plus + rp.a_minus == 1.0);
        CHECK(rp.a_plus - rp.a_minus == e);
    }
    CHECK(RestitutionParams::from_e(1.0).a_minus == 0.0);
    CHECK_THROWS_AS(RestitutionParams::from_e(0.0), std::domain_error);
    CHECK_THROWS_AS(RestitutionParams::from_e(1.5), std::domain_error);
}

TEST_CASE("angular evaluation: closed forms and domain errors") {
    const auto c = KernelModel::constant(kInvFourPi);
    CHECK(c.angular(0.5) == doctest::Approx(kInvFourPi).epsilon(1e-14));

    // b = kappa (2 sin(theta/2))^(-2-nu): at theta = pi/3 the base is exactly 1.
    const auto ps = KernelModel::power_singular(1.0, 1.0);
    CHECK(ps.angular(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ps.angular(0.0) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));

    CHECK_THROWS_AS(c.angular(1.1), std::domain_error);
    CHECK_THROWS_AS(c.angular(-0.2), std::domain_error);
}

TEST_CASE("power-singular small-angle behaviour: sin(theta) b ~ kappa theta^(-1-nu)") {
    const auto ps = KernelModel::power_singular(2.0, 0.5);
    for (double theta : {1e-3, 1e-4, 1e-5}) {
        const double lhs = std::sin(theta) * ps.angular(std::cos(theta));
        const double ref = 2.0 * std::pow(theta, -1.5);
        CHECK(lhs / ref == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("scaled kernel G(s) = 4 pi b(1 - 2s)") {
    const double c = 0.3;
    const auto k = KernelModel::constant(c);
    CHECK(k.scaled(0.25) == doctest::Approx(4.0 * kPi * c).epsilon(1e-14));
    CHECK(k.scaled(0.75) == 0.0);  // outside the symmetrized support

    const auto sp = KernelModel::scaled_power(1.5, 0.25);
    CHECK(sp.scaled(0.1) == doctest::Approx(1.5 * std::pow(0.1, -1.25)).epsilon(1e-14));
    CHECK(sp.scaled(0.6) == 0.0);
    CHECK_THROWS_AS(k.scaled(-0.1), std::domain_error);

    // Change of variables: ∫ G ds equals the sphere mass 2 pi ∫ b sin dθ.
    const double mass_s = gamma2(k);
    double mass_theta = 0.0;
    for (int i = 0; i < 200; ++i) {
        mass_theta += quad::gauss16(
            [&](double th) { return 2.0 * kPi * k.angular(std::cos(th)) * std::sin(th); },
            i * kPi / 400.0, (i + 1) * kPi / 400.0);
    }
    CHECK(mass_s == doctest::Approx(mass_theta).epsilon(1e-12));
}

TEST_CASE("symmetrized constant kernel from a full-sphere constant carries mass 4 pi c") {
    const double c = 0.11;
    const auto folded = KernelModel::constant(c, /*symmetrized=*/false);
    CHECK(gamma2(folded) == doctest::Approx(4.0 * kPi * c).epsilon(1e-12));
}

TEST_CASE("cutoff truncation b_n = min(b, n)") {
    const auto c = KernelModel::constant(kInvFourPi);
    CHECK(c.truncated(1.0).angular(0.3) == c.angular(0.3));  // already below the bound

    const auto ps = KernelModel::power_singular(1.0, 1.0);
    const auto ps10 = ps.truncated(10.0);
    CHECK(ps10.angular(0.999999) == doctest::Approx(10.0).epsilon(1e-12));  // plateau near 0
    CHECK(ps10.angular(0.5) == doctest::Approx(1.0).epsilon(1e-12));        // untouched away from it

    // monotone in n at 64 sample angles
    const auto ps20 = ps.truncated(20.0);
    for (int i = 0; i < 64; ++i) {
        const double ct = (i + 0.5) / 64.0;
        CHECK(ps10.angular(ct) <= ps20.angular(ct) + 1e-15);
        CHECK(ps20.angular(ct) <= ps.angular(ct) + 1e-15);
    }
}

TEST_CASE("kernel classification") {
    const auto c = KernelModel::constant(kInvFourPi);
    auto rep = classify_kernel(c, 1.0);
    CHECK(rep.cutoff);
    CHECK(rep.mild_ok);
    CHECK(rep.full_ok);
    CHECK(rep.mass_estimate == doctest::Approx(0.5).epsilon(1e-9));

    const auto ps = KernelModel::power_singular(1.0, 1.0);
    rep = classify_kernel(ps, 0.5);
    CHECK_FALSE(rep.full_ok);  // alpha0 = 0.5 < nu = 1
    rep = classify_kernel(ps, 1.5);
    CHECK(rep.full_ok);
    CHECK_FALSE(rep.cutoff);
}

TEST_CASE("full-moment machine check at alpha0 = nu + 0.01") {
    for (double nu : {0.25, 0.5, 1.0, 1.5}) {
        const auto ps = KernelModel::power_singular(1.0, nu);
        const auto rep = classify_kernel(ps, std::min(2.0, nu + 0.01));
        CHECK(rep.full_ok);
        CHECK(std::isfinite(rep.full_estimate));
    }
}

TEST_CASE("lambda_e closed forms and identities") {
    const auto c = KernelModel::constant(kInvFourPi);

    // elastic energy conservation: a + b = 1 at e = 1
    CHECK(std::fabs(lambda_e(c, RestitutionParams::from_e(1.0), 1.0)) < 1e-12);

    // q = 1 closed form: -2 a+ a- (s-moment of G) = -pi c a+ a-
    const auto rp = RestitutionParams::from_e(0.5);
    CHECK(lambda_e(c, rp, 1.0) == doctest::Approx(-0.046875).epsilon(1e-10));

    // strictly decreasing in q
    double prev = lambda_e(c, rp, 0.3);
    for (double q : {0.5, 0.8, 1.0, 1.3, 1.7, 2.0}) {
        const double cur = lambda_e(c, rp, q);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("lambda_e on the scaled-power family matches the binomial-series oracle") {
    const auto sp = KernelModel::scaled_power(1.0, 0.25);
    for (double e : {0.5, 0.75, 1.0}) {
        const auto rp = RestitutionParams::from_e(e);
        for (double q : {0.4, 0.5, 0.9, 1.5}) {
            const double quadrature = lambda_e(sp, rp, q, 1e-12);
            const double series = lambda_scaled_power_series(1.0, 0.25, rp, q);
            CHECK(quadrature == doctest::Approx(series).epsilon(1e-10));
        }
    }
}

TEST_CASE("lambda normalization pinned by the spherical definition") {
    const auto kernels = {KernelModel::constant(kInvFourPi),
                          KernelModel::power_singular(1.0, 0.5)};
    for (const auto& k : kernels) {
        for (double e : {0.5, 0.8, 1.0}) {
            const auto rp = RestitutionParams::from_e(e);
            for (double alpha : {1.0, 1.5, 2.0}) {
                const double s_route = lambda_e(k, rp, 0.5 * alpha, 1e-11);
                const double sphere = lambda_e_sphere(k, rp, alpha, 1e-11);
                CHECK(s_route == doctest::Approx(sphere).epsilon(2e-9));
            }
        }
    }
}

TEST_CASE("energy dissipation sign: lambda_e(1) <= 0 with equality iff e = 1") {
    const auto c = KernelModel::constant(kInvFourPi);
    for (double e : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        CHECK(lambda_e(c, RestitutionParams::from_e(e), 1.0) < 0.0);
    }
    CHECK(std::fabs(lambda_e(c, RestitutionParams::from_e(1.0), 1.0)) < 1e-12);
}

TEST_CASE("gamma2") {
    CHECK(gamma2(KernelModel::constant(kInvFourPi)) == doctest::Approx(0.5).epsilon(1e-12));

    const auto ps = KernelModel::power_singular(1.0, 0.5);
    double prev = 0.0;
    for (double n : {10.0, 100.0, 1000.0}) {
        const double g = gamma2(ps.truncated(n));
        CHECK(g > prev);
        prev = g;
    }
    CHECK_THROWS_AS(gamma2(ps), NonIntegrableError);
}

TEST_CASE("gamma_e_alpha identities and the elastic sandwich") {
    const auto c = KernelModel::constant(kInvFourPi);
    const double g2 = gamma2(c);

    // ratio identically 1 at e = 1, alpha = 2
    CHECK(gamma_e_alpha(c, RestitutionParams::from_e(1.0), 2.0) ==
          doctest::Approx(g2).epsilon(1e-12));

    for (double e : {0.25, 0.6, 0.9}) {
        const auto rp = RestitutionParams::from_e(e);
        for (double alpha : {0.5, 1.0, 1.7}) {
            const double ga = gamma_e_alpha(c, rp, alpha, 1e-11);
            const double lam = lambda_e(c, rp, 0.5 * alpha, 1e-11);
            CHECK(ga - g2 == doctest::Approx(lam).epsilon(1e-9));

            const double gal = gamma_alpha_constant_closed_form(kInvFourPi, alpha);
            const double ap2 = rp.a_plus * rp.a_plus;
            const double lo = std::pow(ap2, 0.5 * alpha) *
                              std::pow(rp.a_plus * (1.0 + rp.a_minus), 0.5 * alpha) * gal;
            const double hi =
                std::pow(ap2, 0.5 * alpha) *
                std::pow(0.5 * ((1.0 + rp.a_minus) * (1.0 + rp.a_minus) + ap2), 0.5 * alpha) * gal;
            CHECK(ga >= lo - 1e-10);
            CHECK(ga <= hi + 1e-10);
        }
    }

    // gamma_{e,alpha} = gamma_alpha iff e = 1
    const double ga_elastic = gamma_e_alpha(c, RestitutionParams::from_e(1.0), 1.0);
    CHECK(ga_elastic == doctest::Approx(gamma_alpha_constant_closed_form(kInvFourPi, 1.0))
                            .epsilon(1e-10));

    CHECK_THROWS_AS(gamma_e_alpha(KernelModel::power_singular(1.0, 0.5),
                                  RestitutionParams::from_e(0.5), 1.0),
                    NonIntegrableError);
}

TEST_CASE("mu_e_p") {
    const auto c = KernelModel::constant(kInvFourPi);
    const auto rp = RestitutionParams::from_e(0.5);
    const double mu = mu_e_p(c, rp, 0.5);
    CHECK(mu * 0.5 == doctest::Approx(lambda_e(c, rp, 0.5)).epsilon(1e-13));

    // self-consistent refinement: two tolerances agree to the coarser one
    CHECK(mu_e_p(c, rp, 0.5, 1e-8) == doctest::Approx(mu_e_p(c, rp, 0.5, 1e-12)).epsilon(1e-8));

    CHECK_THROWS_AS(mu_e_p(c, rp, 1.0), std::domain_error);
    CHECK_THROWS_AS(mu_e_p(c, rp, 0.0), std::domain_error);
}

TEST_CASE("gamma_e_n: definition, positivity bound, fused oracle") {
    const auto c = KernelModel::constant(kInvFourPi);
    const auto rp8 = RestitutionParams::from_e(0.8);

    const auto g2 = gamma_e_n(c, rp8, 0.6, 2);
    CHECK(g2.value == doctest::Approx(2.0 * lambda_e(c, rp8, 0.6) - lambda_e(c, rp8, 1.2))
                          .epsilon(1e-12));

    CHECK(g2.positive_regime);
    for (int n = 2; n <= 20; ++n) {
        const auto g = gamma_e_n(c, rp8, 0.6, n);
        CHECK(g.value >= (n - 1) * g.lambda_p - 1e-12);
        CHECK(g.value > 0.0);
    }

    // fused single-quadrature oracle at e = 1, p = 0.5, n = 4
    const auto rp1 = RestitutionParams::from_e(1.0);
    const double fused =
        quad::integrate_graded(
            [&](double s) {
                const double a = rp1.a_of_s(s), b = rp1.b_of_s(s);
                return c.scaled(s) * (4.0 * (std::sqrt(a) + std::sqrt(b) - 1.0) -
                                      (a * a + b * b - 1.0));
            },
            0.0, c.s_max())
            .value;
    CHECK(gamma_e_n(c, rp1, 0.5, 4).value == doctest::Approx(fused).epsilon(1e-10));

    // lambda <= 0 regime is reported, not hidden
    const auto flagged = gamma_e_n(c, RestitutionParams::from_e(0.5), 0.95, 2);
    CHECK_FALSE(flagged.positive_regime);
    CHECK(flagged.lambda_p < 0.0);
}

TEST_CASE("B coefficients: Beta-identity bound, asymmetry, sum bound") {
    const auto sp = KernelModel::scaled_power(1.0, 0.25);
    const auto rp = RestitutionParams::from_e(0.75);
    const double p = 0.5, beta = 0.25, k_e = 1.0;

    for (int i : {1, 2, 3}) {
        for (int j : {1, 2, 4}) {
            const int n = i + j;
            const double b = coeff_b(sp, rp, p, i, j, 1e-11);
            const double bound = k_e * std::exp(std::lgamma(i * p - beta) + std::lgamma(n * p + 1.0) -
                                                std::lgamma(i * p + 1.0) -
                                                std::lgamma(n * p + 1.0 - beta));
            CHECK(b > 0.0);
            CHECK(b <= bound * (1.0 + 1e-10));
        }
    }

    // a and b enter asymmetrically
    CHECK(coeff_b(sp, rp, p, 1, 2) != doctest::Approx(coeff_b(sp, rp, p, 2, 1)).epsilon(1e-3));

    const double cap = k_e * series_sum_constant(p, beta);
    for (int n = 2; n <= 30; ++n) {
        double sum = 0.0;
        for (int i = 1; i <= n - 1; ++i) sum += coeff_b(sp, rp, p, i, n - i, 1e-9);
        CHECK(sum / (n - 1) <= cap * (1.0 + 1e-9));
    }

    // ip <= beta: the a-factor no longer integrates the singularity
    CHECK_THROWS_AS(coeff_b(KernelModel::power_singular(1.0, 1.0), rp, 0.4, 1, 3),
                    NonIntegrableError);
}

TEST_CASE("collision factors: a + b = 1 - 2 a+ a- s") {
    rng::Sampler rng(20240811);
    for (int it = 0; it < 10000; ++it) {
        const auto rp = RestitutionParams::from_e(rng.uniform(1e-3, 1.0));
        const double s = rng.uniform01();
        const double lhs = rp.a_of_s(s) + rp.b_of_s(s);
        const double rhs = 1.0 - 2.0 * rp.a_plus * rp.a_minus * s;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
    const auto rp1 = RestitutionParams::from_e(1.0);
    CHECK(rp1.a_of_s(0.3) + rp1.b_of_s(0.3) == 1.0);
}

TEST_CASE("moment table stores and exports entries") {
    MomentTable table;
    table.put({MomentKind::LambdaEQ, 0.75, 0.5}, {-0.25, 1e-12, 1e-10});
    table.put({MomentKind::BCoeff, 0.75, 0.5, 1, 2}, {0.125, 1e-12, 1e-10});
    CHECK(table.size() == 2);
    CHECK(table.get({MomentKind::LambdaEQ, 0.75, 0.5}).has_value());
    CHECK_FALSE(table.get({MomentKind::Gamma2, 0.75, 2.0}).has_value());

    const std::string csv = table.to_csv();
    CHECK(csv.find("quantity,e,alpha_or_p,i,j,value,est_error") != std::string::npos);
    CHECK(csv.find("lambda_e_q,0.75,0.5,,,-0.25") != std::string::npos);
    CHECK(csv.find("B_ij,0.75,0.5,1,2,0.125") != std::string::npos);

    // est_error <= requested tolerance for stored entries
    for (const auto key : {MomentKey{MomentKind::LambdaEQ, 0.75, 0.5},
                           MomentKey{MomentKind::BCoeff, 0.75, 0.5, 1, 2}}) {
        const auto entry = table.get(key);
        CHECK(entry->est_error <= entry->requested_tol);
    }
}

TEST_CASE("moment computations are deterministic") {
    const auto sp = KernelModel::scaled_power(1.0, 0.25);
    const auto rp = RestitutionParams::from_e(0.75);
    CHECK(lambda_e(sp, rp, 0.5) == lambda_e(sp, rp, 0.5));
    CHECK(coeff_b(sp, rp, 0.5, 2, 3) == coeff_b(sp, rp, 0.5, 2, 3));
}
