#include "gf/moments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gf/errors.hpp"
#include "gf/vec3.hpp"

namespace gf::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

quad::QuadConfig cfg_for(double tol) {
    quad::QuadConfig cfg;
    cfg.abs_tol = tol;
    return cfg;
}

void require_integrand_exponent(const KernelModel& kernel, double q, const char* what) {
    // Leading behaviour near s -> 0 is a(s)^q * G(s) ~ s^(q - 1 - beta).
    if (q <= kernel.singular_beta()) {
        throw NonIntegrableError(std::string(what) + ": moment order " + std::to_string(q) +
                                 " does not integrate the s^-(1+beta) singularity (beta = " +
                                 std::to_string(kernel.singular_beta()) + ")");
    }
}

}  // namespace

double lambda_e(const KernelModel& kernel, const RestitutionParams& params, double q, double tol) {
    if (!(q > 0.0)) throw std::domain_error("lambda_e: q must be positive");
    require_integrand_exponent(kernel, q, "lambda_e");
    // Moment-cancelled integrand: a^q + (b^q - 1) = O(s^min(q,1)) as s -> 0,
    // with b^q - 1 = expm1(q log1p(...)) to avoid cancellation in deep panels.
    const double m = params.a_plus * (1.0 + params.a_minus);
    auto res = quad::integrate_graded(
        [&](double s) {
            return kernel.scaled(s) *
                   (std::pow(params.a_of_s(s), q) + std::expm1(q * std::log1p(-m * s)));
        },
        0.0, kernel.s_max(), cfg_for(tol));
    return res.value;
}

double lambda_e_sphere(const KernelModel& kernel, const RestitutionParams& params, double alpha,
                       double tol) {
    if (!(alpha > 0.0) || alpha > 2.0) throw std::domain_error("lambda_e_sphere: alpha in (0,2]");
    require_integrand_exponent(kernel, 0.5 * alpha, "lambda_e_sphere");
    // Fixed |xi| = 1 along z; sigma swept over the polar angle (the integrand
    // is azimuth-independent). Vectors assembled componentwise from the
    // post-collisional formulas, nothing shared with the s-space route.
    const Vec3 xi{0.0, 0.0, 1.0};
    const double theta_max = 2.0 * std::asin(std::sqrt(kernel.s_max()));
    auto res = quad::integrate_graded(
        [&](double th) {
            const double ct = std::cos(th), st = std::sin(th);
            const Vec3 sigma{st, 0.0, ct};
            const Vec3 xp = ((1.0 + params.a_minus) * 0.5) * xi + (params.a_plus * 0.5) * sigma;
            const Vec3 xm = ((1.0 - params.a_minus) * 0.5) * xi - (params.a_plus * 0.5) * sigma;
            // |xi_e^+|^a - 1 assembled via expm1 so the deep panels are not
            // pure cancellation noise under a strongly singular weight.
            const double plus_minus_1 = std::expm1(0.5 * alpha * std::log(xp.norm2()));
            const double minus_part = std::pow(xm.norm2(), 0.5 * alpha);
            return 2.0 * kPi * kernel.angular(ct) * (plus_minus_1 + minus_part) * st;
        },
        0.0, theta_max, cfg_for(tol));
    return res.value;
}

double gamma2(const KernelModel& kernel, double tol) {
    if (!kernel.integrable()) {
        throw NonIntegrableError("gamma2: kernel mass diverges (non-cutoff kernel)");
    }
    auto res = quad::integrate_graded([&](double s) { return kernel.scaled(s); }, 0.0,
                                      kernel.s_max(), cfg_for(tol));
    return res.value;
}

double gamma_e_alpha(const KernelModel& kernel, const RestitutionParams& params, double alpha,
                     double tol) {
    if (!(alpha >= 0.0) || alpha > 2.0) throw std::domain_error("gamma_e_alpha: alpha in [0,2]");
    if (!kernel.integrable()) {
        throw NonIntegrableError("gamma_e_alpha: requires a cutoff kernel");
    }
    const double q = 0.5 * alpha;
    auto res = quad::integrate_graded(
        [&](double s) {
            return kernel.scaled(s) *
                   (std::pow(params.a_of_s(s), q) + std::pow(params.b_of_s(s), q));
        },
        0.0, kernel.s_max(), cfg_for(tol));
    return res.value;
}

double gamma_alpha_constant_closed_form(double c, double alpha) {
    return 4.0 * kPi * c / (0.5 * alpha + 1.0);
}

double mu_e_p(const KernelModel& kernel, const RestitutionParams& params, double p, double tol) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("mu_e_p: p must lie in (0, 1)");
    return lambda_e(kernel, params, p, tol) / p;
}

GammaEN gamma_e_n(const KernelModel& kernel, const RestitutionParams& params, double p, int n,
                  double tol) {
    if (n < 2) throw std::domain_error("gamma_e_n: n must be >= 2");
    GammaEN out;
    out.lambda_p = lambda_e(kernel, params, p, tol);
    out.value = n * out.lambda_p - lambda_e(kernel, params, n * p, tol);
    out.positive_regime = out.lambda_p > 0.0;
    return out;
}

double coeff_b(const KernelModel& kernel, const RestitutionParams& params, double p, int i, int j,
               double tol) {
    if (i < 1 || j < 1) throw std::domain_error("coeff_b: indices must be >= 1");
    if (!(p > 0.0)) throw std::domain_error("coeff_b: p must be positive");
    require_integrand_exponent(kernel, i * p, "coeff_b");
    const int n = i + j;
    auto res = quad::integrate_graded(
        [&](double s) {
            return kernel.scaled(s) * std::pow(params.a_of_s(s), i * p) *
                   std::pow(params.b_of_s(s), j * p);
        },
        0.0, kernel.s_max(), cfg_for(tol));
    if (!(res.value > 0.0)) return 0.0;
    const double log_gamma_ratio =
        std::lgamma(n * p + 1.0) - std::lgamma(i * p + 1.0) - std::lgamma(j * p + 1.0);
    return std::exp(log_gamma_ratio + std::log(res.value));
}

double series_sum_constant(double p, double beta) {
    if (!(beta > 0.0) || !(beta < p) || !(p < 1.0)) {
        throw std::domain_error("series_sum_constant: need 0 < beta < p < 1");
    }
    // S = sum_i Gamma(ip - beta)/Gamma(ip + 1); terms decay like (ip)^-(1+beta).
    double s_sum = 0.0;
    const int m_terms = 20000;
    for (int i = 1; i <= m_terms; ++i) {
        s_sum += std::exp(std::lgamma(i * p - beta) - std::lgamma(i * p + 1.0));
    }
    // Integral tail of the asymptotic form (xp)^-(1+beta).
    const double xm = (m_terms + 0.5) * p;
    s_sum += std::pow(xm, -beta) / (beta * p);

    // r = sup_n Gamma(np+1)/((n-1) Gamma(np+1-beta)); the sequence tends to 0
    // like (np)^beta / (n-1), so the sup sits at small n.
    double r_sup = 0.0;
    for (int n = 2; n <= 4000; ++n) {
        const double term =
            std::exp(std::lgamma(n * p + 1.0) - std::lgamma(n * p + 1.0 - beta)) / (n - 1);
        r_sup = std::max(r_sup, term);
        if (n > 64 && term < 0.25 * r_sup) break;
    }
    return r_sup * s_sum;
}

double growth_base_b_e(double k_e, double p, double beta, double lambda_p) {
    if (!(lambda_p > 0.0)) {
        throw StabilityRegimeError("growth_base_b_e: needs lambda_e(p) > 0", lambda_p);
    }
    return 1.0 + k_e * series_sum_constant(p, beta) / lambda_p;
}

double scaled_power_majorant(const KernelModel& kernel, double beta) {
    if (kernel.family() == KernelFamily::ScaledPower && !kernel.is_truncated()) {
        if (beta < kernel.singular_beta()) {
            throw std::domain_error("scaled_power_majorant: beta below the kernel's own exponent");
        }
    }
    // G(s) s^(1+beta) is evaluated on a fine grid; for the supported families
    // it is monotone except possibly at the truncation knee, so a grid sup is
    // reliable.
    double k_e = 0.0;
    const int n = 4096;
    for (int i = 1; i <= n; ++i) {
        const double s = kernel.s_max() * i / n;
        k_e = std::max(k_e, kernel.scaled(std::min(s, kernel.s_max())) * std::pow(s, 1.0 + beta));
    }
    // Near s -> 0 the product behaves like s^(beta - beta_kernel); for
    // beta >= beta_kernel the sup is attained away from 0 on truncated or
    // bounded kernels, but check a graded set of small s anyway.
    for (double s = kernel.s_max(); s > 1e-14; s *= 0.5) {
        k_e = std::max(k_e, kernel.scaled(s) * std::pow(s, 1.0 + beta));
    }
    return k_e;
}

void MomentTable::put(const MomentKey& key, const MomentEntry& entry) { entries_[key] = entry; }

std::optional<MomentEntry> MomentTable::get(const MomentKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

namespace {
const char* kind_name(MomentKind k) {
    switch (k) {
        case MomentKind::Gamma2: return "gamma2";
        case MomentKind::GammaEAlpha: return "gamma_e_alpha";
        case MomentKind::LambdaEQ: return "lambda_e_q";
        case MomentKind::MuEP: return "mu_e_p";
        case MomentKind::GammaEN: return "gamma_e_n";
        case MomentKind::BCoeff: return "B_ij";
    }
    return "?";
}
}  // namespace

std::string MomentTable::to_csv() const {
    std::ostringstream os;
    os << "quantity,e,alpha_or_p,i,j,value,est_error\n";
    char buf[512];
    for (const auto& [key, entry] : entries_) {
        if (key.kind == MomentKind::BCoeff || key.kind == MomentKind::GammaEN) {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d,%d,%.17g,%.17g\n",
                          kind_name(key.kind), key.e, key.alpha_or_p, key.i, key.j, entry.value,
                          entry.est_error);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,,,%.17g,%.17g\n", kind_name(key.kind),
                          key.e, key.alpha_or_p, entry.value, entry.est_error);
        }
        os << buf;
    }
    return os.str();
}

}  // namespace gf::kernels
