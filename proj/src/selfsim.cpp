#include "gf/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gf/errors.hpp"
#include "gf/moments.hpp"
#include "gf/ode.hpp"
#include "gf/quadrature.hpp"

namespace gf::selfsim {

using kernels::KernelModel;
using kernels::RestitutionParams;

namespace {

void require_series_regime(const KernelModel& kernel, double p) {
    const double beta = kernel.singular_beta();
    if (!(p > beta) || !(p < 1.0)) {
        throw std::domain_error("series engine: need beta < p < 1 (beta = " +
                                std::to_string(beta) + ", p = " + std::to_string(p) + ")");
    }
}

// Interaction coefficients B_{e,p}(i, n-i) for n = 2..N, stored row by row.
std::vector<std::vector<double>> b_table(const KernelModel& kernel,
                                         const RestitutionParams& params, double p, int N,
                                         double tol) {
    std::vector<std::vector<double>> B(N + 1);
    for (int n = 2; n <= N; ++n) {
        B[n].resize(n);
        for (int i = 1; i <= n - 1; ++i) {
            B[n][i] = kernels::coeff_b(kernel, params, p, i, n - i, tol);
        }
    }
    return B;
}

std::vector<double> gamma_table(const KernelModel& kernel, const RestitutionParams& params,
                                double p, int N, double tol, double lambda_p) {
    std::vector<double> g(N + 1, 0.0);
    for (int n = 2; n <= N; ++n) {
        g[n] = n * lambda_p - kernels::lambda_e(kernel, params, n * p, tol);
    }
    return g;
}

// The growth base used for bound enforcement: the paper's b_e when the kernel
// is (or is dominated by) k_e s^-(1+beta).
BoundConsts majorant_bounds(const KernelModel& kernel, double p, double lambda_p) {
    BoundConsts bc;
    double beta = kernel.singular_beta();
    double k_e;
    if (kernel.family() == kernels::KernelFamily::ScaledPower && !kernel.is_truncated()) {
        k_e = kernel.strength();
    } else {
        if (beta <= 0.0) beta = 0.5 * p;  // any beta in (0, p) majorizes a bounded kernel
        k_e = kernels::scaled_power_majorant(kernel, beta);
    }
    bc.b_e = kernels::growth_base_b_e(k_e, p, beta, lambda_p);
    bc.b_e_from_majorant = true;
    return bc;
}

}  // namespace

SeriesProfile steady_coeffs(const KernelModel& kernel, const RestitutionParams& params, double p,
                            double psi1, int N, const SteadyOptions& opts) {
    require_series_regime(kernel, p);
    if (N < 2) throw std::domain_error("steady_coeffs: N must be >= 2");
    if (psi1 == 0.0) throw std::domain_error("steady_coeffs: Psi_1 must be nonzero");
    if (psi1 > 0.0 && !opts.allow_any_sign) {
        throw std::domain_error(
            "steady_coeffs: characteristic-function profiles need Psi_1 < 0 "
            "(pass allow_any_sign to explore)");
    }
    const double lambda_p = kernels::lambda_e(kernel, params, p, opts.tol);
    if (!(lambda_p > 0.0)) {
        throw StabilityRegimeError("steady_coeffs: lambda_e(p) <= 0, no self-similar regime",
                                   lambda_p);
    }

    SeriesProfile prof;
    prof.p = p;
    prof.restitution = params;
    prof.kernel = kernel;
    prof.kind = ProfileKind::Steady;
    prof.lambda_p = lambda_p;
    prof.coeffs.assign(N + 1, 0.0);
    prof.coeffs[0] = 1.0;
    prof.coeffs[1] = psi1;

    const auto B = b_table(kernel, params, p, N, opts.tol);
    const auto gamma = gamma_table(kernel, params, p, N, opts.tol, lambda_p);
    for (int n = 2; n <= N; ++n) {
        double acc = 0.0;
        for (int i = 1; i <= n - 1; ++i) acc += B[n][i] * prof.coeffs[i] * prof.coeffs[n - i];
        prof.coeffs[n] = acc / gamma[n];
    }

    prof.bound_consts.K = psi1;
    prof.bound_consts.A0 = std::fabs(psi1);
    if (kernel.family() == kernels::KernelFamily::ScaledPower && !kernel.is_truncated()) {
        prof.bound_consts.b_e =
            kernels::growth_base_b_e(kernel.strength(), p, kernel.singular_beta(), lambda_p);
        prof.bound_consts.b_e_from_majorant = true;
    } else {
        // Empirical geometric envelope of the computed coefficients.
        double g = 0.0;
        for (int n = 2; n <= N; ++n) {
            const double ratio = std::fabs(prof.coeffs[n]) / std::pow(std::fabs(psi1), n);
            if (ratio > 0.0) g = std::max(g, std::pow(ratio, 1.0 / (n - 1)));
        }
        prof.bound_consts.b_e = 1.0 + g;
        prof.bound_consts.b_e_from_majorant = false;
    }
    return prof;
}

CoeffTrajectory coeff_evolve(const KernelModel& kernel, const RestitutionParams& params, double p,
                             const std::vector<double>& psi0, const std::vector<double>& times,
                             double tol) {
    require_series_regime(kernel, p);
    if (psi0.size() < 3) throw std::domain_error("coeff_evolve: need coefficients up to n >= 2");
    if (psi0[0] != 1.0) throw std::domain_error("coeff_evolve: psi_0(0) must equal 1");
    const int N = static_cast<int>(psi0.size()) - 1;
    const double lambda_p = kernels::lambda_e(kernel, params, p, tol);
    if (!(lambda_p > 0.0)) {
        throw StabilityRegimeError("coeff_evolve: lambda_e(p) <= 0", lambda_p);
    }

    const auto B = b_table(kernel, params, p, N, tol);
    const auto gamma = gamma_table(kernel, params, p, N, tol, lambda_p);

    CoeffTrajectory traj;
    traj.integ_tol = tol;
    traj.bound = majorant_bounds(kernel, p, lambda_p);
    double a0 = 0.0;
    for (int n = 1; n <= N; ++n) a0 = std::max(a0, std::pow(std::fabs(psi0[n]), 1.0 / n));
    traj.bound.A0 = a0;
    traj.bound.K = psi0[1];

    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt[0] = 0.0;
        dydt[1] = 0.0;
        for (int n = 2; n <= N; ++n) {
            double acc = 0.0;
            for (int i = 1; i <= n - 1; ++i) acc += B[n][i] * y[i] * y[n - i];
            dydt[n] = -gamma[n] * y[n] + acc;
        }
    };

    auto check_bound = [&](const std::vector<double>& y, double t) {
        for (int n = 1; n <= N; ++n) {
            const double cap = std::pow(traj.bound.A0, n) * std::pow(traj.bound.b_e, n - 1);
            if (std::fabs(y[n]) > cap + 10.0 * tol * (1.0 + cap)) {
                throw IntegrationFailure("coeff_evolve: uniform bound violated at t = " +
                                         std::to_string(t) + ", n = " + std::to_string(n));
            }
        }
    };

    ode::Options opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;
    opts.dt_init = 1e-4;

    std::vector<double> y = psi0;
    double t = 0.0;
    for (double t_out : times) {
        if (t_out < t) throw std::domain_error("coeff_evolve: times must be nondecreasing");
        ode::integrate(rhs, y, t, t_out, opts);
        t = t_out;
        check_bound(y, t);
        traj.times.push_back(t);
        traj.states.push_back(y);
    }
    return traj;
}

namespace {

// Coefficient envelope for the dropped tail: steady profiles decay like
// |K|^n (b_e - 1)^(n-1), transient ones like A0^n b_e^(n-1).
double tail_base(const SeriesProfile& prof, int n) {
    if (prof.kind == ProfileKind::Steady) {
        return std::pow(std::fabs(prof.bound_consts.K), n) *
               std::pow(prof.bound_consts.b_e - 1.0, n - 1);
    }
    return std::pow(prof.bound_consts.A0, n) * std::pow(prof.bound_consts.b_e, n - 1);
}

}  // namespace

SeriesEval eval_series(const SeriesProfile& profile, double x) {
    if (!(x >= 0.0)) throw std::domain_error("eval_series: x must be nonnegative");
    SeriesEval out;
    if (x == 0.0) {
        out.value = profile.coeffs[0];
        return out;
    }
    const double lx = std::log(x);
    const int N = profile.order();
    double sum = 0.0, comp = 0.0, max_term = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double term =
            profile.coeffs[n] *
            std::exp(n * profile.p * lx - std::lgamma(n * profile.p + 1.0));
        max_term = std::max(max_term, std::fabs(term));
        // Kahan update
        const double yk = term - comp;
        const double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    out.value = sum;
    out.reliable = max_term <= 1e15;
    double tail = 0.0;
    for (int n = N + 1; n <= N + 4000; ++n) {
        const double term =
            tail_base(profile, n) * std::exp(n * profile.p * lx - std::lgamma(n * profile.p + 1.0));
        tail += term;
        if (term < 1e-30 * (tail + 1e-300) && n > N + 8) break;
    }
    out.tail_bound = tail;
    return out;
}

double eval_series_derivative(const SeriesProfile& profile, double x) {
    if (!(x > 0.0)) throw std::domain_error("eval_series_derivative: x must be positive");
    const double lx = std::log(x);
    double sum = 0.0;
    for (int n = 1; n <= profile.order(); ++n) {
        const double np = n * profile.p;
        sum += profile.coeffs[n] *
               std::exp((np - 1.0) * lx + std::log(np) - std::lgamma(np + 1.0));
    }
    return sum;
}

double series_trust_radius(const SeriesProfile& profile, double max_term) {
    auto worst_term = [&](double x) {
        const double lx = std::log(x);
        double m = 0.0;
        for (int n = 1; n <= profile.order(); ++n) {
            m = std::max(m, std::fabs(profile.coeffs[n]) *
                                std::exp(n * profile.p * lx - std::lgamma(n * profile.p + 1.0)));
        }
        return m;
    };
    double lo = 1e-6, hi = 1e12;
    if (worst_term(hi) <= max_term) return hi;
    if (worst_term(lo) > max_term) return lo;
    for (int it = 0; it < 120; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (worst_term(mid) <= max_term) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

namespace {

// Psi(x) - 1 (drops the n = 0 term, small-x safe).
double series_minus_one(const SeriesProfile& prof, double x) {
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    double sum = 0.0;
    for (int n = 1; n <= prof.order(); ++n) {
        sum += prof.coeffs[n] * std::exp(n * prof.p * lx - std::lgamma(n * prof.p + 1.0));
    }
    return sum;
}

// Psi(b x) - Psi(x) = sum c_n x^(np) (b^(np) - 1)/Gamma(np+1), with the
// b^(np) - 1 factor via expm1 so deep panels do not cancel.
double series_scale_diff(const SeriesProfile& prof, double x, double log_b) {
    if (x == 0.0) return 0.0;
    const double lx = std::log(x);
    double sum = 0.0;
    for (int n = 1; n <= prof.order(); ++n) {
        const double np = n * prof.p;
        sum += prof.coeffs[n] * std::exp(np * lx - std::lgamma(np + 1.0)) *
               std::expm1(np * log_b);
    }
    return sum;
}

}  // namespace

ResidualReport profile_residual(const SeriesProfile& profile, const std::vector<double>& x_samples,
                                double tol) {
    if (profile.kind != ProfileKind::Steady) {
        throw std::domain_error("profile_residual: steady profiles only");
    }
    const auto& params = profile.restitution;
    const auto& kernel = profile.kernel;
    const double mu = profile.lambda_p / profile.p;
    const double m = params.a_plus * (1.0 + params.a_minus);

    ResidualReport rep;
    quad::QuadConfig cfg;
    cfg.abs_tol = tol;
    for (double x : x_samples) {
        double r;
        if (x == 0.0) {
            r = 0.0;
        } else {
            auto integrand = [&](double s) {
                const double bx = params.b_of_s(s) * x;
                const double gain_small = series_minus_one(profile, params.a_of_s(s) * x) *
                                          (1.0 + series_minus_one(profile, bx));
                const double transport = series_scale_diff(profile, x, std::log1p(-m * s));
                return kernel.scaled(s) * (gain_small + transport);
            };
            const double integral = quad::integrate_graded(integrand, 0.0, kernel.s_max(), cfg).value;
            r = mu * x * eval_series_derivative(profile, x) - integral;
        }
        rep.x.push_back(x);
        rep.residual.push_back(r);
        rep.max_abs = std::max(rep.max_abs, std::fabs(r));
    }
    return rep;
}

std::string profile_to_csv(const SeriesProfile& profile, bool timestamp_header,
                           const std::string& timestamp) {
    std::ostringstream os;
    char buf[256];
    if (timestamp_header) os << "# generated " << timestamp << "\n";
    std::snprintf(buf, sizeof(buf), "# p=%.17g e=%.17g kernel=%s b_e=%.17g A0=%.17g\n", profile.p,
                  profile.restitution.e, profile.kernel.id().c_str(), profile.bound_consts.b_e,
                  profile.bound_consts.A0);
    os << buf << "n,coeff\n";
    for (int n = 0; n <= profile.order(); ++n) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", n, profile.coeffs[n]);
        os << buf;
    }
    return os.str();
}

}  // namespace gf::selfsim
