#include "gf/ode.hpp"

#include <algorithm>
#include <cmath>

#include "gf/errors.hpp"

namespace gf::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order weights for the error estimate (b - bhat).
constexpr double e1 = b1 - 5179.0 / 57600;
constexpr double e3 = b3 - 7571.0 / 16695;
constexpr double e4 = b4 - 393.0 / 640;
constexpr double e5 = b5 + 92097.0 / 339200;
constexpr double e6 = b6 - 187.0 / 2100;
constexpr double e7 = -1.0 / 40;
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9;

}  // namespace

Stats integrate(const Rhs& rhs, std::vector<double>& y, double t0, double t1, const Options& opts,
                const StepFilter& filter) {
    Stats stats;
    const std::size_t n = y.size();
    if (t1 <= t0) return stats;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    double t = t0;
    double dt = std::min({opts.dt_init, opts.dt_max, t1 - t0});
    double err_prev = 1.0;
    int rejects_in_row = 0;
    bool have_k1 = false;

    while (t < t1) {
        dt = std::min(dt, t1 - t);
        if (dt < opts.dt_min) throw IntegrationFailure("ode: step size underflow");
        if (++stats.steps > opts.max_steps) throw IntegrationFailure("ode: step budget exhausted");

        if (!have_k1) {
            rhs(t, y, k1);
            ++stats.rhs_evals;
        }
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * a21 * k1[i];
        rhs(t + c2 * dt, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * dt, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * dt, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * dt, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        rhs(t + dt, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + dt, ynew, k7);  // FSAL stage
        stats.rhs_evals += 6;

        double err2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double scale =
                opts.abs_tol + opts.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err2 += (ei / scale) * (ei / scale);
        }
        const double err = std::sqrt(err2 / static_cast<double>(n == 0 ? 1 : n));

        const bool filter_ok = !filter || filter(t + dt, ynew);
        if (err <= 1.0 && filter_ok) {
            t += dt;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            have_k1 = true;
            rejects_in_row = 0;
            const double safe = err > 1e-12 ? err : 1e-12;
            double fac = 0.9 * std::pow(safe, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 6.0);
            dt = std::min(dt * fac, opts.dt_max);
            err_prev = safe;
        } else {
            ++stats.rejects;
            // y (and hence k1) is unchanged by a rejected step.
            if (++rejects_in_row > opts.max_consecutive_rejects) {
                throw IntegrationFailure(filter_ok ? "ode: persistent error-control rejection"
                                                   : "ode: persistent invariant rejection");
            }
            const double fac =
                filter_ok ? std::max(0.1, 0.9 * std::pow(std::max(err, 1e-12), -0.2)) : 0.3;
            dt *= std::min(fac, 0.9);
        }
    }
    return stats;
}

}  // namespace gf::ode
