#ifndef GF_ODE_HPP
#define GF_ODE_HPP

#include <functional>
#include <vector>

namespace gf::ode {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 1e300;
    int max_consecutive_rejects = 40;
    long max_steps = 50'000'000;
};

struct Stats {
    long steps = 0;
    long rejects = 0;
    long rhs_evals = 0;
};

using Rhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Optional veto on a proposed step (invariant enforcement); return false to reject.
using StepFilter = std::function<bool(double t_new, const std::vector<double>& y_new)>;

/**
 * Dormand-Prince 5(4) embedded pair with PI step-size control. Integrates y
 * in place from t0 to t1 (t1 >= t0), landing on t1 exactly. Throws
 * IntegrationFailure on persistent rejection or dt underflow.
 */
Stats integrate(const Rhs& rhs, std::vector<double>& y, double t0, double t1,
                const Options& opts = {}, const StepFilter& filter = nullptr);

}  // namespace gf::ode

#endif
