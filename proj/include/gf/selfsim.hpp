#ifndef GF_SELFSIM_HPP
#define GF_SELFSIM_HPP

#include <string>
#include <vector>

#include "gf/kernel.hpp"

namespace gf::selfsim {

enum class ProfileKind { Steady, Transient };

struct BoundConsts {
    double A0 = 0.0;    // envelope base: |c_n(0)| <= A0^n
    double b_e = 1.0;   // geometric growth base of the coefficient bounds
    double K = 0.0;     // first coefficient (steady kind)
    bool b_e_from_majorant = false;  // scaled-power formula vs empirical fit
};

/**
 * Truncated series u(x) = sum c_n x^(np) / Gamma(np + 1). Steady profiles
 * carry the recurrence solution Psi_n; transient ones a snapshot psi_n(t).
 */
struct SeriesProfile {
    double p = 0.5;
    kernels::RestitutionParams restitution;
    kernels::KernelModel kernel = kernels::KernelModel::constant(1.0);
    std::vector<double> coeffs;  // c_0 .. c_N, c_0 = 1
    ProfileKind kind = ProfileKind::Steady;
    double time = 0.0;           // transient kind
    double lambda_p = 0.0;       // lambda_e(p) of this configuration
    BoundConsts bound_consts;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct SteadyOptions {
    double tol = 1e-10;
    // The characteristic-function construction requires Psi1 < 0; this flag
    // admits any nonzero Psi1 for exploration.
    bool allow_any_sign = false;
};

/**
 * Steady coefficients by the recurrence
 *   Psi_n = (1/gamma_{e,n}(p)) sum_{i=1}^{n-1} B_{e,p}(i, n-i) Psi_i Psi_{n-i},
 * solved sequentially (lower-triangular, no iteration). Requires
 * beta < p < 1 and lambda_e(p) > 0 (StabilityRegimeError otherwise).
 */
SeriesProfile steady_coeffs(const kernels::KernelModel& kernel,
                            const kernels::RestitutionParams& params, double p, double psi1, int N,
                            const SteadyOptions& opts = {});

struct CoeffTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // one row per time, each c_0..c_N
    double integ_tol = 0.0;
    BoundConsts bound;  // constants used for the uniform-bound enforcement
};

/**
 * Integrates the coefficient chain
 *   d psi_n/dt = -gamma_{e,n}(p) psi_n + sum_{i+j=n} B_{e,p}(i,j) psi_i psi_j
 * for n = 2..N with psi_0, psi_1 held constant, recording snapshots at the
 * requested times. The uniform bound |psi_n| <= A0^n b_e^(n-1) is asserted at
 * every output time (IntegrationFailure beyond 10*tol).
 */
CoeffTrajectory coeff_evolve(const kernels::KernelModel& kernel,
                             const kernels::RestitutionParams& params, double p,
                             const std::vector<double>& psi0, const std::vector<double>& times,
                             double tol = 1e-10);

struct SeriesEval {
    double value = 0.0;
    double tail_bound = 0.0;
    bool reliable = true;  // false on catastrophic-cancellation risk
};

/**
 * Compensated evaluation of the truncated series at x >= 0, with an analytic
 * bound on the dropped tail from the geometric coefficient envelope.
 */
SeriesEval eval_series(const SeriesProfile& profile, double x);

/// Termwise-differentiated series: u'(x).
double eval_series_derivative(const SeriesProfile& profile, double x);

/// Largest x at which no intermediate series term exceeds max_term (bisection).
double series_trust_radius(const SeriesProfile& profile, double max_term = 1e7);

struct ResidualReport {
    std::vector<double> x;
    std::vector<double> residual;
    double max_abs = 0.0;
};

/**
 * Residual of the steady equation
 *   R(x) = mu_{e,p} x Psi'(x) - ∫ G(s) [Psi(a x) Psi(b x) - Psi(x)] ds
 * at the given samples; decreases under N-refinement.
 */
ResidualReport profile_residual(const SeriesProfile& profile, const std::vector<double>& x_samples,
                                double tol = 1e-10);

/// CSV export: header block (p, e, kernel id, b_e, A0) then n,coeff rows.
std::string profile_to_csv(const SeriesProfile& profile, bool timestamp_header,
                           const std::string& timestamp);

}  // namespace gf::selfsim

#endif
