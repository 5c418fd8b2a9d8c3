#ifndef GF_EVOLVE_HPP
#define GF_EVOLVE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gf/interp.hpp"
#include "gf/kernel.hpp"
#include "gf/selfsim.hpp"

namespace gf::evolve {

struct GridSpec {
    double x_min = 1e-8;
    double x_max = 1e3;
    int n_nodes = 512;  // log-graded positive nodes; x = 0 is an extra exact anchor
};

/**
 * Time-stamped samples of the isotropic characteristic function u(t, x),
 * x = |xi|^2 / 2, on a log-graded grid with the exact anchor u(0) = 1.
 * Interpolation is monotone cubic with a fitted x^p closure below the first
 * positive node.
 */
struct RadialGridState {
    std::vector<double> x;  // x[0] = 0, then log-spaced x_min..x_max
    std::vector<double> u;
    double t = 0.0;
    double small_x_p = 1.0;  // exponent of the sub-x_min asymptote u ~ 1 + c1 x^p

    static RadialGridState sample(const GridSpec& grid, const std::function<double(double)>& u0,
                                  double small_x_p);

    /// Monotone-cubic interpolant with the power closure fitted on the three smallest nodes.
    MonotoneCubic interpolant() const;

    /// Asserts u[0] = 1, |u| <= 1 + 1e-9, all entries finite.
    void validate() const;
};

struct EvolveConfig {
    kernels::KernelModel kernel = kernels::KernelModel::constant(1.0);
    kernels::RestitutionParams params;
    GridSpec grid;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    // Integrating-factor update (the cutoff mild form); defaults to on for
    // cutoff kernels, must stay off for singular ones.
    std::optional<bool> integrating_factor;
    double small_x_p = 1.0;
    int threads = 0;  // 0 = decide from GRANULAR_FOURIER_THREADS / hardware
};

/**
 * du/dt at every node: ∫ G(s) [u(a(s)x) u(b(s)x) - u(x)] ds assembled in the
 * split form [u(ax) - 1] u(bx) + [u(bx) - u(x)] over a fixed graded s-rule
 * with geometric tail closure. a(s), b(s) <= 1, so lookups never exceed x.
 */
std::vector<double> isotropic_rhs(const RadialGridState& state, const EvolveConfig& config);

/// Advances the state to t_target with error-controlled embedded RK stepping.
RadialGridState advance(const RadialGridState& state, const EvolveConfig& config, double t_target);

/// y -> u(t, y e^(-mu t)) resampled on the original grid.
RadialGridState rescale_state(const RadialGridState& state, double mu);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> ratio;     // r(t) = dist(t) / (e^(lambda t) dist(0))
    std::vector<double> distance;  // grid K^alpha distance at each time
    double dist0 = 0.0;
    double lambda = 0.0;
    bool degenerate = false;  // identical initial states
    bool pass = false;
};

/**
 * Evolves two states under the same configuration and reports the contraction
 * ratio in the grid norm sup |u - v| / (2x)^(alpha/2); pass iff
 * r(t) <= 1 + slack at every requested time.
 */
ContractionReport contraction_check(const RadialGridState& u0, const RadialGridState& v0,
                                    const EvolveConfig& config, double alpha,
                                    const std::vector<double>& times, double slack = 5e-3);

struct CutoffStudyReport {
    std::vector<double> n_list;
    std::vector<double> deviation;  // sup-grid gap to the non-cutoff solution
    bool monotone_decreasing = false;
};

/**
 * Evolves u0 under the truncated kernels b_n = min{b, n} for each n and under
 * the direct non-cutoff assembly, reporting sup-grid deviations.
 */
CutoffStudyReport cutoff_convergence(const kernels::KernelModel& kernel,
                                     const std::vector<double>& n_list,
                                     const RadialGridState& u0, double t,
                                     const EvolveConfig& config);

struct ConvergeSnapshot {
    double t = 0.0;
    double D = 0.0;       // sup_{x <= X_eff} |psi(t,x) - Psi(x)| / x^p
    double I1 = 0.0;      // near-field part (= D)
    double I2 = 0.0;      // far-field bound 2 / R^alpha
    double X_eff = 0.0;
};

struct ConvergeReport {
    std::vector<ConvergeSnapshot> snapshots;
    double lambda_p = 0.0;
    double mu_p = 0.0;
    bool k_zero_branch = false;
};

/**
 * Convergence of the rescaled solution to the self-similar profile with
 * matched first coefficient K (or to the constant 1 when K = 0). The
 * effective window X_eff(t) = min(X0 e^(mu t), series trust radius, x_max)
 * grows with the rescaling.
 */
ConvergeReport converge_to_profile(const RadialGridState& u0, const EvolveConfig& config, double p,
                                   double K, const std::vector<double>& t_list, int N,
                                   double X0 = 1.0);

/// CSV trajectory export: header block then rows t,x,u.
std::string trajectory_to_csv(const std::vector<RadialGridState>& states,
                              const EvolveConfig& config, bool timestamp_header,
                              const std::string& timestamp);

}  // namespace gf::evolve

#endif
