#ifndef GF_QUADRATURE_HPP
#define GF_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace gf::quad {

struct QuadConfig {
    double abs_tol = 1e-10;
    // Smallest panel width for value-producing quadratures. Finiteness probes
    // are allowed to refine deeper (see probe()).
    double min_panel = 1e-14;
    double divergence_ceiling = 1e12;
    int max_panel_depth = 14;  // recursive splits inside one dyadic panel
};

struct QuadResult {
    double value = 0.0;
    double est_error = 0.0;
    bool diverged = false;
    long evals = 0;
};

/**
 * Integral of f over (lo, hi) where f may carry an integrable power-type
 * endpoint singularity at either end.
 *
 * Scheme: the interval is halved at the midpoint and each half is covered by
 * dyadic panels graded geometrically (ratio 2) toward its endpoint, with
 * 16-point Gauss-Legendre per panel and one level of h-refinement as error
 * estimate. The un-covered sliver next to each endpoint is closed by
 * geometric extrapolation of the panel-sum sequence, which is exact for
 * power-law behaviour and also enables early exit once the extrapolated
 * remainder is certified below tolerance.
 */
QuadResult integrate_graded(const std::function<double(double)>& f, double lo, double hi,
                            const QuadConfig& cfg = {});

/**
 * Finiteness probe for ∫ f over (lo, hi) with a suspected singularity at lo.
 * Refines past min_panel; declares divergence when the panel sum exceeds the
 * configured ceiling while the last-panel contribution is still growing, or
 * when contributions stall (ratio >= 0.999 sustained, the log-divergence
 * signature). On convergence the result carries the extrapolated value.
 */
QuadResult probe_lower_end(const std::function<double(double)>& f, double lo, double hi,
                           const QuadConfig& cfg = {});

/// Plain 16-point Gauss-Legendre on [a, b]; building block, exposed for tests.
double gauss16(const std::function<double(double)>& f, double a, double b);

/**
 * Precomputed fixed rule for bulk right-hand-side assembly: dyadic panels on
 * (0, s_max] graded toward zero, 16 Gauss nodes each, panels stored
 * deepest-first so a per-integrand geometric tail correction can be read off
 * the two deepest panel sums.
 */
struct FixedGradedRule {
    std::vector<double> nodes;    // all abscissae, deepest panel first
    std::vector<double> weights;  // matching weights
    std::vector<int> panel_offset;  // panel p occupies [offset[p], offset[p+1])
    double s_max = 0.0;

    static FixedGradedRule build(double s_max, double min_panel = 1e-14);

    /**
     * Sum w_i * f_i over the rule given integrand values at the nodes, plus
     * the geometric tail estimate for the sliver below the deepest panel.
     */
    double apply(const std::vector<double>& f_values) const;
};

}  // namespace gf::quad

#endif
