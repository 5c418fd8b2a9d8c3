#ifndef GF_INTERP_HPP
#define GF_INTERP_HPP

#include <optional>
#include <vector>

namespace gf {

/**
 * Shape-preserving monotone cubic interpolant (Fritsch-Carlson limited
 * Hermite slopes). On each interval the interpolant stays inside the range of
 * its stencil values, so characteristic-function bounds |u| <= 1 survive
 * interpolation.
 *
 * An optional small-x closure replaces the first-cell cubic by the one-term
 * asymptote u ~ 1 + c1 x^p for arguments below the first positive node; this
 * is where the x^p cusp of infinite-energy data lives, which a cubic cannot
 * represent.
 */
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    /// Enable the power-law closure below x_first (> 0): u(x) = y0 + c1 x^p.
    void set_small_x_closure(double p, double c1, double y_at_zero);

    double eval(double x) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

  private:
    std::vector<double> x_, y_, d_;  // nodes, values, Hermite slopes
    bool closure_ = false;
    double closure_p_ = 1.0, closure_c1_ = 0.0, closure_y0_ = 1.0;
    // log-uniform lookup acceleration (valid when nodes beyond the first are
    // geometrically spaced); falls back to binary search otherwise
    bool log_uniform_ = false;
    double log_x1_ = 0.0, inv_dlog_ = 0.0;

    std::size_t locate(double x) const;
};

/// Least-squares fit of c1 in u ~ y0 + c1 x^p over the given nodes.
double fit_power_coefficient(const std::vector<double>& x, const std::vector<double>& y,
                             std::size_t first, std::size_t count, double p, double y0);

}  // namespace gf

#endif
