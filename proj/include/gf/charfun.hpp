#ifndef GF_CHARFUN_HPP
#define GF_CHARFUN_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gf/interp.hpp"
#include "gf/kernel.hpp"
#include "gf/vec3.hpp"

namespace gf::charfun {

using Complex = std::complex<double>;

/// exp(z) - 1 without cancellation for small z.
Complex cexpm1(const Complex& z);

/**
 * Catalog of closed-form characteristic functions plus grid-backed radial
 * entries. All catalog members satisfy phi(0) = 1 and |phi| <= 1.
 *
 * Radial entries expose an isotropic interface in x = |xi|^2 / 2 with
 * cancellation-free difference evaluators; the split collision integrals are
 * assembled through it.
 */
class CharFn {
  public:
    static CharFn one();
    /// exp(-t |xi|^2 / 2), the Gaussian of variance t.
    static CharFn gaussian(double t);
    /// exp(-i m.xi - t |xi|^2 / 2); radial only when m = 0.
    static CharFn gaussian_shifted(double t, const Vec3& mean);
    /// exp(-c |xi|^alpha), alpha in (0, 2].
    static CharFn stable(double alpha, double c);
    /// Convex combination; weights must be nonnegative and sum to 1.
    static CharFn mixture(std::vector<std::pair<double, CharFn>> members);
    /// Radial function sampled as u(x); evaluation is interpolation in x.
    static CharFn radial_grid(std::shared_ptr<const MonotoneCubic> u_of_x, double alpha_class);

    Complex eval(const Vec3& xi) const;
    /// phi(xi) - 1, stable near the origin.
    Complex eval_minus_one(const Vec3& xi) const;

    bool radial() const;
    double alpha_class() const { return alpha_class_; }

    // Isotropic interface (radial entries only; throws std::logic_error otherwise).
    double value_x(double x) const;
    double one_minus_x(double x) const;
    /// u(xa) - u(xb) given log(xa/xb) precomputed by the caller.
    double diff_x(double xa, double xb, double log_ratio) const;

    /**
     * ||phi - 1||_alpha. Exact for the stable family at its own exponent and
     * for the Gaussian at alpha = 2; numeric sup on a refined log grid
     * otherwise (may return +inf when the quotient blows up at 0).
     */
    double norm_alpha(double alpha) const;

    std::string id() const;

  private:
    enum class Kind { One, StableX, GaussianShifted, Mixture, RadialGrid };

    CharFn() = default;

    Kind kind_ = Kind::One;
    double p_ = 1.0;     // u(x) = exp(-coef * x^p) for StableX
    double coef_ = 0.0;
    double alpha_class_ = 2.0;
    double gauss_t_ = 0.0;  // GaussianShifted
    Vec3 mean_{};
    std::vector<std::pair<double, CharFn>> members_;
    std::shared_ptr<const MonotoneCubic> grid_;
};

/**
 * Post-collisional Fourier vectors and the Figure-1 geometry:
 *   xi_e^+ = ((1+a_-)/2) xi + (a_+/2)|xi| sigma,
 *   xi_e^- = ((1-a_-)/2) xi - (a_+/2)|xi| sigma,
 *   zeta_e = projection of xi_e^+ on the xi direction, eta_e^+ = xi_e^+ - zeta_e.
 */
struct CollisionGeometry {
    Vec3 xi, sigma, xi_plus, xi_minus, zeta, eta_plus;
    double cos_theta = 1.0;
};

CollisionGeometry xi_split(const Vec3& xi, const Vec3& sigma,
                           const kernels::RestitutionParams& params);

struct DistanceGrid {
    double r_min = 1e-6;
    double r_max = 1e3;
    int n = 241;
    Vec3 direction{0.0, 0.0, 1.0};
};

struct DistanceReport {
    double value = 0.0;
    double argsup = 0.0;  // |xi| attaining the sup
};

/**
 * sup over the grid of |phi(xi) - phi2(xi)| / |xi|^alpha restricted to
 * |xi| <= R (R may be +inf). Monotone nondecreasing in R by construction.
 */
DistanceReport kalpha_distance(const CharFn& phi, const CharFn& phi2, double alpha, double R,
                               const DistanceGrid& grid = {});

struct PsdReport {
    double min_eigenvalue = 0.0;
    bool pass = false;
    double hermitian_defect = 0.0;
};

/**
 * Bochner spot check: assembles M_jk = phi(xi_j - xi_k), verifies Hermitian
 * symmetry and computes the smallest eigenvalue; pass iff >= -tol.
 */
PsdReport psd_spotcheck(const CharFn& phi, const std::vector<Vec3>& points, double tol);

struct RhsOptions {
    double tol = 1e-10;
    int azimuthal_nodes = 64;  // non-radial phi only; must be even
    bool split = true;         // split assembly (required for singular kernels)
};

/**
 * Right-hand side of the Fourier-space collision equation at one point:
 *   ∫_{S^2} b(xi.sigma/|xi|) [phi(xi_e^+) phi(xi_e^-) - phi(xi) phi(0)] dσ.
 *
 * For singular kernels the integrand is assembled in the three-piece split
 * (symmetrized xi_e^+ pair around zeta_e, the zeta-to-xi leg, and the
 * phi(xi_e^-) - 1 leg), each absolutely integrable under the full non-cutoff
 * condition. Radial phi reduces to a 1-D integral in s = sin^2(theta/2);
 * non-radial phi adds a trapezoidal azimuthal average.
 */
Complex collision_rhs(const kernels::KernelModel& kernel,
                      const kernels::RestitutionParams& params, const CharFn& phi, const Vec3& xi,
                      const RhsOptions& opts = {});

struct LemmaReport {
    long samples = 0;
    long violations = 0;
    double max_slack = 0.0;  // max over samples of (LHS - RHS); <= 0 means all hold
    std::map<std::string, long> violations_by_lemma;
    std::map<std::string, long> eta_dominance_violations;  // |eta_e| <= |eta| side check
};

/**
 * Samples (xi, eta, sigma, e) tuples and checks the pointwise
 * characteristic-function and collision-geometry inequalities. Violations are
 * reported, not thrown.
 */
LemmaReport verify_pointwise_lemmas(const CharFn& phi, long n_samples, std::uint64_t seed);

/// Harness variant taking a raw evaluator (used to self-test with corrupted inputs).
LemmaReport verify_pointwise_lemmas_fn(const std::function<Complex(const Vec3&)>& phi,
                                       double alpha, double norm_alpha, long n_samples,
                                       std::uint64_t seed);

}  // namespace gf::charfun

#endif
