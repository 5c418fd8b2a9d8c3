#ifndef GF_KERNEL_HPP
#define GF_KERNEL_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gf/quadrature.hpp"

namespace gf::kernels {

/**
 * Restitution parameters of the inelastic collision law.
 * a_plus + a_minus = 1 and a_plus - a_minus = e hold exactly.
 */
struct RestitutionParams {
    double e = 1.0;
    double a_plus = 1.0;
    double a_minus = 0.0;

    static RestitutionParams from_e(double e);

    // Collision geometry in the isotropic variable s = sin^2(theta/2):
    // the two contraction factors applied to x = |xi|^2 / 2.
    double a_of_s(double s) const { return a_plus * a_plus * s; }
    double b_of_s(double s) const { return 1.0 - a_plus * (1.0 + a_minus) * s; }
};

enum class KernelFamily { Constant, PowerSingular, ScaledPower, Tabulated };

/**
 * Angular collision kernel b(cos theta) of a Maxwellian molecule model,
 * kept in symmetrized form on theta in [0, pi/2].
 *
 * Families:
 *   Constant       b = c on the support.
 *   PowerSingular  b = kappa * (2 sin(theta/2))^(-2-nu); behaves like
 *                  kappa * theta^(-2-nu) as theta -> 0.
 *   ScaledPower    defined directly in s-space: G(s) = k_e * s^(-(1+beta))
 *                  for s <= s_max, with s = sin^2(theta/2).
 *   Tabulated      linear interpolation of (s, G) samples.
 *
 * The scaled form used everywhere downstream is G(s) = 4*pi*b(1 - 2s), which
 * makes ∫_{S^2} F(cos theta) b dσ = ∫_0^{s_max} G(s) F(1-2s) ds exactly.
 * Kernels built with symmetrized=false are folded onto [0, pi/2] as
 * b(theta) + b(pi - theta) at construction.
 */
class KernelModel {
  public:
    static KernelModel constant(double c, bool symmetrized = true);
    static KernelModel power_singular(double kappa, double nu, bool symmetrized = true);
    static KernelModel scaled_power(double k_e, double beta);
    static KernelModel tabulated(std::vector<double> s, std::vector<double> g);

    /// b(cos theta) on the symmetrized support; cos_theta must lie in [0, 1].
    double angular(double cos_theta) const;

    /// G(s) for s in (0, 1); zero outside the support, min'ed with any cutoff bound.
    double scaled(double s) const;

    /// b_n = min{b, n}: pointwise bounded (hence cutoff) truncation.
    KernelModel truncated(double bound) const;

    KernelFamily family() const { return family_; }
    double strength() const { return strength_; }
    double nu() const { return nu_; }

    /// s-space singularity exponent: G ~ s^(-(1+beta)) as s -> 0 (0 for bounded kernels).
    double singular_beta() const;

    double s_max() const { return s_max_; }
    double truncation_bound() const { return bound_; }
    bool is_truncated() const { return bound_ < std::numeric_limits<double>::infinity(); }

    /// True when ∫ b dσ is finite, decided from the family closed forms.
    bool integrable() const;

    std::string id() const;

  private:
    KernelModel() = default;

    KernelFamily family_ = KernelFamily::Constant;
    double strength_ = 0.0;  // c, kappa, or k_e
    double nu_ = 0.0;        // PowerSingular only
    double beta_ = 0.0;      // s-space exponent for the power families
    double s_max_ = 0.5;
    bool folded_ = false;  // symmetrized from a full-sphere kernel
    double bound_ = std::numeric_limits<double>::infinity();
    std::vector<double> tab_s_, tab_g_;
};

struct KernelClassification {
    bool cutoff = false;    // ∫ b dσ < ∞
    bool mild_ok = false;   // (1-s)^(a0/4) (1+s)^(a0/4) b(s) integrable
    bool full_ok = false;   // ∫ sin^(a0)(theta/2) b sin(theta) dtheta < ∞
    double mass_estimate = 0.0;
    double mild_estimate = 0.0;
    double full_estimate = 0.0;
};

/**
 * Numeric classification of a kernel by adaptive quadrature with divergence
 * detection at the given moment order alpha0 in (0, 2].
 */
KernelClassification classify_kernel(const KernelModel& kernel, double alpha0,
                                     const quad::QuadConfig& cfg = {});

}  // namespace gf::kernels

#endif
