#ifndef GF_VERIFY_MC_HPP
#define GF_VERIFY_MC_HPP

#include <complex>
#include <cstdint>

#include "gf/charfun.hpp"
#include "gf/kernel.hpp"
#include "gf/vec3.hpp"

namespace gf::mc {

/**
 * Velocity-space sampling law. Gaussian only: the characteristic function is
 * available in closed form, exp(-i m.xi - sigma^2 |xi|^2 / 2).
 */
struct VelocityLaw {
    Vec3 mean{};
    double variance = 1.0;  // per-coordinate

    static VelocityLaw gaussian(const Vec3& mean, double variance);
    charfun::CharFn hat() const;
};

struct McEstimate {
    std::complex<double> value{};
    double stderr_est = 0.0;  // sample std / sqrt(n), combined over Re and Im
    long n_samples = 0;
    std::uint64_t seed = 0;
};

/**
 * Monte Carlo estimate of F[Q_e^+(g, f)](xi): draws v ~ f, v* ~ g, sigma
 * uniform on S^2 and averages 4 pi b(cos theta) e^(-i v'.xi) with v' from the
 * restitution collision law. Cutoff kernels only. Deterministic for a fixed
 * seed; sample blocks are reduced in fixed order regardless of thread count.
 */
McEstimate mc_gain_transform(const VelocityLaw& f, const VelocityLaw& g,
                             const kernels::RestitutionParams& params,
                             const kernels::KernelModel& kernel, const Vec3& xi, long n,
                             std::uint64_t seed);

/**
 * Deterministic spectral side of the same transform:
 * ∫ b(xi.sigma/|xi|) f_hat(xi_e^+) g_hat(xi_e^-) dσ by graded theta panels
 * times an azimuthal trapezoid.
 */
std::complex<double> sphere_gain_transform(const charfun::CharFn& f_hat,
                                           const charfun::CharFn& g_hat,
                                           const kernels::RestitutionParams& params,
                                           const kernels::KernelModel& kernel, const Vec3& xi,
                                           double tol = 1e-10, int azimuthal_nodes = 64);

struct MomentProduction {
    McEstimate mass;
    McEstimate momentum[3];
    McEstimate energy;
    double energy_reference = 0.0;  // closed form for the Gaussian fixture
};

/**
 * MC estimate of ∫ Q_e(f,f) phi dv for phi in {1, v, |v|^2} via
 * E[4 pi b (phi(v') - phi(v))]. The energy reference is
 * -(1/2) a_+ a_- <(1-cos theta)>_b E|v - v*|^2.
 */
MomentProduction moment_production(const VelocityLaw& f, const kernels::RestitutionParams& params,
                                   const kernels::KernelModel& kernel, long n, std::uint64_t seed);

struct CollisionEnergyStats {
    double mean_weight = 0.0;
    double mean_delta = 0.0;   // E[w * delta E] / n
    double mean_delta2 = 0.0;  // E[w * (delta E)^2] / n
    double stderr_delta = 0.0;
    double stderr_delta2 = 0.0;
};

/**
 * Energy-transfer statistics of single collisions sampled in the sigma
 * parametrization or in the omega (impact-direction) parametrization with
 * the matching kernel weight 4 |u.w| b(1 - 2 (u.w)^2). The two agree in
 * distribution.
 */
CollisionEnergyStats collision_energy_stats_sigma(const VelocityLaw& f,
                                                  const kernels::RestitutionParams& params,
                                                  const kernels::KernelModel& kernel, long n,
                                                  std::uint64_t seed);
CollisionEnergyStats collision_energy_stats_omega(const VelocityLaw& f,
                                                  const kernels::RestitutionParams& params,
                                                  const kernels::KernelModel& kernel, long n,
                                                  std::uint64_t seed);

}  // namespace gf::mc

#endif
