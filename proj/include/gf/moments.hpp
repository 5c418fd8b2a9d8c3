#ifndef GF_MOMENTS_HPP
#define GF_MOMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gf/kernel.hpp"
#include "gf/quadrature.hpp"

namespace gf::kernels {

/**
 * lambda_e(q) = ∫_0^1 G(s) [a(s)^q + b(s)^q - 1] ds with a(s) = a_+^2 s and
 * b(s) = 1 - a_+(1+a_-) s. The spherical moment lambda_{e,alpha} equals
 * lambda_e(alpha/2). Defined for all q > 0 (the integral converges for
 * q > beta; for q <= beta on a singular kernel a NonIntegrableError is thrown).
 */
double lambda_e(const KernelModel& kernel, const RestitutionParams& params, double q,
                double tol = 1e-10);

/**
 * Independent evaluation of lambda_{e,alpha} straight from its spherical
 * definition: a graded theta-quadrature of
 * b(cos t) [ (|xi_e^+|^a + |xi_e^-|^a) / |xi|^a - 1 ]
 * with the post-collisional vectors assembled componentwise. Used to pin the
 * G(s) normalization against the s-space route.
 */
double lambda_e_sphere(const KernelModel& kernel, const RestitutionParams& params, double alpha,
                       double tol = 1e-10);

/// gamma_2 = ∫ b dσ (cutoff kernels only; throws NonIntegrableError otherwise).
double gamma2(const KernelModel& kernel, double tol = 1e-10);

/// gamma_{e,alpha} = ∫ b (|xi_e^+|^a + |xi_e^-|^a)/|xi|^a dσ (cutoff kernels only).
double gamma_e_alpha(const KernelModel& kernel, const RestitutionParams& params, double alpha,
                     double tol = 1e-10);

/// Elastic gamma_alpha for the constant kernel, in closed form: 4*pi*c / (alpha/2 + 1).
double gamma_alpha_constant_closed_form(double c, double alpha);

/// mu_{e,p} = lambda_e(p) / p for p in (0, 1).
double mu_e_p(const KernelModel& kernel, const RestitutionParams& params, double p,
              double tol = 1e-10);

struct GammaEN {
    double value = 0.0;   // n lambda_e(p) - lambda_e(n p)
    double lambda_p = 0.0;
    bool positive_regime = false;  // lambda_e(p) > 0, required for gamma_{e,n} > 0
};

/// gamma_{e,n}(p) = n lambda_e(p) - lambda_e(n p), n >= 2.
GammaEN gamma_e_n(const KernelModel& kernel, const RestitutionParams& params, double p, int n,
                  double tol = 1e-10);

/**
 * B_{e,p}(i,j) = Gamma(np+1)/(Gamma(ip+1) Gamma(jp+1)) ∫ G(s) a(s)^(ip) b(s)^(jp) ds,
 * n = i + j. The Gamma ratio is assembled in log space.
 */
double coeff_b(const KernelModel& kernel, const RestitutionParams& params, double p, int i, int j,
               double tol = 1e-10);

/**
 * The constants of the summed-coefficient bound
 *   (1/(n-1)) Σ_{i+j=n} B_{e,p}(i,j) <= k_e C(p, beta),  C = r(p,beta) S(p,beta),
 * valid for kernels dominated by k_e s^(-(1+beta)) with beta < p:
 *   S = Σ_{i>=1} Gamma(ip-beta)/Gamma(ip+1),
 *   r = sup_{n>=2} Gamma(np+1) / ((n-1) Gamma(np+1-beta)).
 */
double series_sum_constant(double p, double beta);

/// b_e = 1 + k_e C(p,beta) / lambda_e(p), the geometric growth base of the series bounds.
double growth_base_b_e(double k_e, double p, double beta, double lambda_p);

/**
 * Scaled-power majorant G(s) <= k_e s^-(1+beta) for an arbitrary kernel,
 * evaluated on (0, s_max]: returns the smallest k_e for the given beta.
 * For bounded kernels any beta in (0, p) works; for the power families the
 * native exponent is required.
 */
double scaled_power_majorant(const KernelModel& kernel, double beta);

// ---------------------------------------------------------------------------
// Moment bookkeeping

enum class MomentKind { Gamma2, GammaEAlpha, LambdaEQ, MuEP, GammaEN, BCoeff };

struct MomentKey {
    MomentKind kind;
    double e;
    double alpha_or_p;
    int i = 0;
    int j = 0;
    bool operator<(const MomentKey& o) const {
        return std::tie(kind, e, alpha_or_p, i, j) < std::tie(o.kind, o.e, o.alpha_or_p, o.i, o.j);
    }
};

struct MomentEntry {
    double value = 0.0;
    double est_error = 0.0;
    double requested_tol = 0.0;
};

/**
 * Table of computed kernel moments. Writes must be externally synchronized
 * (single-writer); reads are safe once populated.
 */
class MomentTable {
  public:
    void put(const MomentKey& key, const MomentEntry& entry);
    std::optional<MomentEntry> get(const MomentKey& key) const;
    std::size_t size() const { return entries_.size(); }

    /// CSV export with columns quantity,e,alpha_or_p,i,j,value,est_error.
    std::string to_csv() const;

  private:
    std::map<MomentKey, MomentEntry> entries_;
};

}  // namespace gf::kernels

#endif
