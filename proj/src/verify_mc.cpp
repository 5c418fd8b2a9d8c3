#include "gf/verify_mc.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <mutex>
#include <thread>
#include <vector>

#include "gf/errors.hpp"
#include "gf/moments.hpp"
#include "gf/quadrature.hpp"
#include "gf/rng.hpp"

namespace gf::mc {

using kernels::KernelModel;
using kernels::RestitutionParams;

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long kBlock = 65536;

int mc_threads() {
    if (const char* env = std::getenv("GRANULAR_FOURIER_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void require_cutoff(const KernelModel& kernel, const char* what) {
    if (!kernel.integrable()) {
        throw NonIntegrableError(std::string(what) + ": Monte Carlo weights need a cutoff kernel");
    }
}

// b(cos theta) extended by the symmetrized-support convention: zero weight
// outside [0, pi/2] (deflections are folded there by construction).
double b_weight(const KernelModel& kernel, double cos_theta) {
    if (cos_theta < 0.0) return 0.0;
    return kernel.angular(std::min(cos_theta, 1.0));
}

struct Accumulator {
    double sum_re = 0.0, sum_im = 0.0, sum_sq = 0.0;
    long n = 0;

    void add(const std::complex<double>& v) {
        sum_re += v.real();
        sum_im += v.imag();
        sum_sq += std::norm(v);
        ++n;
    }
    void merge(const Accumulator& o) {
        sum_re += o.sum_re;
        sum_im += o.sum_im;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    McEstimate estimate(std::uint64_t seed) const {
        McEstimate e;
        e.n_samples = n;
        e.seed = seed;
        e.value = {sum_re / n, sum_im / n};
        const double var = std::max(0.0, sum_sq / n - std::norm(e.value));
        e.stderr_est = std::sqrt(var / n);
        return e;
    }
};

// Block-parallel sampling with per-block seeds; the reduction runs in fixed
// block order, so the estimate does not depend on the thread count.
template <typename SampleFn>
Accumulator run_blocks(long n, std::uint64_t seed, const SampleFn& sample) {
    const long n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<Accumulator> acc(static_cast<std::size_t>(n_blocks));
    const int threads = mc_threads();
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    auto worker = [&]() {
        while (true) {
            std::size_t b;
            {
                std::lock_guard<std::mutex> lock(mtx);
                if (next >= acc.size()) return;
                b = next++;
            }
            rng::Sampler rng(seed + 0x9e3779b97f4a7c15ULL * (b + 1));
            const long lo = static_cast<long>(b) * kBlock;
            const long hi = std::min(n, lo + kBlock);
            for (long i = lo; i < hi; ++i) acc[b].add(sample(rng));
        }
    };
    const int nt = static_cast<int>(std::max<long>(1, std::min<long>(threads, n_blocks)));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    Accumulator total;
    for (const auto& a : acc) total.merge(a);
    return total;
}

Vec3 sample_gaussian(const VelocityLaw& law, rng::Sampler& rng) {
    const double sd = std::sqrt(law.variance);
    return law.mean + sd * rng.normal3();
}

}  // namespace

VelocityLaw VelocityLaw::gaussian(const Vec3& mean, double variance) {
    if (!(variance > 0.0)) throw std::domain_error("VelocityLaw: variance must be positive");
    return {mean, variance};
}

charfun::CharFn VelocityLaw::hat() const {
    return charfun::CharFn::gaussian_shifted(variance, mean);
}

McEstimate mc_gain_transform(const VelocityLaw& f, const VelocityLaw& g,
                             const RestitutionParams& params, const KernelModel& kernel,
                             const Vec3& xi, long n, std::uint64_t seed) {
    require_cutoff(kernel, "mc_gain_transform");
    if (n < 10000) throw std::domain_error("mc_gain_transform: need n >= 1e4");
    auto acc = run_blocks(n, seed, [&](rng::Sampler& rng) -> std::complex<double> {
        const Vec3 v = sample_gaussian(f, rng);
        const Vec3 vstar = sample_gaussian(g, rng);
        const Vec3 sigma = rng.unit_sphere();
        const Vec3 u = v - vstar;
        const double un = u.norm();
        const double ct = un > 0.0 ? u.dot(sigma) / un : 1.0;
        const double w = kFourPi * b_weight(kernel, ct);
        if (w == 0.0) return {0.0, 0.0};
        const Vec3 vprime = 0.5 * (v + vstar) + (0.5 * params.a_minus) * u +
                            (0.5 * params.a_plus * un) * sigma;
        const double phase = -vprime.dot(xi);
        return {w * std::cos(phase), w * std::sin(phase)};
    });
    return acc.estimate(seed);
}

std::complex<double> sphere_gain_transform(const charfun::CharFn& f_hat,
                                           const charfun::CharFn& g_hat,
                                           const RestitutionParams& params,
                                           const KernelModel& kernel, const Vec3& xi, double tol,
                                           int azimuthal_nodes) {
    require_cutoff(kernel, "sphere_gain_transform");
    const double r = xi.norm();
    if (r == 0.0) {
        // xi_e^{+-} = 0: the integrand reduces to b itself.
        return {kernels::gamma2(kernel, tol), 0.0};
    }
    const Vec3 zhat = xi * (1.0 / r);
    const Vec3 e1 = orthogonal_unit(xi);
    const Vec3 e2 = cross(zhat, e1);
    const bool radial = f_hat.radial() && g_hat.radial();
    const int naz = radial ? 1 : std::max(4, azimuthal_nodes + (azimuthal_nodes % 2));
    const double theta_max = 2.0 * std::asin(std::sqrt(kernel.s_max()));

    auto averaged = [&](double theta, bool imag_part) {
        const double ct = std::cos(theta), st = std::sin(theta);
        std::complex<double> acc = 0.0;
        for (int k = 0; k < naz; ++k) {
            const double psi = kTwoPi * k / naz;
            const Vec3 sigma = ct * zhat + st * (std::cos(psi) * e1 + std::sin(psi) * e2);
            const auto geo = charfun::xi_split(xi, sigma, params);
            acc += f_hat.eval(geo.xi_plus) * g_hat.eval(geo.xi_minus);
        }
        const std::complex<double> mean = acc * (1.0 / static_cast<double>(naz));
        return imag_part ? mean.imag() : mean.real();
    };

    quad::QuadConfig cfg;
    cfg.abs_tol = tol;
    auto part = [&](bool imag_part) {
        return quad::integrate_graded(
                   [&](double th) {
                       return kTwoPi * kernel.angular(std::cos(th)) * std::sin(th) *
                              averaged(th, imag_part);
                   },
                   0.0, theta_max, cfg)
            .value;
    };
    const double re = part(false);
    const double im = radial ? 0.0 : part(true);
    return {re, im};
}

MomentProduction moment_production(const VelocityLaw& f, const RestitutionParams& params,
                                   const KernelModel& kernel, long n, std::uint64_t seed) {
    require_cutoff(kernel, "moment_production");
    if (n < 100000) throw std::domain_error("moment_production: need n >= 1e5");

    // One pass per functional keeps the accumulators scalar and the block
    // reduction deterministic.
    auto run_scalar = [&](auto&& delta_phi, std::uint64_t s) {
        return run_blocks(n, s, [&](rng::Sampler& rng) -> std::complex<double> {
            const Vec3 v = sample_gaussian(f, rng);
            const Vec3 vstar = sample_gaussian(f, rng);
            const Vec3 sigma = rng.unit_sphere();
            const Vec3 u = v - vstar;
            const double un = u.norm();
            const double ct = un > 0.0 ? u.dot(sigma) / un : 1.0;
            const double w = kFourPi * b_weight(kernel, ct);
            if (w == 0.0) return {0.0, 0.0};
            const Vec3 vprime = 0.5 * (v + vstar) + (0.5 * params.a_minus) * u +
                                (0.5 * params.a_plus * un) * sigma;
            return {w * delta_phi(v, vprime), 0.0};
        }).estimate(s);
    };

    MomentProduction out;
    out.mass = run_scalar([](const Vec3&, const Vec3&) { return 0.0; }, seed);
    out.momentum[0] = run_scalar([](const Vec3& v, const Vec3& vp) { return vp.x - v.x; }, seed);
    out.momentum[1] = run_scalar([](const Vec3& v, const Vec3& vp) { return vp.y - v.y; }, seed);
    out.momentum[2] = run_scalar([](const Vec3& v, const Vec3& vp) { return vp.z - v.z; }, seed);
    out.energy = run_scalar(
        [](const Vec3& v, const Vec3& vp) { return vp.norm2() - v.norm2(); }, seed);

    // Closed form: -(1/2) a+ a- <(1-cos)>_b E|v-v*|^2, with
    // <(1-cos)>_b = ∫ G(s) 2s ds and E|v-v*|^2 = 6 sigma^2 for equal Gaussians.
    quad::QuadConfig cfg;
    const double one_minus_cos_moment =
        quad::integrate_graded([&](double s) { return kernel.scaled(s) * 2.0 * s; }, 0.0,
                               kernel.s_max(), cfg)
            .value;
    out.energy_reference =
        -0.5 * params.a_plus * params.a_minus * one_minus_cos_moment * (6.0 * f.variance);
    return out;
}

namespace {

CollisionEnergyStats stats_from(const Accumulator& acc_d, const Accumulator& acc_d2,
                                double mean_w) {
    CollisionEnergyStats st;
    st.mean_weight = mean_w;
    const auto e1 = acc_d.estimate(0);
    const auto e2 = acc_d2.estimate(0);
    st.mean_delta = e1.value.real();
    st.mean_delta2 = e2.value.real();
    st.stderr_delta = e1.stderr_est;
    st.stderr_delta2 = e2.stderr_est;
    return st;
}

}  // namespace

CollisionEnergyStats collision_energy_stats_sigma(const VelocityLaw& f,
                                                  const RestitutionParams& params,
                                                  const KernelModel& kernel, long n,
                                                  std::uint64_t seed) {
    require_cutoff(kernel, "collision_energy_stats_sigma");
    Accumulator acc_d, acc_d2;
    double sum_w = 0.0;
    rng::Sampler rng(seed);
    for (long i = 0; i < n; ++i) {
        const Vec3 v = sample_gaussian(f, rng);
        const Vec3 vstar = sample_gaussian(f, rng);
        const Vec3 sigma = rng.unit_sphere();
        const Vec3 u = v - vstar;
        const double un = u.norm();
        const double ct = un > 0.0 ? u.dot(sigma) / un : 1.0;
        const double w = kFourPi * b_weight(kernel, ct);
        // Total kinetic-energy change of the pair.
        const double delta = -params.a_plus * params.a_minus * (1.0 - ct) * u.norm2();
        acc_d.add({w * delta, 0.0});
        acc_d2.add({w * delta * delta, 0.0});
        sum_w += w;
    }
    return stats_from(acc_d, acc_d2, sum_w / n);
}

CollisionEnergyStats collision_energy_stats_omega(const VelocityLaw& f,
                                                  const RestitutionParams& params,
                                                  const KernelModel& kernel, long n,
                                                  std::uint64_t seed) {
    require_cutoff(kernel, "collision_energy_stats_omega");
    Accumulator acc_d, acc_d2;
    double sum_w = 0.0;
    rng::Sampler rng(seed);
    for (long i = 0; i < n; ++i) {
        const Vec3 v = sample_gaussian(f, rng);
        const Vec3 vstar = sample_gaussian(f, rng);
        const Vec3 omega = rng.unit_sphere();
        const Vec3 u = v - vstar;
        const double un = u.norm();
        const double cw = un > 0.0 ? u.dot(omega) / un : 1.0;
        // sigma = u_hat - 2 (u_hat.w) w maps dσ = 4 |u_hat.w| dω and
        // cos theta = 1 - 2 (u_hat.w)^2.
        const double ct = 1.0 - 2.0 * cw * cw;
        const double w = kFourPi * 4.0 * std::fabs(cw) * b_weight(kernel, ct);
        const double delta = -2.0 * params.a_plus * params.a_minus * (cw * cw) * u.norm2();
        acc_d.add({w * delta, 0.0});
        acc_d2.add({w * delta * delta, 0.0});
        sum_w += w;
    }
    return stats_from(acc_d, acc_d2, sum_w / n);
}

}  // namespace gf::mc
