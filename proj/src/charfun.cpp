#include "gf/charfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gf/errors.hpp"
#include "gf/quadrature.hpp"
#include "gf/rng.hpp"

namespace gf::charfun {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

Complex cexpm1(const Complex& z) {
    // e^(x+iy) - 1 = (expm1(x) cos y - 2 sin^2(y/2)) + i e^x sin y
    const double x = z.real(), y = z.imag();
    const double sy2 = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sy2 * sy2, std::exp(x) * std::sin(y)};
}

// ---------------------------------------------------------------------------
// CharFn catalog

CharFn CharFn::one() {
    CharFn f;
    f.kind_ = Kind::One;
    f.alpha_class_ = 2.0;
    return f;
}

CharFn CharFn::stable(double alpha, double c) {
    if (!(alpha > 0.0) || alpha > 2.0) throw std::domain_error("stable: alpha must lie in (0, 2]");
    if (!(c >= 0.0)) throw std::domain_error("stable: c must be nonnegative");
    CharFn f;
    f.kind_ = Kind::StableX;
    f.p_ = 0.5 * alpha;
    f.coef_ = c * std::pow(2.0, 0.5 * alpha);  // |xi|^alpha = (2x)^(alpha/2)
    f.alpha_class_ = alpha;
    return f;
}

CharFn CharFn::gaussian(double t) {
    if (!(t >= 0.0)) throw std::domain_error("gaussian: t must be nonnegative");
    return stable(2.0, 0.5 * t);  // exp(-t|xi|^2/2) = exp(-(t/2)|xi|^2)
}

CharFn CharFn::gaussian_shifted(double t, const Vec3& mean) {
    if (mean.norm2() == 0.0) return gaussian(t);
    CharFn f;
    f.kind_ = Kind::GaussianShifted;
    f.gauss_t_ = t;
    f.mean_ = mean;
    f.alpha_class_ = 1.0;  // |phi - 1| ~ |m.xi| near 0
    return f;
}

CharFn CharFn::mixture(std::vector<std::pair<double, CharFn>> members) {
    if (members.empty()) throw std::domain_error("mixture: needs at least one member");
    double wsum = 0.0;
    double amin = 2.0;
    for (const auto& [w, m] : members) {
        if (!(w >= 0.0)) throw std::domain_error("mixture: weights must be nonnegative");
        wsum += w;
        amin = std::min(amin, m.alpha_class_);
    }
    if (std::fabs(wsum - 1.0) > 1e-12) throw std::domain_error("mixture: weights must sum to 1");
    CharFn f;
    f.kind_ = Kind::Mixture;
    f.members_ = std::move(members);
    f.alpha_class_ = amin;
    return f;
}

CharFn CharFn::radial_grid(std::shared_ptr<const MonotoneCubic> u_of_x, double alpha_class) {
    if (!u_of_x) throw std::domain_error("radial_grid: null interpolant");
    CharFn f;
    f.kind_ = Kind::RadialGrid;
    f.grid_ = std::move(u_of_x);
    f.alpha_class_ = alpha_class;
    return f;
}

bool CharFn::radial() const {
    switch (kind_) {
        case Kind::GaussianShifted:
            return false;
        case Kind::Mixture:
            return std::all_of(members_.begin(), members_.end(),
                               [](const auto& m) { return m.second.radial(); });
        default:
            return true;
    }
}

double CharFn::value_x(double x) const {
    switch (kind_) {
        case Kind::One:
            return 1.0;
        case Kind::StableX:
            return std::exp(-coef_ * std::pow(x, p_));
        case Kind::Mixture: {
            double v = 0.0;
            for (const auto& [w, m] : members_) v += w * m.value_x(x);
            return v;
        }
        case Kind::RadialGrid:
            return grid_->eval(x);
        case Kind::GaussianShifted:
            throw std::logic_error("value_x: not a radial characteristic function");
    }
    return 0.0;
}

double CharFn::one_minus_x(double x) const {
    switch (kind_) {
        case Kind::One:
            return 0.0;
        case Kind::StableX:
            return -std::expm1(-coef_ * std::pow(x, p_));
        case Kind::Mixture: {
            double v = 0.0;
            for (const auto& [w, m] : members_) v += w * m.one_minus_x(x);
            return v;
        }
        case Kind::RadialGrid:
            return 1.0 - grid_->eval(x);
        case Kind::GaussianShifted:
            throw std::logic_error("one_minus_x: not a radial characteristic function");
    }
    return 0.0;
}

double CharFn::diff_x(double xa, double xb, double log_ratio) const {
    switch (kind_) {
        case Kind::One:
            return 0.0;
        case Kind::StableX: {
            if (xb == 0.0) return std::exp(-coef_ * std::pow(xa, p_)) - 1.0;
            // xa^p - xb^p = xb^p expm1(p log(xa/xb))
            const double dpow = std::pow(xb, p_) * std::expm1(p_ * log_ratio);
            return std::exp(-coef_ * std::pow(xb, p_)) * std::expm1(-coef_ * dpow);
        }
        case Kind::Mixture: {
            double v = 0.0;
            for (const auto& [w, m] : members_) v += w * m.diff_x(xa, xb, log_ratio);
            return v;
        }
        case Kind::RadialGrid:
            return grid_->eval(xa) - grid_->eval(xb);
        case Kind::GaussianShifted:
            throw std::logic_error("diff_x: not a radial characteristic function");
    }
    return 0.0;
}

Complex CharFn::eval(const Vec3& xi) const {
    if (kind_ == Kind::GaussianShifted) {
        const Complex arg(-0.5 * gauss_t_ * xi.norm2(), -mean_.dot(xi));
        return std::exp(arg);
    }
    if (kind_ == Kind::Mixture) {
        Complex v = 0.0;
        for (const auto& [w, m] : members_) v += w * m.eval(xi);
        return v;
    }
    return value_x(0.5 * xi.norm2());
}

Complex CharFn::eval_minus_one(const Vec3& xi) const {
    switch (kind_) {
        case Kind::GaussianShifted:
            return cexpm1(Complex(-0.5 * gauss_t_ * xi.norm2(), -mean_.dot(xi)));
        case Kind::Mixture: {
            Complex v = 0.0;
            for (const auto& [w, m] : members_) v += w * m.eval_minus_one(xi);
            return v;
        }
        default:
            return {-one_minus_x(0.5 * xi.norm2()), 0.0};
    }
}

double CharFn::norm_alpha(double alpha) const {
    if (kind_ == Kind::One) return 0.0;
    if (kind_ == Kind::StableX) {
        // phi = exp(-c |xi|^alpha_s) with alpha_s = 2p, c = coef / 2^p.
        const double alpha_s = 2.0 * p_;
        const double c = coef_ / std::pow(2.0, p_);
        if (std::fabs(alpha - alpha_s) < 1e-14) return c;  // sup at |xi| -> 0
        if (alpha > alpha_s) return std::numeric_limits<double>::infinity();
    }
    // Numeric sup of |phi - 1| / r^alpha over a refined log grid.
    Vec3 dir{0.0, 0.0, 1.0};
    if (kind_ == Kind::GaussianShifted && mean_.norm() > 0.0) dir = mean_.normalized();
    auto quotient = [&](double r) { return std::abs(eval_minus_one(dir * r)) / std::pow(r, alpha); };
    double best = 0.0, best_r = 1e-8;
    for (int i = 0; i <= 1200; ++i) {
        const double r = 1e-8 * std::pow(1e12 / 1e-8, i / 1200.0);
        const double q = quotient(r);
        if (q > best) {
            best = q;
            best_r = r;
        }
    }
    // Golden refinement around the best grid point.
    double lo = best_r / 1.05, hi = best_r * 1.05;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + 0.381966 * (hi - lo);
        const double m2 = hi - 0.381966 * (hi - lo);
        if (quotient(m1) < quotient(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return std::max(best, quotient(0.5 * (lo + hi)));
}

std::string CharFn::id() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::One:
            os << "one";
            break;
        case Kind::StableX:
            os << "stable(alpha=" << 2.0 * p_ << ",c=" << coef_ / std::pow(2.0, p_) << ")";
            break;
        case Kind::GaussianShifted:
            os << "gaussianShifted(t=" << gauss_t_ << ")";
            break;
        case Kind::Mixture:
            os << "mixture(" << members_.size() << ")";
            break;
        case Kind::RadialGrid:
            os << "radialGrid";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Collision geometry

CollisionGeometry xi_split(const Vec3& xi, const Vec3& sigma,
                           const kernels::RestitutionParams& params) {
    const double xi_norm = xi.norm();
    if (!(xi_norm > 0.0)) throw std::domain_error("xi_split: xi must be nonzero");
    if (std::fabs(sigma.norm() - 1.0) > 1e-12) throw std::domain_error("xi_split: sigma must be a unit vector");

    CollisionGeometry g;
    g.xi = xi;
    g.sigma = sigma;
    g.xi_plus = (0.5 * (1.0 + params.a_minus)) * xi + (0.5 * params.a_plus * xi_norm) * sigma;
    g.xi_minus = (0.5 * (1.0 - params.a_minus)) * xi - (0.5 * params.a_plus * xi_norm) * sigma;
    const Vec3 xi_hat = xi * (1.0 / xi_norm);
    g.zeta = xi_hat * g.xi_plus.dot(xi_hat);
    // Computed vectorially, not from angle formulas: near theta = 0 the angle
    // route cancels catastrophically.
    g.eta_plus = g.xi_plus - g.zeta;
    g.cos_theta = xi_hat.dot(sigma);
    return g;
}

DistanceReport kalpha_distance(const CharFn& phi, const CharFn& phi2, double alpha, double R,
                               const DistanceGrid& grid) {
    if (grid.n < 1 || !(grid.r_min > 0.0) || !(grid.r_max >= grid.r_min)) {
        throw std::domain_error("kalpha_distance: empty or invalid grid");
    }
    const Vec3 dir = grid.direction.normalized();
    DistanceReport rep;
    for (int i = 0; i < grid.n; ++i) {
        const double r =
            grid.n == 1 ? grid.r_min
                        : grid.r_min * std::pow(grid.r_max / grid.r_min,
                                                static_cast<double>(i) / (grid.n - 1));
        if (r > R) break;
        const double q = std::abs(phi.eval(dir * r) - phi2.eval(dir * r)) / std::pow(r, alpha);
        if (q > rep.value) {
            rep.value = q;
            rep.argsup = r;
        }
    }
    return rep;
}

PsdReport psd_spotcheck(const CharFn& phi, const std::vector<Vec3>& points, double tol) {
    const int m = static_cast<int>(points.size());
    if (m < 2) throw std::domain_error("psd_spotcheck: need at least 2 points");
    Eigen::MatrixXcd M(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            const Complex v = phi.eval(points[j] - points[k]);
            M(j, k) = std::complex<double>(v.real(), v.imag());
        }
    }
    PsdReport rep;
    rep.hermitian_defect = (M - M.adjoint()).cwiseAbs().maxCoeff();
    // Symmetrize away rounding before the eigensolve.
    Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.pass = rep.min_eigenvalue >= -tol && rep.hermitian_defect <= 1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// Collision right-hand side

namespace {

void require_well_defined(const kernels::KernelModel& kernel, const CharFn& phi) {
    if (kernel.integrable()) return;
    // Non-cutoff kernel: need the full moment condition at the phi class.
    if (!(kernel.nu() < phi.alpha_class())) {
        throw NonIntegrableError(
            "collision_rhs: kernel singularity nu = " + std::to_string(kernel.nu()) +
            " is not integrable against phi of class alpha = " +
            std::to_string(phi.alpha_class()));
    }
}

// Radial phi: the sphere integral collapses to 1-D in s = sin^2(theta/2).
double rhs_radial(const kernels::KernelModel& kernel, const kernels::RestitutionParams& params,
                  const CharFn& phi, double x, const RhsOptions& opts) {
    if (x == 0.0) return 0.0;
    const double ap = params.a_plus;
    const double m = ap * (1.0 + params.a_minus);
    quad::QuadConfig cfg;
    cfg.abs_tol = opts.tol;
    auto integrand = [&](double s) {
        const double xb = params.b_of_s(s) * x;  // |xi_e^+|^2/2
        const double xa = params.a_of_s(s) * x;  // |xi_e^-|^2/2
        double core;
        if (opts.split) {
            const double one_m_aps = -ap * s;
            const double xz = (1.0 + one_m_aps) * (1.0 + one_m_aps) * x;  // |zeta_e|^2/2
            const double lr_bz = std::log1p(-m * s) - 2.0 * std::log1p(one_m_aps);
            const double lr_zx = 2.0 * std::log1p(one_m_aps);
            const double i1 = phi.diff_x(xb, xz, lr_bz);       // pair-symmetrized xi_e^+ leg
            const double i2 = phi.diff_x(xz, x, lr_zx);        // zeta-to-xi leg
            const double i3 = -phi.value_x(xb) * phi.one_minus_x(xa);
            core = i1 + i2 + i3;
        } else {
            core = phi.value_x(xa) * phi.value_x(xb) - phi.value_x(x);
        }
        return kernel.scaled(s) * core;
    };
    return quad::integrate_graded(integrand, 0.0, kernel.s_max(), cfg).value;
}

// Non-radial phi: graded theta panels times an azimuthal trapezoid. The
// azimuthal nodes come in antipodal pairs, which realizes the symmetrized
// xi_e^+ average exactly.
Complex rhs_nonradial(const kernels::KernelModel& kernel, const kernels::RestitutionParams& params,
                      const CharFn& phi, const Vec3& xi, const RhsOptions& opts) {
    const double r = xi.norm();
    const Vec3 zhat = xi * (1.0 / r);
    const Vec3 e1 = orthogonal_unit(xi);
    const Vec3 e2 = cross(zhat, e1);
    const int naz = std::max(4, opts.azimuthal_nodes + (opts.azimuthal_nodes % 2));
    const double theta_max = 2.0 * std::asin(std::sqrt(kernel.s_max()));

    auto averaged = [&](double theta) -> Complex {
        const double ct = std::cos(theta), st = std::sin(theta);
        Complex acc = 0.0;
        const Complex phi_xi = phi.eval(xi);
        for (int k = 0; k < naz; ++k) {
            const double psi = kTwoPi * k / naz;
            const Vec3 sigma = ct * zhat + st * (std::cos(psi) * e1 + std::sin(psi) * e2);
            const CollisionGeometry g = xi_split(xi, sigma, params);
            if (opts.split) {
                const Complex t1 = phi.eval(g.xi_plus) * phi.eval_minus_one(g.xi_minus);
                const Complex t2 = phi.eval(g.xi_plus) - phi.eval(g.zeta);
                const Complex t3 = phi.eval(g.zeta) - phi_xi;
                acc += t1 + t2 + t3;
            } else {
                acc += phi.eval(g.xi_plus) * phi.eval(g.xi_minus) - phi_xi;
            }
        }
        return acc * (1.0 / naz);
    };

    quad::QuadConfig cfg;
    cfg.abs_tol = opts.tol;
    auto weight = [&](double theta) { return kTwoPi * kernel.angular(std::cos(theta)) * std::sin(theta); };
    const double re = quad::integrate_graded(
                          [&](double th) { return weight(th) * averaged(th).real(); }, 0.0,
                          theta_max, cfg)
                          .value;
    const double im = quad::integrate_graded(
                          [&](double th) { return weight(th) * averaged(th).imag(); }, 0.0,
                          theta_max, cfg)
                          .value;
    return {re, im};
}

}  // namespace

Complex collision_rhs(const kernels::KernelModel& kernel,
                      const kernels::RestitutionParams& params, const CharFn& phi, const Vec3& xi,
                      const RhsOptions& opts) {
    if (!opts.split && !kernel.integrable()) {
        throw NonIntegrableError("collision_rhs: unsplit assembly requires a cutoff kernel");
    }
    require_well_defined(kernel, phi);
    if (phi.radial()) {
        return {rhs_radial(kernel, params, phi, 0.5 * xi.norm2(), opts), 0.0};
    }
    return rhs_nonradial(kernel, params, phi, xi, opts);
}

// ---------------------------------------------------------------------------
// Pointwise lemma verification

namespace {

struct LemmaChecker {
    LemmaReport rep;
    double tol = 1e-10;

    void check(const std::string& name, double lhs, double rhs) {
        const double slack = lhs - rhs;
        rep.max_slack = std::max(rep.max_slack, slack);
        if (slack > tol * (1.0 + std::fabs(rhs))) {
            ++rep.violations;
            ++rep.violations_by_lemma[name];
        }
    }
};

}  // namespace

LemmaReport verify_pointwise_lemmas_fn(const std::function<Complex(const Vec3&)>& phi,
                                       double alpha, double norm_alpha, long n_samples,
                                       std::uint64_t seed) {
    rng::Sampler rng(seed);
    LemmaChecker chk;
    chk.rep.samples = n_samples;
    chk.rep.max_slack = -std::numeric_limits<double>::infinity();

    for (long it = 0; it < n_samples; ++it) {
        const Vec3 xi = rng.unit_sphere() * rng.log_uniform(1e-3, 1e2);
        const Vec3 eta = rng.unit_sphere() * rng.log_uniform(1e-3, 1e2);
        const Vec3 sigma = rng.unit_sphere();
        const auto params = kernels::RestitutionParams::from_e(rng.uniform(1e-6, 1.0));

        const Complex pxi = phi(xi), peta = phi(eta);
        const Complex pdiff = phi(xi - eta), psum = phi(xi + eta);

        // positive-definiteness consequences
        chk.check("l1", std::norm(pxi - peta), 2.0 * (1.0 - pdiff.real()));
        chk.check("l2", std::norm(pxi * peta - psum),
                  (1.0 - std::norm(pxi)) * (1.0 - std::norm(peta)));
        chk.check("l3", std::abs(pxi - psum),
                  norm_alpha * (4.0 * std::pow(xi.norm(), 0.5 * alpha) *
                                    std::pow(eta.norm(), 0.5 * alpha) +
                                std::pow(eta.norm(), alpha)));
        // real/imaginary part controls
        chk.check("re", std::fabs(pxi.real() - 1.0), norm_alpha * std::pow(xi.norm(), alpha));
        chk.check("im", std::fabs(pxi.imag()), norm_alpha * std::pow(xi.norm(), alpha));

        // collision product bounds with the inelastic vectors
        const CollisionGeometry g = xi_split(xi, sigma, params);
        const Complex prod = phi(g.xi_plus) * phi(g.xi_minus) - pxi;
        const double xp_a = std::pow(g.xi_plus.norm(), 0.5 * alpha);
        const double xm_a = std::pow(g.xi_minus.norm(), 0.5 * alpha);
        chk.check("well1", std::abs(prod), 4.0 * xp_a * xm_a * norm_alpha);
        const double ap2 = params.a_plus * params.a_plus;
        const double big =
            0.5 * ((1.0 + params.a_minus) * (1.0 + params.a_minus) + params.a_plus * params.a_plus);
        const double half_ang =
            std::pow(0.25 * (1.0 - g.cos_theta) * (1.0 + g.cos_theta), 0.25 * alpha);
        chk.check("well2", std::abs(prod),
                  4.0 * std::pow(ap2, 0.25 * alpha) * std::pow(big, 0.25 * alpha) * half_ang *
                      std::pow(xi.norm(), alpha) * norm_alpha);

        // side check from the Figure-1 geometry: |eta_e^+| <= |xi| sin(theta/2),
        // |zeta_e - xi| <= |xi| sin^2(theta/2)
        const double s_half = std::sqrt(std::max(0.0, 0.5 * (1.0 - g.cos_theta)));
        if (g.eta_plus.norm() > xi.norm() * s_half * (1.0 + 1e-10) + 1e-300) {
            ++chk.rep.eta_dominance_violations["eta_plus"];
        }
        if ((g.zeta - xi).norm() > xi.norm() * s_half * s_half * (1.0 + 1e-10) + 1e-300) {
            ++chk.rep.eta_dominance_violations["zeta_offset"];
        }
    }
    return chk.rep;
}

LemmaReport verify_pointwise_lemmas(const CharFn& phi, long n_samples, std::uint64_t seed) {
    const double alpha = phi.alpha_class();
    return verify_pointwise_lemmas_fn([&](const Vec3& v) { return phi.eval(v); }, alpha,
                                      phi.norm_alpha(alpha), n_samples, seed);
}

}  // namespace gf::charfun
