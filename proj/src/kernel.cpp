#include "gf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gf::kernels {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
}  // namespace

RestitutionParams RestitutionParams::from_e(double e) {
    if (!(e > 0.0) || e > 1.0) {
        throw std::domain_error("restitution coefficient must lie in (0, 1]");
    }
    RestitutionParams p;
    p.e = e;
    p.a_plus = 0.5 * (1.0 + e);
    p.a_minus = 0.5 * (1.0 - e);
    return p;
}

KernelModel KernelModel::constant(double c, bool symmetrized) {
    if (!(c > 0.0)) throw std::domain_error("constant kernel needs c > 0");
    KernelModel k;
    k.family_ = KernelFamily::Constant;
    k.strength_ = symmetrized ? c : 2.0 * c;  // fold b(theta) + b(pi-theta)
    k.folded_ = !symmetrized;
    return k;
}

KernelModel KernelModel::power_singular(double kappa, double nu, bool symmetrized) {
    if (!(kappa > 0.0)) throw std::domain_error("power kernel needs kappa > 0");
    if (!(nu >= 0.0) || nu >= 2.0) throw std::domain_error("singularity exponent nu must lie in [0, 2)");
    KernelModel k;
    k.family_ = KernelFamily::PowerSingular;
    k.strength_ = kappa;
    k.nu_ = nu;
    k.beta_ = 0.5 * nu;
    k.folded_ = !symmetrized;
    return k;
}

KernelModel KernelModel::scaled_power(double k_e, double beta) {
    if (!(k_e > 0.0)) throw std::domain_error("scaled power kernel needs k_e > 0");
    if (!(beta > 0.0) || beta >= 1.0) throw std::domain_error("beta must lie in (0, 1)");
    KernelModel k;
    k.family_ = KernelFamily::ScaledPower;
    k.strength_ = k_e;
    k.beta_ = beta;
    k.nu_ = 2.0 * beta;
    return k;
}

KernelModel KernelModel::tabulated(std::vector<double> s, std::vector<double> g) {
    if (s.size() != g.size() || s.size() < 2) {
        throw std::domain_error("tabulated kernel needs matching s/G samples");
    }
    KernelModel k;
    k.family_ = KernelFamily::Tabulated;
    k.tab_s_ = std::move(s);
    k.tab_g_ = std::move(g);
    k.s_max_ = k.tab_s_.back();
    return k;
}

double KernelModel::angular(double cos_theta) const {
    if (!(cos_theta >= 0.0) || cos_theta > 1.0) {
        throw std::domain_error("cos(theta) outside symmetrized support [0, 1]");
    }
    const double s = 0.5 * (1.0 - cos_theta);
    return scaled(std::max(s, 1e-300)) / kFourPi;
}

double KernelModel::scaled(double s) const {
    if (!(s > 0.0) || s >= 1.0) throw std::domain_error("scaled kernel argument s must lie in (0, 1)");
    if (s > s_max_) return 0.0;
    double g = 0.0;
    switch (family_) {
        case KernelFamily::Constant:
            g = kFourPi * strength_;
            break;
        case KernelFamily::PowerSingular: {
            // b = kappa (2 sin(theta/2))^(-2-nu) gives G = 4 pi kappa (4 s)^(-1-nu/2).
            g = kFourPi * strength_ * std::pow(4.0 * s, -(1.0 + beta_));
            if (folded_) g += kFourPi * strength_ * std::pow(4.0 * (1.0 - s), -(1.0 + beta_));
            break;
        }
        case KernelFamily::ScaledPower:
            g = strength_ * std::pow(s, -(1.0 + beta_));
            break;
        case KernelFamily::Tabulated: {
            auto it = std::upper_bound(tab_s_.begin(), tab_s_.end(), s);
            if (it == tab_s_.begin()) {
                g = tab_g_.front();
            } else if (it == tab_s_.end()) {
                g = tab_g_.back();
            } else {
                const size_t i = static_cast<size_t>(it - tab_s_.begin());
                const double w = (s - tab_s_[i - 1]) / (tab_s_[i] - tab_s_[i - 1]);
                g = (1.0 - w) * tab_g_[i - 1] + w * tab_g_[i];
            }
            break;
        }
    }
    return std::min(g, kFourPi * bound_);
}

KernelModel KernelModel::truncated(double bound) const {
    if (!(bound > 0.0)) throw std::domain_error("truncation bound must be positive");
    KernelModel k = *this;
    k.bound_ = std::min(bound_, bound);
    return k;
}

double KernelModel::singular_beta() const {
    if (is_truncated() || family_ == KernelFamily::Constant || family_ == KernelFamily::Tabulated) {
        return 0.0;
    }
    return beta_;
}

bool KernelModel::integrable() const {
    if (is_truncated()) return true;
    switch (family_) {
        case KernelFamily::Constant:
        case KernelFamily::Tabulated:
            return true;
        case KernelFamily::PowerSingular:
        case KernelFamily::ScaledPower:
            return beta_ <= 0.0;
    }
    return true;
}

std::string KernelModel::id() const {
    std::ostringstream os;
    switch (family_) {
        case KernelFamily::Constant:
            os << "constant(c=" << strength_ << ")";
            break;
        case KernelFamily::PowerSingular:
            os << "powerSingular(kappa=" << strength_ << ",nu=" << nu_ << ")";
            break;
        case KernelFamily::ScaledPower:
            os << "scaledPower(k_e=" << strength_ << ",beta=" << beta_ << ")";
            break;
        case KernelFamily::Tabulated:
            os << "tabulated(" << tab_s_.size() << ")";
            break;
    }
    if (is_truncated()) os << "|min(" << bound_ << ")";
    return os.str();
}

KernelClassification classify_kernel(const KernelModel& kernel, double alpha0,
                                     const quad::QuadConfig& cfg) {
    if (!(alpha0 > 0.0) || alpha0 > 2.0) throw std::domain_error("alpha0 must lie in (0, 2]");
    KernelClassification rep;

    // (i) total mass ∫ b dσ = ∫ G(s) ds.
    auto mass = quad::probe_lower_end([&](double s) { return kernel.scaled(s); }, 0.0,
                                      kernel.s_max(), cfg);
    rep.cutoff = !mass.diverged;
    rep.mass_estimate = mass.diverged ? std::numeric_limits<double>::infinity() : mass.value;

    // (ii) mild condition: (1-t)^(a0/4) (1+t)^(a0/4) b(t) in L^1(-1,1) with t = cos(theta),
    // written in s = (1-t)/2.
    auto mild = quad::probe_lower_end(
        [&](double s) {
            return std::pow(4.0 * s * (1.0 - s), 0.25 * alpha0) * kernel.scaled(s) /
                   (2.0 * kPi);
        },
        0.0, kernel.s_max(), cfg);
    rep.mild_ok = !mild.diverged;
    rep.mild_estimate = mild.diverged ? std::numeric_limits<double>::infinity() : mild.value;

    // (iii) full non-cutoff moment: ∫ sin^(a0)(theta/2) b sin(theta) dtheta
    //       = (1/2pi) ∫ s^(a0/2) G(s) ds.
    auto full = quad::probe_lower_end(
        [&](double s) { return std::pow(s, 0.5 * alpha0) * kernel.scaled(s) / (2.0 * kPi); },
        0.0, kernel.s_max(), cfg);
    rep.full_ok = !full.diverged;
    rep.full_estimate = full.diverged ? std::numeric_limits<double>::infinity() : full.value;

    return rep;
}

}  // namespace gf::kernels
