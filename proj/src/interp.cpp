#include "gf/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gf {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: nodes must increase");
    }

    // Fritsch-Carlson slopes.
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) {
            d = 0.0;
        } else if (d0 * d1 <= 0.0 && std::fabs(d) > 3.0 * std::fabs(d0)) {
            d = 3.0 * d0;
        }
        return d;
    };
    d_[0] = n == 2 ? delta[0] : end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = n == 2 ? delta[n - 2]
                       : end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

    // Detect geometric spacing of the positive nodes for O(1) lookup.
    if (n >= 4 && x_[1] > 0.0) {
        const std::size_t first = x_[0] == 0.0 ? 1 : 0;
        if (n - first >= 3) {
            const double dlog = std::log(x_[first + 1] / x_[first]);
            bool uniform = dlog > 0.0;
            for (std::size_t i = first; i + 1 < n && uniform; ++i) {
                uniform = std::fabs(std::log(x_[i + 1] / x_[i]) - dlog) < 1e-9 * std::fabs(dlog) + 1e-12;
            }
            if (uniform) {
                log_uniform_ = true;
                log_x1_ = std::log(x_[first]);
                inv_dlog_ = 1.0 / dlog;
            }
        }
    }
}

void MonotoneCubic::set_small_x_closure(double p, double c1, double y_at_zero) {
    if (!(p > 0.0)) throw std::invalid_argument("small-x closure: p must be positive");
    closure_ = true;
    closure_p_ = p;
    closure_c1_ = c1;
    closure_y0_ = y_at_zero;
}

std::size_t MonotoneCubic::locate(double x) const {
    const std::size_t n = x_.size();
    if (log_uniform_) {
        const std::size_t first = x_[0] == 0.0 ? 1 : 0;
        if (x <= x_[first]) return first == 0 ? 0 : 0;  // cell [x0, x1]
        const double fi = (std::log(x) - log_x1_) * inv_dlog_;
        std::size_t i = first + static_cast<std::size_t>(std::max(0.0, fi));
        i = std::min(i, n - 2);
        // Guard against rounding at cell edges.
        while (i > 0 && x < x_[i]) --i;
        while (i + 2 < n && x >= x_[i + 1]) ++i;
        return i;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, n - 2);
}

double MonotoneCubic::eval(double x) const {
    const std::size_t n = x_.size();
    if (!(x >= x_.front()) || x > x_.back()) {
        throw std::domain_error("MonotoneCubic: argument outside node range");
    }
    const std::size_t first_pos = x_[0] == 0.0 ? 1 : 0;
    if (closure_ && first_pos < n && x < x_[first_pos]) {
        return closure_y0_ + closure_c1_ * std::pow(x, closure_p_);
    }
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double fit_power_coefficient(const std::vector<double>& x, const std::vector<double>& y,
                             std::size_t first, std::size_t count, double p, double y0) {
    // One free parameter: c1 = sum (y-y0) x^p / sum x^(2p).
    double num = 0.0, den = 0.0;
    for (std::size_t k = first; k < first + count && k < x.size(); ++k) {
        const double b = std::pow(x[k], p);
        num += (y[k] - y0) * b;
        den += b * b;
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace gf
