#include "gf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gf::quad {

namespace {

// 16-point Gauss-Legendre abscissae/weights on [-1, 1].
constexpr double kGx[8] = {
    0.09501250983763744018531934, 0.28160355077925891323046050,
    0.45801677765722738634241944, 0.61787624440264374844667176,
    0.75540440835500303389510119, 0.86563120238783174388046790,
    0.94457502307323257607798842, 0.98940093499164993259615417};
constexpr double kGw[8] = {
    0.18945061045506849628539672, 0.18260341504492358886676366,
    0.16915651939500253818931208, 0.14959598881657673208150173,
    0.12462897125553387205247628, 0.09515851168249278480992511,
    0.06225352393864789286284384, 0.02715245941175409485178057};

struct PanelEval {
    double value;
    double err;
    long evals;
};

double gl16(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        s += kGw[i] * (f(c + h * kGx[i]) + f(c - h * kGx[i]));
    }
    return s * h;
}

// One panel with recursive h-refinement until the coarse/fine difference is
// within the local budget. The 1e-13 relative floor stops refinement once the
// difference is dominated by rounding noise of the integrand itself, where
// further splitting cannot converge.
PanelEval panel_adaptive(const std::function<double(double)>& f, double a, double b,
                         double budget, int depth, int max_depth) {
    const double coarse = gl16(f, a, b);
    const double m = 0.5 * (a + b);
    const double fine = gl16(f, a, m) + gl16(f, m, b);
    const double err = std::fabs(fine - coarse);
    const double noise_floor = 1e-13 * std::max(std::fabs(fine), std::fabs(coarse));
    if (err <= budget || err <= noise_floor || depth >= max_depth || !(b - a > 0)) {
        return {fine, err, 48};
    }
    PanelEval l = panel_adaptive(f, a, m, 0.5 * budget, depth + 1, max_depth);
    PanelEval r = panel_adaptive(f, m, b, 0.5 * budget, depth + 1, max_depth);
    return {l.value + r.value, l.err + r.err, l.evals + r.evals + 48};
}

// Geometric remainder of the panel-sum sequence: if consecutive contributions
// P_{k-1}, P_k shrink with a stable ratio r in (0, r_cap), the part of the
// integral below the deepest panel is P_k * r / (1 - r).
struct TailState {
    double p_prev2 = 0.0, p_prev = 0.0, p_last = 0.0;
    int have = 0;

    void push(double p) {
        p_prev2 = p_prev;
        p_prev = p_last;
        p_last = p;
        ++have;
    }
    bool ratio_ok(double r_cap) const {
        if (have < 3) return false;
        if (p_prev == 0.0 || p_prev2 == 0.0) return false;
        const double r1 = p_last / p_prev;
        const double r2 = p_prev / p_prev2;
        return r1 > 0.0 && r1 < r_cap && r2 > 0.0 && r2 < r_cap;
    }
    double tail() const { return p_last * (p_last / p_prev) / (1.0 - p_last / p_prev); }
    // Tail recomputed with the previous ratio; the spread is the error proxy.
    double tail_alt() const { return p_last * (p_prev / p_prev2) / (1.0 - p_prev / p_prev2); }
};

// Iterated Aitken extrapolation of the partial-sum sequence. One round is the
// geometric-tail formula; the second round removes a secondary power-law
// component (graded panels of s^c integrands produce sums with several
// geometric pieces, and a single ratio leaves a visible bias).
struct AitkenClose {
    double value = 0.0;
    double err = std::numeric_limits<double>::infinity();
    bool ok = false;
};

AitkenClose aitken_close(const std::vector<double>& sums) {
    AitkenClose out;
    if (sums.size() < 5) return out;
    std::vector<double> a(sums.end() - std::min<std::size_t>(sums.size(), 8), sums.end());
    out.value = a.back();
    for (int round = 0; round < 2 && a.size() >= 3; ++round) {
        std::vector<double> b;
        bool rounding_converged = false;
        for (std::size_t i = 0; i + 2 < a.size(); ++i) {
            const double d1 = a[i + 1] - a[i];
            const double d2 = a[i + 2] - 2.0 * a[i + 1] + a[i];
            if (std::fabs(d2) < 1e-300 ||
                std::fabs(d2) < 1e-14 * (std::fabs(a[i]) + std::fabs(a[i + 2]))) {
                rounding_converged = true;
                break;
            }
            b.push_back(a[i] - d1 * d1 / d2);
        }
        if (rounding_converged || b.empty()) {
            // Differences at rounding level: whatever we have has converged.
            out.ok = true;
            out.err = std::min(out.err, 1e-14 * std::fabs(out.value) + 1e-300);
            return out;
        }
        if (round == 1) {
            out.ok = true;
            out.err = std::fabs(b.back() - out.value);  // spread between rounds
            if (b.size() >= 2) out.err = std::max(out.err, std::fabs(b.back() - b[b.size() - 2]));
        }
        out.value = b.back();
        a = std::move(b);
    }
    return out;
}

// Core loop: dyadic panels from `hi` toward the singular endpoint at 0.
// `probe` relaxes the min-panel floor and turns on divergence declaration.
QuadResult graded_to_zero(const std::function<double(double)>& f, double hi,
                          const QuadConfig& cfg, bool probe) {
    QuadResult out;
    TailState tail;
    const double floor_width = probe ? hi * 1e-290 : cfg.min_panel;
    const double budget = 0.02 * cfg.abs_tol;
    // Contributions within `stall_cap` of their predecessor signal an
    // exponent too close to zero to resolve: the log-divergence proxy. Below
    // it, stable ratios extrapolate to a finite remainder.
    const double stall_cap = 0.9995;
    int stalled = 0;
    double upper = hi;
    std::vector<double> partial_sums;
    partial_sums.reserve(64);

    // Closes the integral from the partial-sum record: iterated Aitken when it
    // certifies itself, single-ratio geometric tail as fallback.
    auto close_with_tail = [&](QuadResult& res) {
        const AitkenClose ac = aitken_close(partial_sums);
        if (ac.ok && std::isfinite(ac.value) && std::fabs(ac.value - res.value) < 10.0 * std::fabs(ac.value) + 1.0) {
            res.est_error += ac.err;
            res.value = ac.value;
        } else if (tail.ratio_ok(stall_cap)) {
            const double t = tail.tail();
            res.value += t;
            res.est_error += std::fabs(t - tail.tail_alt());
        } else {
            res.est_error += std::fabs(tail.p_last);
        }
    };

    for (int k = 0; k < 1200; ++k) {
        const double lower = 0.5 * upper;
        PanelEval pe = panel_adaptive(f, lower, upper, budget, 0, cfg.max_panel_depth);
        if (!std::isfinite(pe.value)) {
            // Overflow in a deep panel: close via extrapolation when the clean
            // panels already pinned a decaying tail, declare divergence otherwise.
            if (tail.ratio_ok(stall_cap)) {
                close_with_tail(out);
            } else {
                out.diverged = true;
            }
            return out;
        }
        out.value += pe.value;
        out.est_error += pe.err;
        out.evals += pe.evals;
        tail.push(pe.value);
        partial_sums.push_back(out.value);

        if (probe) {
            const double mag = std::fabs(pe.value);
            const double prev_mag = std::fabs(tail.p_prev);
            if (std::fabs(out.value) > cfg.divergence_ceiling && mag >= prev_mag && tail.have >= 2) {
                out.diverged = true;
                return out;
            }
            if (tail.have >= 2 && prev_mag > 0.0 && mag >= stall_cap * prev_mag) {
                if (++stalled >= 12 && std::fabs(out.value) > 1e3 * cfg.abs_tol) {
                    out.diverged = true;
                    return out;
                }
            } else {
                stalled = 0;
            }
        }

        // Dead tail: several vanishing panels in a row.
        if (tail.have >= 3 && tail.p_last == 0.0 && tail.p_prev == 0.0) return out;

        const double ratio_cap = probe ? stall_cap : 0.995;
        if (tail.ratio_ok(ratio_cap) && (upper - lower) <= 0.25 * hi) {
            const AitkenClose ac = aitken_close(partial_sums);
            const double allow =
                probe ? std::max(0.05 * cfg.abs_tol, 1e-6 * std::fabs(ac.value)) : 0.05 * cfg.abs_tol;
            if (ac.ok && ac.err <= allow) {
                out.value = ac.value;
                out.est_error += ac.err;
                return out;
            }
        }

        if (0.5 * lower < floor_width || 0.5 * lower <= 0.0) {
            close_with_tail(out);
            return out;
        }
        upper = lower;
    }
    close_with_tail(out);
    return out;
}

}  // namespace

double gauss16(const std::function<double(double)>& f, double a, double b) {
    return gl16(f, a, b);
}

QuadResult integrate_graded(const std::function<double(double)>& f, double lo, double hi,
                            const QuadConfig& cfg) {
    const double mid = 0.5 * (lo + hi);
    // Map each half so its (potentially singular) endpoint sits at 0.
    QuadResult left = graded_to_zero([&](double t) { return f(lo + t); }, mid - lo, cfg, false);
    QuadResult right = graded_to_zero([&](double t) { return f(hi - t); }, hi - mid, cfg, false);
    QuadResult out;
    out.value = left.value + right.value;
    out.est_error = left.est_error + right.est_error;
    out.evals = left.evals + right.evals;
    return out;
}

QuadResult probe_lower_end(const std::function<double(double)>& f, double lo, double hi,
                           const QuadConfig& cfg) {
    return graded_to_zero([&](double t) { return f(lo + t); }, hi - lo, cfg, true);
}

FixedGradedRule FixedGradedRule::build(double s_max, double min_panel) {
    FixedGradedRule rule;
    rule.s_max = s_max;
    std::vector<std::pair<double, double>> edges;  // (lower, upper), shallow first
    double upper = s_max;
    while (true) {
        const double lower = 0.5 * upper;
        edges.emplace_back(lower, upper);
        if (upper - lower < min_panel || lower <= 0.0) break;
        upper = lower;
    }
    std::reverse(edges.begin(), edges.end());  // deepest first
    rule.panel_offset.push_back(0);
    for (const auto& [a, b] : edges) {
        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        for (int i = 7; i >= 0; --i) {
            rule.nodes.push_back(c - h * kGx[i]);
            rule.weights.push_back(kGw[i] * h);
        }
        for (int i = 0; i < 8; ++i) {
            rule.nodes.push_back(c + h * kGx[i]);
            rule.weights.push_back(kGw[i] * h);
        }
        rule.panel_offset.push_back(static_cast<int>(rule.nodes.size()));
    }
    return rule;
}

double FixedGradedRule::apply(const std::vector<double>& f_values) const {
    const int n_panels = static_cast<int>(panel_offset.size()) - 1;
    double sum = 0.0;
    double p0 = 0.0, p1 = 0.0;  // deepest and next panel sums
    for (int p = 0; p < n_panels; ++p) {
        double ps = 0.0;
        for (int i = panel_offset[p]; i < panel_offset[p + 1]; ++i) {
            ps += weights[i] * f_values[i];
        }
        if (p == 0) p0 = ps;
        if (p == 1) p1 = ps;
        sum += ps;
    }
    if (p1 != 0.0) {
        const double r = p0 / p1;
        if (r > 0.0 && r < 0.97) sum += p0 * r / (1.0 - r);
    }
    return sum;
}

}  // namespace gf::quad
