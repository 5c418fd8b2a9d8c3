#include "gf/evolve.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "gf/errors.hpp"
#include "gf/moments.hpp"
#include "gf/ode.hpp"
#include "gf/quadrature.hpp"

namespace gf::evolve {

using kernels::KernelModel;
using kernels::RestitutionParams;

namespace {

constexpr double kBoundSlack = 1e-9;  // |u| <= 1 + kBoundSlack at accepted steps

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRANULAR_FOURIER_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Fixed s-quadrature with the collision factors precomputed at the nodes.
struct SRule {
    quad::FixedGradedRule rule;
    std::vector<double> gw;  // weight * G(s)
    std::vector<double> a_s, b_s;

    static SRule build(const KernelModel& kernel, const RestitutionParams& params) {
        SRule sr;
        sr.rule = quad::FixedGradedRule::build(kernel.s_max());
        const std::size_t n = sr.rule.nodes.size();
        sr.gw.resize(n);
        sr.a_s.resize(n);
        sr.b_s.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = sr.rule.nodes[i];
            sr.gw[i] = sr.rule.weights[i] * kernel.scaled(s);
            sr.a_s[i] = params.a_of_s(s);
            sr.b_s[i] = params.b_of_s(s);
            assert(sr.a_s[i] >= 0.0 && sr.a_s[i] <= 1.0 && sr.b_s[i] > 0.0 && sr.b_s[i] <= 1.0);
        }
        return sr;
    }

    // Collision integral at one grid point, split as
    // [u(ax) - 1] u(bx) + [u(bx) - u(x)], panels summed deepest-first with a
    // geometric tail for the sliver below the deepest panel.
    double collision_at(const MonotoneCubic& u, double x, double ux) const {
        const int n_panels = static_cast<int>(rule.panel_offset.size()) - 1;
        double sum = 0.0, p0 = 0.0, p1 = 0.0;
        for (int p = 0; p < n_panels; ++p) {
            double ps = 0.0;
            for (int i = rule.panel_offset[p]; i < rule.panel_offset[p + 1]; ++i) {
                const double ubx = u.eval(b_s[i] * x);
                const double uax = u.eval(a_s[i] * x);
                ps += gw[i] * ((uax - 1.0) * ubx + (ubx - ux));
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
};

void parallel_nodes(int n, int threads, const std::function<void(int, int)>& work) {
    if (threads <= 1 || n < 64) {
        work(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
}

void rhs_into(const SRule& sr, const RadialGridState& state, const MonotoneCubic& interp,
              int threads, std::vector<double>& out) {
    const int n = static_cast<int>(state.x.size());
    out.assign(n, 0.0);
    parallel_nodes(n - 1, threads, [&](int lo, int hi) {
        for (int k = lo + 1; k < hi + 1; ++k) {
            out[k] = sr.collision_at(interp, state.x[k], state.u[k]);
        }
    });
}

MonotoneCubic make_interp(const std::vector<double>& x, const std::vector<double>& u, double p) {
    MonotoneCubic interp(x, u);
    const double c1 = fit_power_coefficient(x, u, 1, 3, p, 1.0);
    interp.set_small_x_closure(p, c1, 1.0);
    return interp;
}

}  // namespace

RadialGridState RadialGridState::sample(const GridSpec& grid, const std::function<double(double)>& u0,
                                        double small_x_p) {
    if (grid.n_nodes < 64) throw std::domain_error("grid needs at least 64 nodes");
    if (!(grid.x_min > 0.0) || !(grid.x_max > grid.x_min)) {
        throw std::domain_error("grid needs 0 < x_min < x_max");
    }
    RadialGridState st;
    st.small_x_p = small_x_p;
    st.x.resize(grid.n_nodes + 1);
    st.u.resize(grid.n_nodes + 1);
    st.x[0] = 0.0;
    st.u[0] = 1.0;
    for (int k = 0; k < grid.n_nodes; ++k) {
        st.x[k + 1] = grid.x_min * std::pow(grid.x_max / grid.x_min,
                                            static_cast<double>(k) / (grid.n_nodes - 1));
        st.u[k + 1] = u0(st.x[k + 1]);
    }
    st.validate();
    return st;
}

MonotoneCubic RadialGridState::interpolant() const { return make_interp(x, u, small_x_p); }

void RadialGridState::validate() const {
    if (x.empty() || x[0] != 0.0 || u[0] != 1.0) {
        throw std::domain_error("RadialGridState: needs the exact anchor u(0) = 1");
    }
    for (double v : u) {
        if (!std::isfinite(v) || std::fabs(v) > 1.0 + kBoundSlack) {
            throw std::domain_error("RadialGridState: |u| exceeds the characteristic bound");
        }
    }
}

std::vector<double> isotropic_rhs(const RadialGridState& state, const EvolveConfig& config) {
    state.validate();
    const SRule sr = SRule::build(config.kernel, config.params);
    const MonotoneCubic interp = state.interpolant();
    std::vector<double> out;
    rhs_into(sr, state, interp, resolve_threads(config.threads), out);
    return out;
}

RadialGridState advance(const RadialGridState& state, const EvolveConfig& config, double t_target) {
    if (t_target < state.t) throw std::domain_error("advance: t_target must be >= state.t");
    state.validate();
    const bool use_if = config.integrating_factor.value_or(config.kernel.integrable());
    if (use_if && !config.kernel.integrable()) {
        throw std::domain_error("advance: integrating-factor mode needs a cutoff kernel");
    }
    const double gamma2 = use_if ? kernels::gamma2(config.kernel) : 0.0;
    const SRule sr = SRule::build(config.kernel, config.params);
    const int threads = resolve_threads(config.threads);
    const int n = static_cast<int>(state.x.size());

    RadialGridState cur = state;

    // ODE state: u at the positive nodes (the x = 0 anchor is pinned at 1).
    // In integrating-factor mode the integrated variable is w = e^(gamma2 tau) u,
    // which reproduces the mild-form update u <- u e^(-gamma2 dt) + gain.
    auto run_segment = [&](double t_len) {
        std::vector<double> y(cur.u.begin() + 1, cur.u.end());
        RadialGridState scratch = cur;

        ode::Rhs rhs = [&](double tau, const std::vector<double>& w, std::vector<double>& dwdt) {
            const double decay = use_if ? std::exp(-gamma2 * tau) : 1.0;
            scratch.u[0] = 1.0;
            for (int k = 1; k < n; ++k) scratch.u[k] = decay * w[k - 1];
            const MonotoneCubic interp = make_interp(scratch.x, scratch.u, cur.small_x_p);
            std::vector<double> coll;
            rhs_into(sr, scratch, interp, threads, coll);
            const double grow = use_if ? 1.0 / decay : 1.0;
            for (int k = 1; k < n; ++k) {
                const double du = coll[k] + (use_if ? gamma2 * scratch.u[k] : 0.0);
                dwdt[k - 1] = grow * du;
            }
        };

        ode::StepFilter filter = [&](double tau, const std::vector<double>& w) {
            const double decay = use_if ? std::exp(-gamma2 * tau) : 1.0;
            for (double wi : w) {
                const double ui = decay * wi;
                if (!std::isfinite(ui) || std::fabs(ui) > 1.0 + kBoundSlack) return false;
            }
            return true;
        };

        ode::Options opts;
        opts.rel_tol = config.rel_tol;
        opts.abs_tol = config.abs_tol;
        opts.dt_init = 1e-3;
        opts.max_consecutive_rejects = 60;
        ode::integrate(rhs, y, 0.0, t_len, opts, filter);

        const double decay = use_if ? std::exp(-gamma2 * t_len) : 1.0;
        for (int k = 1; k < n; ++k) cur.u[k] = decay * y[k - 1];
        cur.t += t_len;
        cur.validate();
    };

    // Segment the horizon so the integrating factor stays well scaled.
    double remaining = t_target - state.t;
    const double seg_max = use_if && gamma2 > 0.0 ? 16.0 / gamma2 : remaining;
    while (remaining > 0.0) {
        const double seg = std::min(remaining, seg_max);
        run_segment(seg);
        remaining -= seg;
    }
    return cur;
}

RadialGridState rescale_state(const RadialGridState& state, double mu) {
    const MonotoneCubic interp = state.interpolant();
    const double shrink = std::exp(-mu * state.t);
    RadialGridState out = state;
    for (std::size_t k = 1; k < state.x.size(); ++k) {
        const double arg = state.x[k] * shrink;
        if (arg > state.x.back()) {
            throw std::domain_error("rescale_state: argument above the grid (mu < 0?)");
        }
        out.u[k] = interp.eval(arg);
    }
    return out;
}

namespace {

double grid_alpha_distance(const RadialGridState& a, const RadialGridState& b, double alpha) {
    double sup = 0.0;
    for (std::size_t k = 1; k < a.x.size(); ++k) {
        sup = std::max(sup, std::fabs(a.u[k] - b.u[k]) / std::pow(2.0 * a.x[k], 0.5 * alpha));
    }
    return sup;
}

}  // namespace

ContractionReport contraction_check(const RadialGridState& u0, const RadialGridState& v0,
                                    const EvolveConfig& config, double alpha,
                                    const std::vector<double>& times, double slack) {
    if (u0.x != v0.x) throw std::domain_error("contraction_check: states must share one grid");
    ContractionReport rep;
    rep.lambda = kernels::lambda_e(config.kernel, config.params, 0.5 * alpha);
    rep.dist0 = grid_alpha_distance(u0, v0, alpha);
    rep.degenerate = rep.dist0 < 1e-13;

    RadialGridState u = u0, v = v0;
    bool ok = true;
    for (double t : times) {
        u = advance(u, config, t);
        v = advance(v, config, t);
        const double d = grid_alpha_distance(u, v, alpha);
        rep.times.push_back(t);
        rep.distance.push_back(d);
        if (rep.degenerate) {
            rep.ratio.push_back(0.0);
            ok = ok && d <= 1e-9;
        } else {
            const double r = d / (std::exp(rep.lambda * t) * rep.dist0);
            rep.ratio.push_back(r);
            ok = ok && r <= 1.0 + slack;
        }
    }
    rep.pass = ok;
    return rep;
}

CutoffStudyReport cutoff_convergence(const KernelModel& kernel, const std::vector<double>& n_list,
                                     const RadialGridState& u0, double t,
                                     const EvolveConfig& config) {
    if (kernel.integrable()) {
        throw std::domain_error("cutoff_convergence: reference kernel must be non-cutoff");
    }
    EvolveConfig ref_cfg = config;
    ref_cfg.kernel = kernel;
    ref_cfg.integrating_factor = false;
    const RadialGridState ref = advance(u0, ref_cfg, t);

    CutoffStudyReport rep;
    rep.n_list = n_list;
    for (double n : n_list) {
        EvolveConfig cfg_n = config;
        cfg_n.kernel = kernel.truncated(n);
        cfg_n.integrating_factor = false;  // same stepper family as the reference
        const RadialGridState un = advance(u0, cfg_n, t);
        double dev = 0.0;
        for (std::size_t k = 0; k < ref.u.size(); ++k) {
            dev = std::max(dev, std::fabs(un.u[k] - ref.u[k]));
        }
        rep.deviation.push_back(dev);
    }
    rep.monotone_decreasing = true;
    for (std::size_t i = 1; i < rep.deviation.size(); ++i) {
        if (rep.deviation[i] >= rep.deviation[i - 1]) rep.monotone_decreasing = false;
    }
    return rep;
}

ConvergeReport converge_to_profile(const RadialGridState& u0, const EvolveConfig& config, double p,
                                   double K, const std::vector<double>& t_list, int N, double X0) {
    ConvergeReport rep;
    rep.lambda_p = kernels::lambda_e(config.kernel, config.params, p);
    if (!(rep.lambda_p > 0.0)) {
        throw StabilityRegimeError("converge_to_profile: lambda_e(p) <= 0", rep.lambda_p);
    }
    rep.mu_p = rep.lambda_p / p;
    rep.k_zero_branch = K == 0.0;

    std::optional<selfsim::SeriesProfile> steady;
    double x_trust = u0.x.back();
    if (!rep.k_zero_branch) {
        steady = selfsim::steady_coeffs(config.kernel, config.params, p, K, N,
                                        {.tol = 1e-10, .allow_any_sign = true});
        x_trust = selfsim::series_trust_radius(*steady);
    }

    RadialGridState u = u0;
    const double alpha = 2.0 * p;
    for (double t : t_list) {
        u = advance(u, config, t);
        const RadialGridState psi = rescale_state(u, rep.mu_p);
        ConvergeSnapshot snap;
        snap.t = t;
        snap.X_eff = std::min({X0 * std::exp(rep.mu_p * t), x_trust, u0.x.back()});
        double sup = 0.0;
        for (std::size_t k = 1; k < psi.x.size() && psi.x[k] <= snap.X_eff; ++k) {
            const double target =
                rep.k_zero_branch ? 1.0 : selfsim::eval_series(*steady, psi.x[k]).value;
            sup = std::max(sup, std::fabs(psi.u[k] - target) / std::pow(psi.x[k], p));
        }
        snap.D = snap.I1 = sup;
        // Far-field remainder of the two-regime split: sup_{|xi|>S} 2/|xi|^alpha
        // with R = S e^(-mu_alpha t), S = sqrt(2 X_eff).
        const double R2 = 2.0 * snap.X_eff * std::exp(-rep.mu_p * t);
        snap.I2 = 2.0 / std::pow(R2, 0.5 * alpha);
        rep.snapshots.push_back(snap);
    }
    return rep;
}

std::string trajectory_to_csv(const std::vector<RadialGridState>& states,
                              const EvolveConfig& config, bool timestamp_header,
                              const std::string& timestamp) {
    std::ostringstream os;
    char buf[256];
    if (timestamp_header) os << "# generated " << timestamp << "\n";
    std::snprintf(buf, sizeof(buf), "# kernel=%s e=%.17g p=%.17g grid=[%.17g,%.17g]x%zu tol=%.17g\n",
                  config.kernel.id().c_str(), config.params.e, config.small_x_p,
                  config.grid.x_min, config.grid.x_max,
                  states.empty() ? 0 : states.front().x.size() - 1, config.rel_tol);
    os << buf << "t,x,u\n";
    for (const auto& st : states) {
        for (std::size_t k = 0; k < st.x.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", st.t, st.x[k], st.u[k]);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace gf::evolve
