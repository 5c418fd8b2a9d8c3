#include "gf/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "gf/charfun.hpp"
#include "gf/config.hpp"
#include "gf/errors.hpp"
#include "gf/evolve.hpp"
#include "gf/io.hpp"
#include "gf/moments.hpp"
#include "gf/selfsim.hpp"
#include "gf/verify_mc.hpp"

namespace gf::cli {

using nlohmann::json;

namespace {

struct CheckLog {
    bool all_pass = true;

    void report(const std::string& name, double value, bool pass) {
        std::printf("%-34s %-24.17g %s\n", name.c_str(), value, pass ? "pass" : "FAIL");
        all_pass = all_pass && pass;
    }
    void info(const std::string& name, double value) {
        std::printf("%-34s %-24.17g\n", name.c_str(), value);
    }
};

std::string out_path(const RunConfig& cfg, const std::string& file) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / file).string();
}

std::string stamp(const RunConfig& cfg) { return cfg.no_timestamp ? "" : io::timestamp_utc(); }

void write_json(const RunConfig& cfg, const std::string& file, json j) {
    if (!cfg.no_timestamp) j["generated"] = io::timestamp_utc();
    io::write_file(out_path(cfg, file), j.dump(2) + "\n");
}

// Radial initial datum: a catalog characteristic function read as u0(x) = phi(|xi|),
// |xi| = sqrt(2x). Defaults to exp(-x^p) when unspecified.
std::function<double(double)> make_u0(const RunConfig& cfg, double p) {
    if (cfg.u0_spec.empty()) {
        return [p](double x) { return std::exp(-std::pow(x, p)); };
    }
    auto phi = config::parse_phi(cfg.u0_spec);
    if (!phi.radial()) throw config::ConfigError("u0 must be radial");
    return [phi](double x) { return phi.value_x(x); };
}

evolve::EvolveConfig make_evolve_config(const RunConfig& cfg, double p) {
    evolve::EvolveConfig ec;
    ec.kernel = config::parse_kernel(cfg.kernel_spec);
    ec.params = kernels::RestitutionParams::from_e(cfg.e);
    ec.grid = {cfg.x_min, cfg.x_max, cfg.n_nodes};
    ec.rel_tol = cfg.rel_tol;
    ec.abs_tol = cfg.abs_tol;
    ec.small_x_p = p;
    return ec;
}

int cmd_params(const RunConfig& cfg, CheckLog& log) {
    const auto kernel = config::parse_kernel(cfg.kernel_spec);
    const auto params = kernels::RestitutionParams::from_e(cfg.e);
    const double alpha = cfg.alpha.value_or(1.0);
    kernels::MomentTable table;

    const double lam = kernels::lambda_e(kernel, params, 0.5 * alpha, cfg.tol);
    table.put({kernels::MomentKind::LambdaEQ, cfg.e, 0.5 * alpha}, {lam, cfg.tol, cfg.tol});
    log.info("lambda_e_alpha", lam);

    const double lam_sphere = kernels::lambda_e_sphere(kernel, params, alpha, cfg.tol);
    log.report("lambda_sphere_crosscheck", lam_sphere, std::fabs(lam_sphere - lam) <= 2.0 * std::max(cfg.tol, 1e-12));

    if (kernel.integrable()) {
        const double g2 = kernels::gamma2(kernel, cfg.tol);
        const double ga = kernels::gamma_e_alpha(kernel, params, alpha, cfg.tol);
        table.put({kernels::MomentKind::Gamma2, cfg.e, 2.0}, {g2, cfg.tol, cfg.tol});
        table.put({kernels::MomentKind::GammaEAlpha, cfg.e, alpha}, {ga, cfg.tol, cfg.tol});
        log.info("gamma2", g2);
        log.info("gamma_e_alpha", ga);
        log.report("lambda_gamma_identity", ga - g2, std::fabs(ga - g2 - lam) <= 2.0 * cfg.tol);
    }
    const double p = 0.5 * alpha;
    if (p > 0.0 && p < 1.0) {
        const double mu = kernels::mu_e_p(kernel, params, p, cfg.tol);
        table.put({kernels::MomentKind::MuEP, cfg.e, p}, {mu, cfg.tol, cfg.tol});
        log.info("mu_e_p", mu);
    }
    std::string csv = table.to_csv();
    if (!cfg.no_timestamp) csv = "# generated " + io::timestamp_utc() + "\n" + csv;
    io::write_file(out_path(cfg, "params.csv"), csv);
    return log.all_pass ? 0 : 1;
}

int cmd_profile(const RunConfig& cfg, CheckLog& log) {
    const auto kernel = config::parse_kernel(cfg.kernel_spec);
    const auto params = kernels::RestitutionParams::from_e(cfg.e);
    const double p = cfg.p.value();
    auto prof = selfsim::steady_coeffs(kernel, params, p, cfg.K, cfg.N, {.tol = cfg.tol});
    io::write_file(out_path(cfg, "profile.csv"),
                   selfsim::profile_to_csv(prof, !cfg.no_timestamp, stamp(cfg)));

    const std::vector<double> xs{0.1, 1.0, 5.0};
    const auto res = selfsim::profile_residual(prof, xs, cfg.tol);
    json j;
    j["p"] = p;
    j["e"] = cfg.e;
    j["kernel"] = kernel.id();
    j["b_e"] = prof.bound_consts.b_e;
    j["lambda_p"] = prof.lambda_p;
    j["x"] = res.x;
    j["residual"] = res.residual;
    j["max_abs_residual"] = res.max_abs;
    write_json(cfg, "residual.json", j);
    log.info("lambda_e_p", prof.lambda_p);
    log.report("steady_residual_max", res.max_abs, res.max_abs < 1e-4);
    return log.all_pass ? 0 : 1;
}

int cmd_evolve(const RunConfig& cfg, CheckLog& log) {
    const double p = cfg.p.value_or(1.0);
    auto ec = make_evolve_config(cfg, p);
    auto state = evolve::RadialGridState::sample(ec.grid, make_u0(cfg, p), p);
    std::vector<evolve::RadialGridState> snaps{state};
    for (double t : cfg.times) {
        state = evolve::advance(state, ec, t);
        snaps.push_back(state);
    }
    io::write_file(out_path(cfg, "trajectory.csv"),
                   evolve::trajectory_to_csv(snaps, ec, !cfg.no_timestamp, stamp(cfg)));
    log.report("final_max_abs_u", *std::max_element(state.u.begin(), state.u.end()), true);
    return 0;
}

int cmd_converge(const RunConfig& cfg, CheckLog& log) {
    const double p = cfg.p.value();
    auto ec = make_evolve_config(cfg, p);
    auto u0 = evolve::RadialGridState::sample(ec.grid, make_u0(cfg, p), p);
    const auto rep = evolve::converge_to_profile(u0, ec, p, cfg.K, cfg.times, cfg.N);
    json arr = json::array();
    bool decreasing = true;
    for (std::size_t i = 0; i < rep.snapshots.size(); ++i) {
        const auto& s = rep.snapshots[i];
        arr.push_back({{"t", s.t}, {"D", s.D}, {"I1", s.I1}, {"I2", s.I2}, {"X_eff", s.X_eff}});
        if (i > 0 && s.D >= rep.snapshots[i - 1].D) decreasing = false;
        log.info("D(t=" + std::to_string(s.t) + ")", s.D);
    }
    json j;
    j["lambda_p"] = rep.lambda_p;
    j["mu_p"] = rep.mu_p;
    j["K"] = cfg.K;
    j["snapshots"] = arr;
    j["decreasing"] = decreasing;
    write_json(cfg, "converge.json", j);
    log.report("D_decreasing", decreasing ? 1.0 : 0.0, decreasing);
    return log.all_pass ? 0 : 1;
}

int cmd_contraction(const RunConfig& cfg, CheckLog& log) {
    const double alpha = cfg.alpha.value_or(1.0);
    const double p = 0.5 * alpha;
    auto ec = make_evolve_config(cfg, p);
    auto u0 = evolve::RadialGridState::sample(
        ec.grid, [p](double x) { return std::exp(-std::pow(x, p)); }, p);
    auto v0 = evolve::RadialGridState::sample(
        ec.grid, [p](double x) { return std::exp(-1.1 * std::pow(x, p)); }, p);
    const auto rep = evolve::contraction_check(u0, v0, ec, alpha, cfg.times);
    json j;
    j["lambda"] = rep.lambda;
    j["dist0"] = rep.dist0;
    j["t"] = rep.times;
    j["ratio"] = rep.ratio;
    j["distance"] = rep.distance;
    j["pass"] = rep.pass;
    write_json(cfg, "contraction.json", j);
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        log.report("contraction_r(t=" + std::to_string(rep.times[i]) + ")", rep.ratio[i],
                   rep.ratio[i] <= 1.005);
    }
    return log.all_pass ? 0 : 1;
}

int cmd_cutoff_study(const RunConfig& cfg, CheckLog& log) {
    const double p = cfg.p.value_or(0.5);
    auto ec = make_evolve_config(cfg, p);
    const auto kernel = ec.kernel;
    auto u0 = evolve::RadialGridState::sample(ec.grid, make_u0(cfg, p), p);
    const double t = cfg.times.empty() ? 1.0 : cfg.times.back();
    const auto rep = evolve::cutoff_convergence(kernel, cfg.n_list, u0, t, ec);
    json j;
    j["n"] = rep.n_list;
    j["deviation"] = rep.deviation;
    j["monotone_decreasing"] = rep.monotone_decreasing;
    write_json(cfg, "cutoff_study.json", j);
    for (std::size_t i = 0; i < rep.n_list.size(); ++i) {
        log.info("deviation(n=" + std::to_string(static_cast<long>(rep.n_list[i])) + ")",
                 rep.deviation[i]);
    }
    log.report("deviations_decreasing", rep.monotone_decreasing ? 1.0 : 0.0,
               rep.monotone_decreasing);
    return log.all_pass ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, CheckLog& log) {
    const auto phi = config::parse_phi(cfg.phi_spec);
    const long n = std::max<long>(1000, cfg.n_samples / 100);
    const auto rep = charfun::verify_pointwise_lemmas(phi, n, cfg.seed);
    json arr = json::array();
    for (const auto& [lemma, count] : rep.violations_by_lemma) {
        arr.push_back({{"lemma", lemma}, {"samples", rep.samples}, {"violations", count}});
    }
    json j;
    j["phi"] = phi.id();
    j["samples"] = rep.samples;
    j["violations"] = rep.violations;
    j["max_slack"] = rep.max_slack;
    j["by_lemma"] = arr;
    write_json(cfg, "verify_charfun.json", j);
    log.report("lemma_violations", static_cast<double>(rep.violations), rep.violations == 0);
    return log.all_pass ? 0 : 1;
}

int cmd_bobylev(const RunConfig& cfg, CheckLog& log) {
    const auto kernel = config::parse_kernel(cfg.kernel_spec);
    const auto params = kernels::RestitutionParams::from_e(cfg.e);
    const auto f = mc::VelocityLaw::gaussian({0, 0, 0}, 1.0);
    json checks = json::array();

    for (double r : {0.5, 1.0, 2.0}) {
        const Vec3 xi{0.0, 0.0, r};
        const auto est = mc::mc_gain_transform(f, f, params, kernel, xi, cfg.n_samples, cfg.seed);
        const auto ref = mc::sphere_gain_transform(f.hat(), f.hat(), params, kernel, xi, cfg.tol);
        const double gap = std::abs(est.value - ref);
        const bool pass = gap <= 3.0 * est.stderr_est;
        checks.push_back({{"check", "gain_transform"},
                          {"params", {{"e", cfg.e}, {"xi", r}, {"n", est.n_samples}}},
                          {"estimate", est.value.real()},
                          {"stderr", est.stderr_est},
                          {"reference", ref.real()},
                          {"pass", pass}});
        log.report("bobylev_gain(|xi|=" + std::to_string(r) + ")", gap, pass);
    }

    const auto prod = mc::moment_production(f, params, kernel, cfg.n_samples, cfg.seed);
    const bool mass_ok = std::abs(prod.mass.value) <= 3.0 * prod.mass.stderr_est + 1e-15;
    bool mom_ok = true;
    for (const auto& m : prod.momentum) {
        mom_ok = mom_ok && std::abs(m.value) <= 3.0 * m.stderr_est;
    }
    const double egap = std::abs(prod.energy.value - prod.energy_reference);
    const bool energy_ok = egap <= 3.0 * prod.energy.stderr_est;
    const bool sign_ok = cfg.e < 1.0 ? prod.energy_reference < 0.0 : true;
    checks.push_back({{"check", "moment_production"},
                      {"params", {{"e", cfg.e}, {"n", prod.energy.n_samples}}},
                      {"estimate", prod.energy.value.real()},
                      {"stderr", prod.energy.stderr_est},
                      {"reference", prod.energy_reference},
                      {"pass", mass_ok && mom_ok && energy_ok && sign_ok}});
    log.report("production_mass", std::abs(prod.mass.value), mass_ok);
    log.report("production_momentum", std::abs(prod.momentum[0].value), mom_ok);
    log.report("production_energy_gap", egap, energy_ok && sign_ok);

    json j;
    j["checks"] = checks;
    j["seed"] = cfg.seed;
    j["pass"] = log.all_pass;
    write_json(cfg, "bobylev.json", j);
    return log.all_pass ? 0 : 1;
}

}  // namespace

void validate(const RunConfig& config) {
    if (!(config.e > 0.0) || config.e > 1.0) {
        throw config::ConfigError("e must lie in (0, 1]");
    }
    const auto kernel = config::parse_kernel(config.kernel_spec);
    const bool needs_p = config.command == Command::Profile || config.command == Command::Converge;
    if (needs_p) {
        if (!config.p) throw config::ConfigError("this command requires --p");
        const double beta = kernel.singular_beta();
        if (!(*config.p > beta) || !(*config.p < 1.0)) {
            throw config::ConfigError("p must lie in (beta, 1) for the series engine");
        }
        if (config.K == 0.0 && config.command == Command::Profile) {
            throw config::ConfigError("profile requires a nonzero K");
        }
    }
    if (config.alpha && (!(*config.alpha > 0.0) || *config.alpha > 2.0)) {
        throw config::ConfigError("alpha must lie in (0, 2]");
    }
    if (config.n_nodes < 64) throw config::ConfigError("grid needs at least 64 nodes");
    if (config.command == Command::BobylevCheck && config.n_samples < 10000) {
        throw config::ConfigError("bobylev-check needs at least 1e4 samples");
    }
    for (std::size_t i = 1; i < config.times.size(); ++i) {
        if (config.times[i] <= config.times[i - 1]) {
            throw config::ConfigError("times must be strictly increasing");
        }
    }
    if (!config.u0_spec.empty()) (void)config::parse_phi(config.u0_spec);
    if (config.command == Command::Verify) (void)config::parse_phi(config.phi_spec);
}

int run(const RunConfig& config) {
    try {
        validate(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    CheckLog log;
    try {
        switch (config.command) {
            case Command::Params: return cmd_params(config, log);
            case Command::Profile: return cmd_profile(config, log);
            case Command::Evolve: return cmd_evolve(config, log);
            case Command::Converge: return cmd_converge(config, log);
            case Command::Contraction: return cmd_contraction(config, log);
            case Command::CutoffStudy: return cmd_cutoff_study(config, log);
            case Command::Verify: return cmd_verify(config, log);
            case Command::BobylevCheck: return cmd_bobylev(config, log);
        }
    } catch (const config::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace gf::cli
