// Command-line front end: experiment orchestration and CSV/JSON emission for
// the Fourier-space inelastic Maxwell-molecule toolkit.

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "gf/cli.hpp"
#include "gf/config.hpp"

namespace {

// Config-file defaults (key = value) are applied before CLI flags.
void apply_config_file(gf::cli::RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gf::config::ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto kv = gf::config::parse_key_values(ss.str());
    auto num = [&](const char* key, double& slot) {
        if (kv.count(key)) slot = std::stod(kv.at(key));
    };
    if (kv.count("kernel")) cfg.kernel_spec = kv.at("kernel");
    if (kv.count("phi")) cfg.phi_spec = kv.at("phi");
    if (kv.count("u0")) cfg.u0_spec = kv.at("u0");
    num("e", cfg.e);
    if (kv.count("alpha")) cfg.alpha = std::stod(kv.at("alpha"));
    if (kv.count("p")) cfg.p = std::stod(kv.at("p"));
    num("K", cfg.K);
    num("tol", cfg.tol);
    num("x_min", cfg.x_min);
    num("x_max", cfg.x_max);
    num("rel_tol", cfg.rel_tol);
    num("abs_tol", cfg.abs_tol);
    if (kv.count("N")) cfg.N = std::stoi(kv.at("N"));
    if (kv.count("n_nodes")) cfg.n_nodes = std::stoi(kv.at("n_nodes"));
    if (kv.count("n")) cfg.n_samples = std::stol(kv.at("n"));
    if (kv.count("seed")) cfg.seed = std::stoull(kv.at("seed"));
    if (kv.count("out")) cfg.out_dir = kv.at("out");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-space toolkit for the inelastic Boltzmann equation "
                 "(Maxwellian molecules): kernel moments, self-similar profiles, "
                 "radial evolution and Monte Carlo verification"};
    app.require_subcommand(1);

    gf::cli::RunConfig cfg;
    std::string config_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "key = value config file");
        sub->add_option("--kernel", cfg.kernel_spec, "kernel spec, e.g. constant:c=0.0796");
        sub->add_option("--e", cfg.e, "restitution coefficient in (0, 1]");
        sub->add_option("--tol", cfg.tol, "quadrature tolerance");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_flag("--no-timestamp", cfg.no_timestamp, "suppress timestamp header lines");
    };

    auto* params = app.add_subcommand("params", "kernel moments lambda, gamma, mu");
    add_common(params);
    double alpha_in = -1.0, p_in = -1.0;
    params->add_option("--alpha", alpha_in, "moment order alpha in (0, 2]");

    auto* profile = app.add_subcommand("profile", "steady self-similar series profile");
    add_common(profile);
    profile->add_option("--p", p_in, "series exponent p");
    profile->add_option("--K", cfg.K, "first coefficient Psi_1 (< 0)");
    profile->add_option("--N", cfg.N, "truncation order");

    auto* evolve_cmd = app.add_subcommand("evolve", "radial-grid time evolution");
    add_common(evolve_cmd);
    evolve_cmd->add_option("--p", p_in, "small-x exponent of the initial datum");
    evolve_cmd->add_option("--u0", cfg.u0_spec, "radial initial datum (catalog spec)");
    evolve_cmd->add_option("--times", cfg.times, "output times");
    evolve_cmd->add_option("--x-min", cfg.x_min, "grid lower end");
    evolve_cmd->add_option("--x-max", cfg.x_max, "grid upper end");
    evolve_cmd->add_option("--n-nodes", cfg.n_nodes, "grid size");
    evolve_cmd->add_option("--rel-tol", cfg.rel_tol, "stepper relative tolerance");

    auto* converge = app.add_subcommand("converge", "convergence to the self-similar profile");
    add_common(converge);
    converge->add_option("--p", p_in, "series exponent p");
    converge->add_option("--K", cfg.K, "matched first coefficient");
    converge->add_option("--N", cfg.N, "profile truncation order");
    converge->add_option("--times", cfg.times, "output times");
    converge->add_option("--u0", cfg.u0_spec, "radial initial datum");

    auto* contraction = app.add_subcommand("contraction", "stability/contraction check");
    add_common(contraction);
    contraction->add_option("--alpha", alpha_in, "metric order alpha");
    contraction->add_option("--times", cfg.times, "check times");

    auto* cutoff = app.add_subcommand("cutoff-study", "cutoff-sequence convergence");
    add_common(cutoff);
    cutoff->add_option("--p", p_in, "small-x exponent of the initial datum");
    cutoff->add_option("--n-list", cfg.n_list, "truncation levels");
    cutoff->add_option("--times", cfg.times, "horizon (last entry)");

    auto* verify = app.add_subcommand("verify", "pointwise lemma verification");
    add_common(verify);
    verify->add_option("--phi", cfg.phi_spec, "characteristic function spec");
    verify->add_option("--n", cfg.n_samples, "sample count");

    auto* bobylev = app.add_subcommand("bobylev-check", "MC vs spectral gain transform");
    add_common(bobylev);
    bobylev->add_option("--n", cfg.n_samples, "sample count");

    // Config-file values act as defaults: apply them before the flag parse so
    // explicit flags win.
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") apply_config_file(cfg, argv[i + 1]);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    CLI11_PARSE(app, argc, argv);

    if (params->parsed()) cfg.command = gf::cli::Command::Params;
    if (profile->parsed()) cfg.command = gf::cli::Command::Profile;
    if (evolve_cmd->parsed()) cfg.command = gf::cli::Command::Evolve;
    if (converge->parsed()) cfg.command = gf::cli::Command::Converge;
    if (contraction->parsed()) cfg.command = gf::cli::Command::Contraction;
    if (cutoff->parsed()) cfg.command = gf::cli::Command::CutoffStudy;
    if (verify->parsed()) cfg.command = gf::cli::Command::Verify;
    if (bobylev->parsed()) cfg.command = gf::cli::Command::BobylevCheck;
    if (alpha_in > 0.0) cfg.alpha = alpha_in;
    if (p_in > 0.0) cfg.p = p_in;

    return gf::cli::run(cfg);
}
