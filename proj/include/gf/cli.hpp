#ifndef GF_CLI_HPP
#define GF_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gf::cli {

enum class Command {
    Params,
    Profile,
    Evolve,
    Converge,
    Contraction,
    CutoffStudy,
    Verify,
    BobylevCheck,
};

struct RunConfig {
    Command command = Command::Params;
    std::string kernel_spec = "constant:c=0.079577471545947673";  // 1/(4 pi)
    double e = 1.0;
    std::optional<double> alpha;  // moment order (params, contraction)
    std::optional<double> p;      // series exponent (profile, evolve, converge)
    double K = -1.0;              // first series coefficient
    int N = 40;
    double tol = 1e-10;
    // grid + stepping
    double x_min = 1e-8;
    double x_max = 1e3;
    int n_nodes = 512;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    // fixtures
    std::string phi_spec = "stable(alpha=0.8, c=1.0)";
    std::string u0_spec;  // radial initial datum for evolve-type commands
    std::vector<double> times{1.0};
    std::vector<double> n_list{10, 100, 1000, 10000};
    long n_samples = 1'000'000;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    bool no_timestamp = false;
};

/// Throws config::ConfigError on inconsistent settings.
void validate(const RunConfig& config);

/**
 * Dispatches to the owning module, writes the command's CSV/JSON artifacts
 * under out_dir and prints one summary line per check.
 * Returns 0 if all requested checks pass, 1 on numerical failure,
 * 2 on configuration errors.
 */
int run(const RunConfig& config);

}  // namespace gf::cli

#endif
