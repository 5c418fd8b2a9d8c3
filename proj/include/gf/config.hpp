#ifndef GF_CONFIG_HPP
#define GF_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gf/charfun.hpp"
#include "gf/kernel.hpp"

namespace gf::config {

/// Flat key = value text; '#' starts a comment, later keys override earlier ones.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/**
 * Kernel specification, both spellings accepted:
 *   constant:c=0.0796
 *   powerSingular(kappa=1, nu=0.5)
 *   scaledPower:k_e=1,beta=0.25
 * Optional keys: support_symmetrized = true|false (constant/powerSingular),
 * cutoff = <bound> applies min{b, bound}.
 */
kernels::KernelModel parse_kernel(const std::string& spec);

/**
 * Characteristic-function specification:
 *   one | gaussian(t=1) | stable(alpha=0.8, c=1.0)
 *   mixture(w1=0.5, phi1=gaussian(t=1), w2=0.5, phi2=stable(alpha=1,c=2)) is
 *   spelled with ';' separators instead: mixture(0.5;gaussian(t=1);0.5;...)
 */
charfun::CharFn parse_phi(const std::string& spec);

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gf::config

#endif
