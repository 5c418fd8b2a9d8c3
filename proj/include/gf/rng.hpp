#ifndef GF_RNG_HPP
#define GF_RNG_HPP

#include <cstdint>
#include <random>

#include "gf/vec3.hpp"

namespace gf::rng {

/**
 * Deterministic sampling helpers on top of mt19937_64. The uniform and
 * normal transforms are spelled out explicitly (bit shift and Box-Muller)
 * so streams do not depend on library distribution internals.
 */
class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        // 53-bit mantissa in (0, 1]; offset by half an ulp to avoid exact 0.
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double log_uniform(double lo, double hi) {
        return lo * std::exp(uniform01() * std::log(hi / lo));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 normal3() { return {normal(), normal(), normal()}; }

    Vec3 unit_sphere() {
        while (true) {
            Vec3 v = normal3();
            const double n = v.norm();
            if (n > 1e-12) return v * (1.0 / n);
        }
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gf::rng

#endif
