#ifndef GF_ERRORS_HPP
#define GF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gf {

// Thrown when a quadrature target is divergent (or declared so by the
// divergence detector).
class NonIntegrableError : public std::runtime_error {
  public:
    explicit NonIntegrableError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the self-similar machinery is requested outside the regime
// lambda_e(p) > 0 where the construction is meaningful.
class StabilityRegimeError : public std::runtime_error {
  public:
    StabilityRegimeError(const std::string& what, double lambda_p)
        : std::runtime_error(what), lambda(lambda_p) {}
    double lambda;
};

// Thrown by time integrators on persistent step rejection or bound violation.
class IntegrationFailure : public std::runtime_error {
  public:
    explicit IntegrationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gf

#endif
