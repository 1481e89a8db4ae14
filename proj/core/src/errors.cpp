#include "tyrefield/errors.hpp"

#include <cstdio>

namespace tyrefield {

namespace {
std::string fmt(const char* pattern, double a, double b)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}
}  // namespace

FrictionDomainError::FrictionDomainError(double v, double mu)
    : NumericalError(fmt("friction coefficient %.6g at v = %.6g is not positive", mu, v)), v_(v), mu_(mu)
{
}

ConvergenceError::ConvergenceError(const std::string& what, double residual, int iterations)
    : NumericalError(what + fmt(" (residual %.3e after %.0f iterations)", residual, iterations)),
      residual_(residual),
      iterations_(iterations)
{
}

BlowUpError::BlowUpError(double time, double max_abs)
    : NumericalError(fmt("simulation blew up at t = %.6g s (max |state| = %.3e)", time, max_abs)),
      time_(time),
      max_abs_(max_abs)
{
}

PoleError::PoleError(const std::string& what, double abs_det)
    : NumericalError(what + fmt(" (|D| = %.3e)", abs_det, 0.0)),
      abs_det_(abs_det)
{
}

QuadratureError::QuadratureError(double achieved, double requested)
    : NumericalError(fmt("quadrature did not converge: achieved %.3e, requested %.3e", achieved, requested)),
      achieved_(achieved)
{
}

}  // namespace tyrefield
