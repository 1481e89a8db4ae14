#pragma once

#include <stdexcept>
#include <string>

namespace tyrefield {

// Bad input: malformed config, violated parameter invariant, out-of-range argument.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong while computing on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FrictionDomainError : public NumericalError {
public:
    FrictionDomainError(double v, double mu);
    double velocity() const noexcept { return v_; }
    double coefficient() const noexcept { return mu_; }

private:
    double v_;
    double mu_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, int iterations);
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(double time, double max_abs);
    double time() const noexcept { return time_; }
    double max_abs() const noexcept { return max_abs_; }

private:
    double time_;
    double max_abs_;
};

class PoleError : public NumericalError {
public:
    PoleError(const std::string& what, double abs_det);
    double abs_det() const noexcept { return abs_det_; }

private:
    double abs_det_;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(double achieved, double requested);
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace tyrefield
