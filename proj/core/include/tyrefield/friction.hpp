#pragma once

#include <optional>

namespace tyrefield {

struct FrictionLaw {
    double mu_d = 0.8;
    double mu_s = 1.2;
    double v_S = 0.6;
    double sigma_3 = 0.0018;
    double eps = 0.0;
    std::optional<double> constant_mu;

    void validate() const;

    static FrictionLaw table1() { return {}; }
    static FrictionLaw constant(double mu, double eps = 0.0)
    {
        FrictionLaw f;
        f.eps = eps;
        f.constant_mu = mu;
        return f;
    }
};

// mu(v). Throws FrictionDomainError when the viscous term drives it to <= 0.
double eval_friction(const FrictionLaw& law, double v);
// d mu / dv (no domain check).
double eval_friction_derivative(const FrictionLaw& law, double v);

struct AbsSgn {
    double abs;
    double sgn;
};

// sqrt(v^2 + eps) and v / sqrt(v^2 + eps); sgn is 0 at v = 0 when eps = 0.
AbsSgn abs_sgn_eps(double v, double eps);

enum class PressureKind { Constant, Exponential, Parabolic };

struct PressureProfile {
    PressureKind kind = PressureKind::Constant;
    double a = 1.0;

    void validate() const;
    double sup_norm() const;
    double value_at_one() const;

    static PressureProfile constant() { return {}; }
    static PressureProfile exponential(double a) { return {PressureKind::Exponential, a}; }
    static PressureProfile parabolic() { return {PressureKind::Parabolic, 1.0}; }
};

struct PressureValue {
    double p;
    double dp;
};

PressureValue eval_pressure(const PressureProfile& profile, double xi);

// Unchecked evaluation for hot loops.
PressureValue pressure_unchecked(const PressureProfile& profile, double xi);

// One term coef * xi^power * e^{rate xi} of a pressure profile or its derivative.
struct PressureTerm {
    double coef;
    int power;
    double rate;
};

struct PressureTerms {
    PressureTerm t[2];
    int n = 0;
};

PressureTerms pressure_terms(const PressureProfile& profile);
PressureTerms pressure_derivative_terms(const PressureProfile& profile);

struct BristleEnv {
    double sigma_0 = 180.0;
    double sigma_1 = 0.0;
    double sigma_2 = 0.0;
    double V = 200.0;
    double L = 0.1;
    double F_z = 3000.0;
    int chi_1 = 0;
    int chi_2 = 0;

    void validate() const;
};

// g(v; chi_1) = chi_1 sigma_1 |v|_eps + mu(v).
double eval_g(const FrictionLaw& law, const BristleEnv& env, double v);

// z*(xi) = amplitude * (1 - exp(-rate * xi)).
struct SteadyBristle {
    double amplitude = 0.0;
    double rate = 0.0;

    double operator()(double xi) const;
    double derivative(double xi) const;
    // int_0^1 pbar z* dxi and int_0^1 pbar' z* dxi in closed form.
    double weighted_integral(const PressureProfile& profile) const;
    double weighted_integral_dp(const PressureProfile& profile) const;
};

SteadyBristle steady_bristle(const FrictionLaw& law, const BristleEnv& env, double v,
                             int axle_factor = 1);

// Closed form for Constant and Exponential pressure, quadrature for Parabolic.
double steady_force(const FrictionLaw& law, const BristleEnv& env,
                    const PressureProfile& profile, double v);

// Direct quadrature of the force integrand with the steady profile.
double steady_force_quadrature(const FrictionLaw& law, const BristleEnv& env,
                               const PressureProfile& profile, double v, int points = 64);

}  // namespace tyrefield
