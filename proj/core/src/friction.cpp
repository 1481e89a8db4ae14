#include "tyrefield/friction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tyrefield/errors.hpp"
#include "tyrefield/quadrature.hpp"

namespace tyrefield {

namespace {

void require(bool ok, const std::string& msg)
{
    if (!ok) throw ValidationError(msg);
}

bool is_flag(int f) { return f == 0 || f == 1; }

}  // namespace

void FrictionLaw::validate() const
{
    require(std::isfinite(mu_d) && mu_d > 0.0, "friction: mu_d must be > 0");
    require(std::isfinite(mu_s) && mu_s >= mu_d, "friction: mu_s must be >= mu_d");
    require(std::isfinite(v_S) && v_S > 0.0, "friction: v_S must be > 0");
    require(std::isfinite(sigma_3) && sigma_3 >= 0.0, "friction: sigma_3 must be >= 0");
    require(std::isfinite(eps) && eps >= 0.0, "friction: eps must be >= 0");
    if (constant_mu)
        require(std::isfinite(*constant_mu) && *constant_mu > 0.0, "friction: constant_mu must be > 0");
}

double eval_friction(const FrictionLaw& law, double v)
{
    if (law.constant_mu) return *law.constant_mu;
    const double u = v / law.v_S;
    const double mu = law.mu_d + (law.mu_s - law.mu_d) * std::exp(-u * u) + law.sigma_3 * v;
    if (!(mu > 0.0)) throw FrictionDomainError(v, mu);
    return mu;
}

double eval_friction_derivative(const FrictionLaw& law, double v)
{
    if (law.constant_mu) return 0.0;
    const double u = v / law.v_S;
    return -2.0 * (law.mu_s - law.mu_d) * (v / (law.v_S * law.v_S)) * std::exp(-u * u) + law.sigma_3;
}

AbsSgn abs_sgn_eps(double v, double eps)
{
    const double a = std::sqrt(v * v + eps);
    return {a, a > 0.0 ? v / a : 0.0};
}

void PressureProfile::validate() const
{
    if (kind == PressureKind::Exponential)
        require(std::isfinite(a) && a > 0.0, "pressure: exponential decay a must be > 0");
}

double PressureProfile::sup_norm() const
{
    switch (kind) {
    case PressureKind::Constant: return 1.0;
    case PressureKind::Exponential: return a / -std::expm1(-a);
    case PressureKind::Parabolic: return 1.5;
    }
    return 0.0;
}

double PressureProfile::value_at_one() const { return pressure_unchecked(*this, 1.0).p; }

PressureValue pressure_unchecked(const PressureProfile& profile, double xi)
{
    switch (profile.kind) {
    case PressureKind::Constant: return {1.0, 0.0};
    case PressureKind::Exponential: {
        const double a = profile.a;
        const double p = a * std::exp(-a * xi) / -std::expm1(-a);
        return {p, -a * p};
    }
    case PressureKind::Parabolic: return {6.0 * xi * (1.0 - xi), 6.0 - 12.0 * xi};
    }
    return {0.0, 0.0};
}

PressureValue eval_pressure(const PressureProfile& profile, double xi)
{
    if (!(xi >= 0.0 && xi <= 1.0)) throw ValidationError("pressure: position must lie in [0,1]");
    profile.validate();
    return pressure_unchecked(profile, xi);
}

PressureTerms pressure_terms(const PressureProfile& profile)
{
    PressureTerms t;
    switch (profile.kind) {
    case PressureKind::Constant:
        t.t[0] = {1.0, 0, 0.0};
        t.n = 1;
        break;
    case PressureKind::Exponential:
        t.t[0] = {profile.sup_norm(), 0, -profile.a};
        t.n = 1;
        break;
    case PressureKind::Parabolic:
        t.t[0] = {6.0, 1, 0.0};
        t.t[1] = {-6.0, 2, 0.0};
        t.n = 2;
        break;
    }
    return t;
}

PressureTerms pressure_derivative_terms(const PressureProfile& profile)
{
    PressureTerms t;
    switch (profile.kind) {
    case PressureKind::Constant: t.n = 0; break;
    case PressureKind::Exponential:
        t.t[0] = {-profile.a * profile.sup_norm(), 0, -profile.a};
        t.n = 1;
        break;
    case PressureKind::Parabolic:
        t.t[0] = {6.0, 0, 0.0};
        t.t[1] = {-12.0, 1, 0.0};
        t.n = 2;
        break;
    }
    return t;
}

void BristleEnv::validate() const
{
    require(std::isfinite(sigma_0) && sigma_0 > 0.0, "bristle: sigma_0 must be > 0");
    require(std::isfinite(sigma_1) && sigma_1 >= 0.0, "bristle: sigma_1 must be >= 0");
    require(std::isfinite(sigma_2) && sigma_2 >= 0.0, "bristle: sigma_2 must be >= 0");
    require(std::isfinite(V) && V > 0.0, "bristle: V must be > 0");
    require(std::isfinite(L) && L > 0.0, "bristle: L must be > 0");
    require(std::isfinite(F_z) && F_z > 0.0, "bristle: F_z must be > 0");
    require(is_flag(chi_1), "bristle: chi_1 must be 0 or 1");
    require(is_flag(chi_2), "bristle: chi_2 must be 0 or 1");
}

double eval_g(const FrictionLaw& law, const BristleEnv& env, double v)
{
    return env.chi_1 * env.sigma_1 * abs_sgn_eps(v, law.eps).abs + eval_friction(law, v);
}

double SteadyBristle::operator()(double xi) const { return amplitude * -std::expm1(-rate * xi); }

double SteadyBristle::derivative(double xi) const { return amplitude * rate * std::exp(-rate * xi); }

namespace {

// sum over terms of coef * int xi^p e^{rho xi} (1 - e^{-k xi})
double profile_integral(const PressureTerms& terms, double k)
{
    double s = 0.0;
    for (int i = 0; i < terms.n; ++i) {
        const PressureTerm& t = terms.t[i];
        s += t.coef * k * exp_moment_dd(t.power, t.rate - k, k).real();
    }
    return s;
}

}  // namespace

double SteadyBristle::weighted_integral(const PressureProfile& profile) const
{
    if (amplitude == 0.0) return 0.0;
    return amplitude * profile_integral(pressure_terms(profile), rate);
}

double SteadyBristle::weighted_integral_dp(const PressureProfile& profile) const
{
    if (amplitude == 0.0) return 0.0;
    return amplitude * profile_integral(pressure_derivative_terms(profile), rate);
}

SteadyBristle steady_bristle(const FrictionLaw& law, const BristleEnv& env, double v, int axle_factor)
{
    law.validate();
    env.validate();
    if (axle_factor != 1 && axle_factor != 2) throw ValidationError("bristle: axle factor must be 1 or 2");
    if (!std::isfinite(v)) throw ValidationError("bristle: velocity must be finite");
    const AbsSgn as = abs_sgn_eps(v, law.eps);
    const double mu = eval_friction(law, v);
    const double g = env.chi_1 * env.sigma_1 * as.abs + mu;
    SteadyBristle z;
    z.amplitude = axle_factor * as.sgn * mu / env.sigma_0;
    z.rate = env.sigma_0 * as.abs / (env.V * g);
    return z;
}

double steady_force(const FrictionLaw& law, const BristleEnv& env, const PressureProfile& profile, double v)
{
    profile.validate();
    if (profile.kind == PressureKind::Parabolic) {
        const double f64 = steady_force_quadrature(law, env, profile, v, 64);
        const double f128 = steady_force_quadrature(law, env, profile, v, 128);
        const double scale = std::max(std::abs(f128), 1e-300);
        const double err = std::abs(f128 - f64) / scale;
        if (err <= 1e-10) return f128;
        const double f256 = steady_force_quadrature(law, env, profile, v, 256);
        const double err2 = std::abs(f256 - f128) / std::max(std::abs(f256), 1e-300);
        if (err2 > 1e-8) throw QuadratureError(err2, 1e-8);
        return f256;
    }
    const SteadyBristle z = steady_bristle(law, env, v, 1);
    const AbsSgn as = abs_sgn_eps(v, law.eps);
    const double mu = eval_friction(law, v);
    const double g = env.chi_1 * env.sigma_1 * as.abs + mu;
    const double s0bar = env.sigma_0 * (1.0 - env.sigma_1 * as.abs / g);
    const double s2bar = env.sigma_2 + env.sigma_1 * mu / g;
    double f = s0bar * z.weighted_integral(profile) + s2bar * v;
    if (env.chi_2)
        f -= env.sigma_1 * env.V * (profile.value_at_one() * z(1.0) - z.weighted_integral_dp(profile));
    return env.F_z * f;
}

double steady_force_quadrature(const FrictionLaw& law, const BristleEnv& env, const PressureProfile& profile,
                               double v, int points)
{
    const SteadyBristle z = steady_bristle(law, env, v, 1);
    const double damp = env.sigma_1 * (1 - env.chi_2) * env.V;
    return env.F_z * integrate_unit(
                         [&](double xi) {
                             const double p = pressure_unchecked(profile, xi).p;
                             return p * (env.sigma_0 * z(xi) + damp * z.derivative(xi) + env.sigma_2 * v);
                         },
                         points);
}

}  // namespace tyrefield
