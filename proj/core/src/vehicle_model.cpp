#include "tyrefield/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
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

const char* axle_name(int i) { return i == 0 ? "axle.front" : "axle.rear"; }

}  // namespace

void VehicleConfig::validate() const
{
    require(std::isfinite(m) && m > 0.0, "vehicle: m must be > 0");
    require(std::isfinite(I_z) && I_z > 0.0, "vehicle: I_z must be > 0");
    require(std::isfinite(l1) && l1 > 0.0, "vehicle: l1 must be > 0");
    require(std::isfinite(l2) && l2 > 0.0, "vehicle: l2 must be > 0");
    require(std::isfinite(v_x) && v_x > 0.0, "vehicle: v_x must be > 0");
    require(is_flag(chi_1), "vehicle: chi_1 must be 0 or 1");
    require(is_flag(chi_2), "vehicle: chi_2 must be 0 or 1");
    require(is_flag(chi_3), "vehicle: chi_3 must be 0 or 1");
    for (int i = 0; i < 2; ++i) {
        const AxleConfig& a = axles[i];
        const std::string n = axle_name(i);
        require(std::isfinite(a.L) && a.L > 0.0, n + ": L must be > 0");
        require(std::isfinite(a.F_z) && a.F_z > 0.0, n + ": F_z must be > 0");
        require(std::isfinite(a.sigma_0) && a.sigma_0 > 0.0, n + ": sigma_0 must be > 0");
        require(std::isfinite(a.sigma_1) && a.sigma_1 >= 0.0, n + ": sigma_1 must be >= 0");
        require(std::isfinite(a.sigma_2) && a.sigma_2 >= 0.0, n + ": sigma_2 must be >= 0");
        try {
            a.pressure.validate();
            a.friction.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(n + ": " + e.what());
        }
        if (variant == Variant::FlexibleCarcass) {
            require(std::isfinite(a.w) && a.w > 0.0, n + ": w must be > 0");
            require(a.sigma_1 == 0.0 && a.sigma_2 == 0.0,
                    n + ": flexible carcass requires sigma_1 = sigma_2 = 0");
        }
    }
}

VehicleConfig VehicleConfig::table2(Variant variant, double v_x)
{
    VehicleConfig c;
    c.v_x = v_x;
    c.variant = variant;
    c.axles[0].L = 0.11;
    c.axles[0].F_z = 3924.0;
    c.axles[0].sigma_0 = 163.0;
    c.axles[1].L = 0.09;
    c.axles[1].F_z = 2453.0;
    c.axles[1].sigma_0 = 408.0;
    for (auto& a : c.axles) {
        a.sigma_1 = variant == Variant::FlexibleCarcass ? 0.0 : 0.1;
        a.sigma_2 = 0.0;
        a.w = 2.5e6;
        a.pressure = PressureProfile::constant();
        a.friction = FrictionLaw::constant(1.0, 1e-6);
    }
    return c;
}

BristleEnv axle_env(const VehicleConfig& cfg, int axle)
{
    const AxleConfig& a = cfg.axles[axle];
    BristleEnv e;
    e.sigma_0 = a.sigma_0;
    e.sigma_1 = a.sigma_1;
    e.sigma_2 = a.sigma_2;
    e.V = cfg.v_x / a.L;
    e.L = a.L;
    e.F_z = a.F_z;
    e.chi_1 = cfg.chi_1;
    e.chi_2 = cfg.chi_2;
    return e;
}

double StateSpaceModel::kernel(const DiagKernel& k, int axle, double xi) const
{
    const PressureValue p = pressure_unchecked(cfg.axles[axle].pressure, xi);
    return k.c_p[axle] * p.p + k.c_dp[axle] * p.dp;
}

Mat2 StateSpaceModel::kernel_matrix(const DiagKernel& k, double xi) const
{
    Mat2 m = Mat2::Zero();
    m(0, 0) = kernel(k, 0, xi);
    m(1, 1) = kernel(k, 1, xi);
    return m;
}

Sources StateSpaceModel::sources(const Vec2& v) const
{
    Sources s;
    for (int i = 0; i < 2; ++i) {
        const AxleConfig& a = cfg.axles[i];
        const AbsSgn as = abs_sgn_eps(v[i], a.friction.eps);
        const double mu = eval_friction(a.friction, v[i]);
        if (flexible()) {
            s.Sigma[i] = -a.sigma_0 * as.abs / mu;
            s.h1[i] = 0.0;
            s.h2[i] = 2.0 * a.phi() * v[i];
        } else {
            const double g = cfg.chi_1 * a.sigma_1 * as.abs + mu;
            s.Sigma[i] = -a.sigma_0 * as.abs / g;
            s.h1[i] = 2.0 * a.F_z * (a.sigma_1 * mu / g + a.sigma_2) * v[i];
            s.h2[i] = 2.0 * mu * v[i] / g;
        }
    }
    return s;
}

SourceGradients StateSpaceModel::source_gradients(const Vec2& v) const
{
    SourceGradients d;
    for (int i = 0; i < 2; ++i) {
        const AxleConfig& a = cfg.axles[i];
        const AbsSgn as = abs_sgn_eps(v[i], a.friction.eps);
        const double mu = eval_friction(a.friction, v[i]);
        const double dmu = eval_friction_derivative(a.friction, v[i]);
        const double c1 = flexible() ? 0.0 : cfg.chi_1 * a.sigma_1;
        const double g = c1 * as.abs + mu;
        const double dg = c1 * as.sgn + dmu;
        d.dSigma[i] = -a.sigma_0 * (as.sgn * g - as.abs * dg) / (g * g);
        if (flexible()) {
            d.dh1[i] = 0.0;
            d.dh2[i] = 2.0 * a.phi();
        } else {
            const double ratio = mu / g;
            const double dratio = (dmu * g - mu * dg) / (g * g);
            d.dh1[i] = 2.0 * a.F_z * (a.sigma_1 * dratio * v[i] + a.sigma_1 * ratio + a.sigma_2);
            d.dh2[i] = 2.0 * ((dmu * v[i] + mu) * g - mu * v[i] * dg) / (g * g);
        }
    }
    return d;
}

SteadyBristle StateSpaceModel::steady_profile(int axle, double v) const
{
    BristleEnv e = axle_env(cfg, axle);
    if (flexible()) e.sigma_1 = e.sigma_2 = 0.0;
    return steady_bristle(cfg.axles[axle].friction, e, v, 2);
}

Vec2 StateSpaceModel::steady_axle_forces(const Vec2& v) const
{
    Vec2 f;
    for (int i = 0; i < 2; ++i) {
        BristleEnv e = axle_env(cfg, i);
        if (flexible()) e.sigma_1 = e.sigma_2 = 0.0;
        f[i] = 2.0 * steady_force(cfg.axles[i].friction, e, cfg.axles[i].pressure, v[i]);
    }
    return f;
}

StateSpaceModel assemble_model(const VehicleConfig& cfg)
{
    cfg.validate();
    StateSpaceModel m;
    m.cfg = cfg;
    const double vx = cfg.v_x;
    m.A1 << 0.0, -vx, 0.0, 0.0;
    m.G1 << -1.0 / cfg.m, -1.0 / cfg.m, -cfg.l1 / cfg.I_z, cfg.l2 / cfg.I_z;
    m.A2 << 1.0, cfg.l1, 1.0, -cfg.l2;
    m.G2 << -vx, 0.0, 0.0, -vx * cfg.chi_3;
    for (int i = 0; i < 2; ++i) {
        const AxleConfig& a = cfg.axles[i];
        m.Lambda[i] = vx / a.L;
        const double p1 = a.pressure.value_at_one();
        m.K1.c_p[i] = a.F_z * a.sigma_0;
        if (m.flexible()) {
            const double psi = a.psi();
            m.K4.c_p[i] = -psi;
            m.K5.c_dp[i] = -vx * psi / a.L;
            m.K6[i] = vx * psi * p1 / a.L;
        } else {
            m.K1.c_dp[i] = cfg.chi_2 * a.F_z * vx * a.sigma_1 / a.L;
            m.K2[i] = -cfg.chi_2 * a.F_z * vx * a.sigma_1 * p1 / a.L;
            m.K3.c_p[i] = a.F_z * a.sigma_1;
        }
    }
    return m;
}

Vec2 linear_steady_state(const StateSpaceModel& model, const Vec2& delta)
{
    Vec2 c;
    for (int i = 0; i < 2; ++i) c[i] = model.cfg.axles[i].cornering_stiffness() / model.cfg.v_x;
    const Mat2 Cd = c.asDiagonal();
    const Mat2 M = model.A1 + model.G1 * Cd * model.A2;
    if (std::abs(M.determinant()) < 1e-12 * M.squaredNorm()) return Vec2::Zero();
    return -M.partialPivLu().solve(model.G1 * Cd * model.G2 * delta);
}

Vec2 slip_kinematics(const VehicleConfig& cfg, const Vec2& x, const Vec2& delta)
{
    const double vx = cfg.v_x;
    return {x[0] + cfg.l1 * x[1] - vx * delta[0], x[0] - cfg.l2 * x[1] - vx * cfg.chi_3 * delta[1]};
}

Sources eval_sources(const StateSpaceModel& model, const Vec2& v) { return model.sources(v); }

DiscreteOperators::DiscreteOperators(const StateSpaceModel& model, int N) : N_(N)
{
    if (N < 1) throw ValidationError("grid: need at least one cell");
    const std::vector<double> tw = trapezoid_weights(N);
    w1_.resize(N + 1, 2);
    w3_.resize(N + 1, 2);
    w4_.resize(N + 1, 2);
    w5_.resize(N + 1, 2);
    wp_.resize(N + 1, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j <= N; ++j) {
            const double xi = double(j) / N;
            w1_(j, i) = tw[j] * model.kernel(model.K1, i, xi);
            w3_(j, i) = tw[j] * model.kernel(model.K3, i, xi);
            w4_(j, i) = tw[j] * model.kernel(model.K4, i, xi);
            w5_(j, i) = tw[j] * model.kernel(model.K5, i, xi);
            wp_(j, i) = tw[j] * pressure_unchecked(model.cfg.axles[i].pressure, xi).p;
        }
    }
    K2_ = model.K2;
    K6_ = model.K6;
}

NonlocalResult DiscreteOperators::apply(const GridFunction& z) const
{
    if (z.N != N_) throw ValidationError("grid function size does not match operator grid");
    NonlocalResult r;
    for (int i = 0; i < 2; ++i) {
        const auto col = z.values.col(i);
        const double zN = col[N_];
        r.K1z[i] = w1_.col(i).dot(col) + K2_[i] * zN;
        r.K2z[i] = w3_.col(i).dot(col);
        r.K3z[i] = w4_.col(i).dot(col);
        r.K4z[i] = w5_.col(i).dot(col) + K6_[i] * zN;
    }
    return r;
}

Vec2 DiscreteOperators::forces(const StateSpaceModel& model, const GridFunction& z, const GridFunction* dz_total,
                               const Vec2& v) const
{
    if (z.N != N_ || (dz_total && dz_total->N != N_))
        throw ValidationError("grid function size does not match operator grid");
    const VehicleConfig& cfg = model.cfg;
    Vec2 f;
    for (int i = 0; i < 2; ++i) {
        const AxleConfig& a = cfg.axles[i];
        const auto col = z.values.col(i);
        double s = a.sigma_0 * wp_.col(i).dot(col) + 2.0 * a.sigma_2 * v[i] * wp_.col(i).sum();
        if (a.sigma_1 > 0.0) {
            if (!dz_total) throw ValidationError("axle forces: total derivative grid required when sigma_1 > 0");
            const auto dcol = dz_total->values.col(i);
            double damp = wp_.col(i).dot(dcol);
            if (cfg.chi_2) {
                const double inv = N_ * model.Lambda[i];
                double dxi = 0.0;
                for (int j = 0; j <= N_; ++j) {
                    const double d = j == 0 ? (col[1] - col[0]) * inv : (col[j] - col[j - 1]) * inv;
                    dxi += wp_(j, i) * d;
                }
                damp -= dxi;
            }
            s += a.sigma_1 * damp;
        }
        f[i] = a.F_z * s;
    }
    return f;
}

NonlocalResult apply_nonlocal(const StateSpaceModel& model, const GridFunction& z)
{
    return DiscreteOperators(model, z.N).apply(z);
}

Vec2 axle_forces(const StateSpaceModel& model, const GridFunction& z, const GridFunction* dz_total, const Vec2& v)
{
    return DiscreteOperators(model, z.N).forces(model, z, dz_total, v);
}

DerivedParams derived_params(const VehicleConfig& cfg)
{
    DerivedParams d;
    d.C1 = cfg.axles[0].cornering_stiffness();
    d.C2 = cfg.axles[1].cornering_stiffness();
    d.lambda1 = cfg.axles[0].relaxation_length();
    d.lambda2 = cfg.axles[1].relaxation_length();
    d.chi_us = d.C1 * cfg.l1 / (d.C2 * cfg.l2);
    return d;
}

DissipativityReport check_dissipativity(const VehicleConfig& cfg, std::uint64_t seed, int trials)
{
    cfg.validate();
    const StateSpaceModel model = assemble_model(cfg);
    DissipativityReport rep;
    rep.seed = seed;
    rep.trials = trials;

    bool parabolic = false;
    for (const auto& a : cfg.axles) parabolic |= a.pressure.kind == PressureKind::Parabolic;
    rep.h1_applicable = !parabolic;

    if (model.flexible()) {
        constexpr int kSamples = 10000;
        double worst = 0.0;
        for (const auto& a : cfg.axles) {
            double sup = 0.0;
            for (int j = 0; j < kSamples; ++j)
                sup = std::max(sup, pressure_unchecked(a.pressure, double(j) / (kSamples - 1)).p);
            worst = std::max(worst, a.psi() * sup);
        }
        rep.max_psi_pbar = worst;
        rep.holds_H1 = !parabolic && worst <= 1.0;
        rep.holds_H2 = true;
        for (const auto& a : cfg.axles) rep.holds_H2 &= !a.friction.constant_mu && a.friction.sigma_3 > 0.0;
    } else {
        // K2 = K3 = 0 needs sigma_1 = 0; Sigma <= 0 then makes the inequality immediate
        rep.holds_H1 = !parabolic && cfg.axles[0].sigma_1 == 0.0 && cfg.axles[1].sigma_1 == 0.0;
        rep.holds_H2 = true;
        for (const auto& a : cfg.axles)
            rep.holds_H2 &= (cfg.chi_1 && a.sigma_1 > 0.0) || (!a.friction.constant_mu && a.friction.sigma_3 > 0.0);
    }

    // Randomised check of int zeta^T P Sigma(y) [zeta + K3 zeta] <= 0 with P = diag(pbar).
    constexpr int N = 200;
    const DiscreteOperators ops(model, N);
    const std::vector<double> tw = trapezoid_weights(N);
    Eigen::Matrix<double, Eigen::Dynamic, 2> pw(N + 1, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= N; ++j) pw(j, i) = tw[j] * pressure_unchecked(cfg.axles[i].pressure, double(j) / N).p;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> yd(-5.0, 5.0), zd(-0.05, 0.05);
    GridFunction zeta(N);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Vec2 y(yd(rng), yd(rng));
        for (int j = 0; j <= N; ++j) {
            zeta.values(j, 0) = zd(rng);
            zeta.values(j, 1) = zd(rng);
        }
        const Sources s = model.sources(y);
        const NonlocalResult nl = ops.apply(zeta);
        double total = 0.0;
        for (int i = 0; i < 2; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= N; ++j) acc += pw(j, i) * zeta.values(j, i) * (zeta.values(j, i) + nl.K3z[i]);
            total += s.Sigma[i] * acc;
        }
        worst = std::max(worst, total);
    }
    rep.qform_max = trials > 0 ? worst : 0.0;
    rep.qform_ok = rep.qform_max <= 1e-12;
    return rep;
}

double spectral_norm(const Mat2& M)
{
    const double fro2 = M.squaredNorm();
    const double det = M.determinant();
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

double growth_bound(const StateSpaceModel& model)
{
    const double lmin = model.Lambda.minCoeff();
    const Mat2 K2 = model.K2.asDiagonal();
    const Mat2 K6 = model.K6.asDiagonal();
    const double a = spectral_norm(model.A1) + std::pow(spectral_norm(model.G1 * K2), 2) / lmin;
    const double b = std::pow(spectral_norm(K6), 2) / lmin;
    return std::max(a, b);
}

}  // namespace tyrefield
