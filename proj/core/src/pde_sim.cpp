#include "tyrefield/pde_sim.hpp"

#include <cmath>
#include <string>

#include "tyrefield/errors.hpp"

namespace tyrefield {

Vec2 Scenario::delta(double t) const
{
    switch (kind) {
    case ScenarioKind::ConstantSteer: return {delta1_amp, delta2_amp};
    case ScenarioKind::SineSweep: {
        const double s = std::sin(omega * t);
        return {delta1_amp * s, delta2_amp * s};
    }
    case ScenarioKind::FreeResponse: return Vec2::Zero();
    }
    return Vec2::Zero();
}

void Scenario::validate() const
{
    if (!(std::isfinite(T) && T > 0.0)) throw ValidationError("scenario: T must be > 0");
    if (!std::isfinite(delta1_amp) || !std::isfinite(delta2_amp))
        throw ValidationError("scenario: steering amplitudes must be finite");
    if (kind == ScenarioKind::SineSweep && !(std::isfinite(omega) && omega > 0.0))
        throw ValidationError("scenario: omega must be > 0 for sine_sweep");
    if (kind == ScenarioKind::FreeResponse && (delta1_amp != 0.0 || delta2_amp != 0.0))
        throw ValidationError("scenario: free_response takes no steering input");
    if (!x0.allFinite()) throw ValidationError("scenario: initial state must be finite");
}

Scenario build_scenario(ScenarioKind kind, const ScenarioParams& p)
{
    Scenario s;
    s.kind = kind;
    s.delta1_amp = p.delta1_amp;
    s.delta2_amp = p.delta2_amp;
    s.T = p.T;
    if (kind == ScenarioKind::SineSweep) {
        if (!p.omega) throw ValidationError("scenario: sine_sweep requires omega");
        s.omega = *p.omega;
    }
    if (p.x0)
        s.x0 = *p.x0;
    else if (kind == ScenarioKind::FreeResponse)
        s.x0 = Vec2(kDefaultFreeResponseVy, 0.0);
    s.validate();
    return s;
}

int SimGrid::cells() const { return static_cast<int>(std::lround(1.0 / d_xi)); }

void SimGrid::validate() const
{
    if (!(std::isfinite(d_xi) && d_xi > 0.0 && d_xi <= 1.0)) throw ValidationError("grid: d_xi must lie in (0,1]");
    const double n = 1.0 / d_xi;
    if (std::abs(n - std::round(n)) > 1e-9 * n) throw ValidationError("grid: d_xi must divide 1 evenly");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("grid: dt must be > 0");
    if (substeps < 0) throw ValidationError("grid: substeps must be >= 0");
}

int substeps_for_cfl(const VehicleConfig& cfg, const SimGrid& grid)
{
    grid.validate();
    const double lam = std::max(cfg.v_x / cfg.axles[0].L, cfg.v_x / cfg.axles[1].L);
    const double cfl = lam * grid.dt / grid.d_xi;
    // absorb rounding so that an exact integer CFL number is not bumped up
    const int n = static_cast<int>(std::ceil(cfl * (1.0 - 1e-12)));
    return std::max(1, n);
}

Simulator::Simulator(const StateSpaceModel& model, int cells)
    : model_(model), N_(cells), ops_(model, cells), scratch_(cells)
{
}

Simulator::Rhs Simulator::rhs(const SimState& s, const Vec2& delta) const
{
    Rhs r;
    r.v = model_.A2 * s.x + model_.G2 * delta;
    const Sources src = model_.sources(r.v);
    const NonlocalResult nl = ops_.apply(s.z);
    r.forces = nl.K1z + src.Sigma.cwiseProduct(nl.K2z) + src.h1;
    r.dx = model_.A1 * s.x + model_.G1 * r.forces;
    r.dz = GridFunction(N_);
    r.dz_total = GridFunction(N_);
    for (int i = 0; i < 2; ++i) {
        const double c = src.Sigma[i] * nl.K3z[i] + nl.K4z[i] + src.h2[i];
        const double lam = model_.Lambda[i] * N_;
        const auto z = s.z.values.col(i);
        for (int j = 1; j <= N_; ++j) {
            const double tot = src.Sigma[i] * z[j] + c;
            r.dz_total.values(j, i) = tot;
            r.dz.values(j, i) = tot - lam * (z[j] - z[j - 1]);
        }
        // node 0 is pinned; its total derivative is the source evaluated at z = 0
        r.dz_total.values(0, i) = c;
    }
    return r;
}

SimState Simulator::step(const SimState& s, const Vec2& delta, double dt_sub) const
{
    const Rhs r = rhs(s, delta);
    SimState out = s;
    out.x += dt_sub * r.dx;
    out.z.values += dt_sub * r.dz.values;
    out.z.values.row(0).setZero();
    return out;
}

void Simulator::step_inplace(SimState& s, const Vec2& delta, double dt_sub)
{
    const Vec2 v = model_.A2 * s.x + model_.G2 * delta;
    const Sources src = model_.sources(v);
    const NonlocalResult nl = ops_.apply(s.z);
    const Vec2 f = nl.K1z + src.Sigma.cwiseProduct(nl.K2z) + src.h1;
    const Vec2 dx = model_.A1 * s.x + model_.G1 * f;
    for (int i = 0; i < 2; ++i) {
        const double c = src.Sigma[i] * nl.K3z[i] + nl.K4z[i] + src.h2[i];
        const double lam = model_.Lambda[i] * N_;
        const double sig = src.Sigma[i];
        double* z = s.z.values.col(i).data();
        double* d = scratch_.values.col(i).data();
        for (int j = 1; j <= N_; ++j) d[j] = sig * z[j] + c - lam * (z[j] - z[j - 1]);
        for (int j = 1; j <= N_; ++j) z[j] += dt_sub * d[j];
        z[0] = 0.0;
    }
    s.x += dt_sub * dx;
}

Vec2 Simulator::output_forces(const SimState& s, const Vec2& delta) const
{
    const Rhs r = rhs(s, delta);
    return ops_.forces(model_, s.z, &r.dz_total, r.v);
}

GridFunction Simulator::stationary_profile(const Vec2& x, const Vec2& delta) const
{
    const Vec2 v = model_.A2 * x + model_.G2 * delta;
    const Sources src = model_.sources(v);
    GridFunction za(N_), zb(N_);
    for (int i = 0; i < 2; ++i) {
        const double lam = model_.Lambda[i] * N_;
        const double den = lam - src.Sigma[i];
        for (int j = 1; j <= N_; ++j) {
            za.values(j, i) = (lam * za.values(j - 1, i) + src.h2[i]) / den;
            zb.values(j, i) = (lam * zb.values(j - 1, i) + 1.0) / den;
        }
    }
    // the nonlocal constant c = Sigma K3 z + K4 z is affine in itself
    const NonlocalResult na = ops_.apply(za);
    const NonlocalResult nb = ops_.apply(zb);
    GridFunction z(N_);
    for (int i = 0; i < 2; ++i) {
        const double ca = src.Sigma[i] * na.K3z[i] + na.K4z[i];
        const double cb = src.Sigma[i] * nb.K3z[i] + nb.K4z[i];
        const double c = ca / (1.0 - cb);
        z.values.col(i) = za.values.col(i) + c * zb.values.col(i);
    }
    return z;
}

SimState Simulator::discrete_equilibrium(const Vec2& delta, const Vec2& x_guess, double tol) const
{
    auto residual = [&](const Vec2& x) {
        SimState s;
        s.x = x;
        s.z = stationary_profile(x, delta);
        return rhs(s, delta).dx;
    };
    Vec2 x = x_guess;
    Vec2 f = residual(x);
    const double scale = 1.0 + model_.cfg.v_x;
    int it = 0;
    for (; it < 100 && f.norm() > tol * scale; ++it) {
        Mat2 J;
        for (int k = 0; k < 2; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
            Vec2 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            J.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        const Vec2 dx = J.partialPivLu().solve(-f);
        double t = 1.0;
        Vec2 xn = x + dx;
        Vec2 fn = residual(xn);
        for (int h = 0; h < 30 && fn.norm() > f.norm(); ++h) {
            t *= 0.5;
            xn = x + t * dx;
            fn = residual(xn);
        }
        x = xn;
        f = fn;
    }
    if (!(f.norm() <= tol * scale)) throw ConvergenceError("discrete equilibrium did not converge", f.norm(), it);
    SimState s;
    s.x = x;
    s.z = stationary_profile(x, delta);
    return s;
}

SimState step(const StateSpaceModel& model, const SimState& state, const Vec2& delta, double dt_sub)
{
    return Simulator(model, state.z.N).step(state, delta, dt_sub);
}

namespace {

double max_abs(const SimState& s)
{
    return std::max(s.x.cwiseAbs().maxCoeff(), s.z.values.cwiseAbs().maxCoeff());
}

}  // namespace

Trajectory simulate(const StateSpaceModel& model, const Scenario& scenario, const SimGrid& grid)
{
    scenario.validate();
    grid.validate();
    const int N = grid.cells();
    const int cfl_n = substeps_for_cfl(model.cfg, grid);
    int n_sub = grid.substeps > 0 ? grid.substeps : cfl_n;
    if (n_sub < cfl_n)
        throw ValidationError("grid: " + std::to_string(n_sub) + " substeps violate the CFL limit (need " +
                              std::to_string(cfl_n) + ")");
    const double dt_sub = grid.dt / n_sub;
    const long K = static_cast<long>(std::floor(scenario.T / grid.dt + 1e-9));

    Simulator sim(model, N);
    SimState s;
    s.x = scenario.x0;
    s.z = scenario.z0 ? *scenario.z0 : GridFunction(N);
    if (s.z.N != N) throw ValidationError("scenario: initial bristle grid does not match d_xi");
    s.z.values.row(0).setZero();

    Trajectory tr;
    tr.substeps = n_sub;
    const std::size_t cap = static_cast<std::size_t>(K + 1);
    for (auto* v : {&tr.t, &tr.vy, &tr.r, &tr.Fy1, &tr.Fy2, &tr.ay_g}) v->reserve(cap);
    const double mg = model.cfg.m * kGravity;
    auto record = [&](double t) {
        const Vec2 F = sim.output_forces(s, scenario.delta(t));
        tr.t.push_back(t);
        tr.vy.push_back(s.x[0]);
        tr.r.push_back(s.x[1]);
        tr.Fy1.push_back(F[0]);
        tr.Fy2.push_back(F[1]);
        tr.ay_g.push_back(-(F[0] + F[1]) / mg);
    };
    record(0.0);
    for (long k = 1; k <= K; ++k) {
        const double t0 = (k - 1) * grid.dt;
        for (int q = 0; q < n_sub; ++q) sim.step_inplace(s, scenario.delta(t0 + q * dt_sub), dt_sub);
        const double m = max_abs(s);
        if (!(m <= 1e9)) throw BlowUpError(k * grid.dt, m);
        record(k * grid.dt);
    }
    tr.final_state = s;
    return tr;
}

}  // namespace tyrefield
