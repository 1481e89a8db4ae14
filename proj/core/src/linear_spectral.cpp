#include "tyrefield/linear_spectral.hpp"

#include <cmath>
#include <numbers>

#include "tyrefield/errors.hpp"
#include "tyrefield/pde_sim.hpp"
#include "tyrefield/quadrature.hpp"

namespace tyrefield {

namespace {

StateSpaceModel with_min_eps(const StateSpaceModel& m, double eps_min)
{
    StateSpaceModel out = m;
    for (auto& a : out.cfg.axles) a.friction.eps = std::max(a.friction.eps, eps_min);
    return out;
}

Vec2 stationary_residual(const StateSpaceModel& m, const Vec2& x, const Vec2& delta)
{
    const Vec2 v = m.A2 * x + m.G2 * delta;
    return m.A1 * x + m.G1 * m.steady_axle_forces(v);
}

struct NewtonResult {
    Vec2 x;
    double residual;
    int iterations;
};

NewtonResult newton(const StateSpaceModel& m, const Vec2& delta, Vec2 x, double tol, int max_iter)
{
    Vec2 f = stationary_residual(m, x, delta);
    int it = 0;
    for (; it < max_iter && f.norm() > tol; ++it) {
        Mat2 J;
        for (int k = 0; k < 2; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
            Vec2 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            J.col(k) = (stationary_residual(m, xp, delta) - stationary_residual(m, xm, delta)) / (2.0 * h);
        }
        const Vec2 dx = J.fullPivLu().solve(-f);
        if (!dx.allFinite()) break;
        double t = 1.0;
        Vec2 xn = x + dx;
        Vec2 fn = stationary_residual(m, xn, delta);
        for (int h = 0; h < 30 && !(fn.norm() < f.norm()); ++h) {
            t *= 0.5;
            xn = x + t * dx;
            fn = stationary_residual(m, xn, delta);
        }
        if (!(fn.norm() < f.norm())) break;
        x = xn;
        f = fn;
    }
    return {x, f.norm(), it};
}

}  // namespace

Equilibrium find_equilibrium(const StateSpaceModel& model, const Vec2& delta_star)
{
    if (!delta_star.allFinite()) throw ValidationError("equilibrium: steering angles must be finite");
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 100;
    const Vec2 guess = linear_steady_state(model, delta_star);
    const StateSpaceModel smooth = with_min_eps(model, 1e-9);
    NewtonResult r = newton(smooth, delta_star, guess, kTol, kMaxIter);
    int iters = r.iterations;
    // polish at the configured regularisation
    NewtonResult p = newton(model, delta_star, r.x, kTol, kMaxIter);
    iters += p.iterations;
    if (!(p.residual <= kTol)) throw ConvergenceError("equilibrium: Newton did not converge", p.residual, iters);

    Equilibrium eq;
    eq.x_star = p.x;
    eq.delta_star = delta_star;
    eq.v_star = model.A2 * p.x + model.G2 * delta_star;
    eq.F_star = model.steady_axle_forces(eq.v_star);
    for (int i = 0; i < 2; ++i) eq.z_star[i] = model.steady_profile(i, eq.v_star[i]);
    eq.residual = p.residual;
    eq.iterations = iters;
    return eq;
}

Mat2 LinearModel::H2(double xi) const
{
    Mat2 m = Mat2::Zero();
    for (int i = 0; i < 2; ++i) m(i, i) = H2_alpha[i] + H2_beta[i] * std::exp(-H2_kappa[i] * xi);
    return m;
}

namespace {

double kernel_integral(const DiagKernel& k, int i, const SteadyBristle& z, const PressureProfile& p)
{
    double s = 0.0;
    if (k.c_p[i] != 0.0) s += k.c_p[i] * z.weighted_integral(p);
    if (k.c_dp[i] != 0.0) s += k.c_dp[i] * z.weighted_integral_dp(p);
    return s;
}

}  // namespace

LinearModel linearize(const StateSpaceModel& model, const Equilibrium& eq)
{
    LinearModel lin;
    lin.model = model;
    lin.eq = eq;
    const Sources s = model.sources(eq.v_star);
    const SourceGradients d = model.source_gradients(eq.v_star);
    lin.Sigma_star = s.Sigma;
    lin.H1.setZero();
    for (int i = 0; i < 2; ++i) {
        const SteadyBristle& z = eq.z_star[i];
        const PressureProfile& p = model.cfg.axles[i].pressure;
        const double K2z = kernel_integral(model.K3, i, z, p);
        const double K3z = kernel_integral(model.K4, i, z, p);
        lin.H1(i, i) = d.dSigma[i] * K2z + d.dh1[i];
        lin.H2_alpha[i] = d.dSigma[i] * (z.amplitude + K3z) + d.dh2[i];
        lin.H2_beta[i] = -d.dSigma[i] * z.amplitude;
        lin.H2_kappa[i] = z.rate;
    }
    lin.A1_tilde = model.A1 + model.G1 * lin.H1 * model.A2;
    lin.B1_tilde = lin.H1 * model.G2;
    return lin;
}

namespace {

struct AxleBlocks {
    cplx Theta1, Theta2, Q1, Q2;
};

// int (cp pbar + cdp pbar') f, where f = sum of shifted exponential moments.
cplx weighted(const PressureProfile& prof, double cp, double cdp, double shift, cplx h)
{
    cplx s = 0.0;
    if (cp != 0.0) {
        const PressureTerms t = pressure_terms(prof);
        for (int k = 0; k < t.n; ++k) s += cp * t.t[k].coef * exp_moment_dd(t.t[k].power, t.t[k].rate + shift, h);
    }
    if (cdp != 0.0) {
        const PressureTerms t = pressure_derivative_terms(prof);
        for (int k = 0; k < t.n; ++k) s += cdp * t.t[k].coef * exp_moment_dd(t.t[k].power, t.t[k].rate + shift, h);
    }
    return s;
}

AxleBlocks axle_blocks(const LinearModel& lin, int i, cplx lambda)
{
    const StateSpaceModel& m = lin.model;
    const PressureProfile& prof = m.cfg.axles[i].pressure;
    const double L = m.Lambda[i];
    const double S = lin.Sigma_star[i];
    const cplx a = (S - lambda) / L;

    const double cp1 = m.K1.c_p[i] + S * m.K3.c_p[i];
    const double cdp1 = m.K1.c_dp[i] + S * m.K3.c_dp[i];
    const double b1 = m.K2[i];
    const double cp2 = S * m.K4.c_p[i] + m.K5.c_p[i];
    const double cdp2 = S * m.K4.c_dp[i] + m.K5.c_dp[i];
    const double b2 = m.K6[i];

    // Gamma(xi) = (e^{a xi} - 1)/a
    const cplx gamma1 = exp_moment(0, a);
    const cplx l1G = weighted(prof, cp1, cdp1, 0.0, a) + b1 * gamma1;
    const cplx l2G = weighted(prof, cp2, cdp2, 0.0, a) + b2 * gamma1;

    AxleBlocks out;
    out.Theta1 = l1G / L;
    out.Theta2 = l2G / L;
    const double alpha = lin.H2_alpha[i];
    const double beta = lin.H2_beta[i];
    cplx q1 = alpha * l1G, q2 = alpha * l2G;
    if (beta != 0.0) {
        // E(xi) = (e^{a xi} - e^{-kappa xi})/(a + kappa)
        const double kap = lin.H2_kappa[i];
        const cplx h = a + kap;
        // E(1) = e^{-kappa} (e^h - 1)/h
        const cplx e1 = std::exp(-kap) * exp_moment(0, h);
        q1 += beta * (weighted(prof, cp1, cdp1, -kap, h) + b1 * e1);
        q2 += beta * (weighted(prof, cp2, cdp2, -kap, h) + b2 * e1);
    }
    out.Q1 = q1 / L;
    out.Q2 = q2 / L;
    return out;
}

struct Blocks {
    CVec2 Theta1, Theta2, Q1, Q2;
};

Blocks all_blocks(const LinearModel& lin, cplx lambda)
{
    Blocks b;
    for (int i = 0; i < 2; ++i) {
        const AxleBlocks ab = axle_blocks(lin, i, lambda);
        b.Theta1[i] = ab.Theta1;
        b.Theta2[i] = ab.Theta2;
        b.Q1[i] = ab.Q1;
        b.Q2[i] = ab.Q2;
    }
    return b;
}

CMat6 assemble(const LinearModel& lin, cplx lambda, const Blocks& b)
{
    const StateSpaceModel& m = lin.model;
    CMat6 M = CMat6::Zero();
    const CMat2 I = CMat2::Identity();
    M.block<2, 2>(0, 0) = lin.A1_tilde.cast<cplx>() - lambda * I;
    M.block<2, 2>(0, 2) = m.G1.cast<cplx>();
    M.block<2, 2>(2, 0) = -(b.Q1.asDiagonal() * m.A2.cast<cplx>());
    M.block<2, 2>(2, 2) = I;
    M.block<2, 2>(2, 4) = -CMat2(b.Theta1.asDiagonal());
    M.block<2, 2>(4, 0) = -(b.Q2.asDiagonal() * m.A2.cast<cplx>());
    M.block<2, 2>(4, 4) = I - CMat2(b.Theta2.asDiagonal());
    return M;
}

}  // namespace

CharMatrix char_matrix(const LinearModel& lin, cplx lambda)
{
    const Blocks b = all_blocks(lin, lambda);
    CharMatrix cm;
    cm.lambda = lambda;
    cm.blocks = assemble(lin, lambda, b);
    cm.det = cm.blocks.partialPivLu().determinant();
    cm.Theta1 = b.Theta1;
    cm.Theta2 = b.Theta2;
    cm.Q1 = b.Q1;
    cm.Q2 = b.Q2;
    return cm;
}

cplx char_det(const LinearModel& lin, cplx lambda)
{
    const Blocks b = all_blocks(lin, lambda);
    const StateSpaceModel& m = lin.model;
    // Eliminating the two nonlocal rows leaves det(I - Theta2) det(A1t - lambda + G1 W A2)
    // with W diagonal; expand multilinearly in the rank-one terms to avoid dividing by 1 - Theta2.
    CMat2 B = lin.A1_tilde.cast<cplx>();
    B(0, 0) -= lambda;
    B(1, 1) -= lambda;
    const cplx detB = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
    CMat2 adj;
    adj << B(1, 1), -B(0, 1), -B(1, 0), B(0, 0);
    cplx c[2];
    for (int i = 0; i < 2; ++i) {
        const CVec2 u = m.G1.col(i).cast<cplx>();
        const CVec2 v = m.A2.row(i).transpose().cast<cplx>();
        c[i] = v.dot(adj * u);  // v is real, so no conjugation issue
    }
    const double c12 = m.G1.determinant() * m.A2.determinant();
    const cplx d1 = 1.0 - b.Theta2[0], d2 = 1.0 - b.Theta2[1];
    const cplx P1 = d1 * b.Q1[0] + b.Theta1[0] * b.Q2[0];
    const cplx P2 = d2 * b.Q1[1] + b.Theta1[1] * b.Q2[1];
    return d1 * d2 * detB + d2 * P1 * c[0] + d1 * P2 * c[1] + P1 * P2 * c12;
}

namespace {

struct OnContour {};

class Winder {
public:
    explicit Winder(const LinearModel& lin) : lin_(lin) {}

    cplx eval(cplx z)
    {
        ++evals;
        const cplx d = char_det(lin_, z);
        if (!(std::abs(d) > 0.0) || !std::isfinite(d.real()) || !std::isfinite(d.imag())) throw OnContour{};
        return d;
    }

    double segment(cplx za, cplx zb, cplx da, cplx db, int depth)
    {
        const double dphi = std::arg(db / da);
        if (std::abs(dphi) < 0.5 * std::numbers::pi) return dphi;
        if (depth > 48) throw OnContour{};
        const cplx zm = 0.5 * (za + zb);
        const cplx dm = eval(zm);
        return segment(za, zm, da, dm, depth + 1) + segment(zm, zb, dm, db, depth + 1);
    }

    double total(const Rect& r, double h0)
    {
        const cplx c[4] = {{r.sigma_min, r.omega_min}, {r.sigma_max, r.omega_min}, {r.sigma_max, r.omega_max},
                           {r.sigma_min, r.omega_max}};
        double sum = 0.0;
        for (int e = 0; e < 4; ++e) {
            const cplx a = c[e], b = c[(e + 1) % 4];
            const long n = std::max<long>(8, static_cast<long>(std::ceil(std::abs(b - a) / h0)));
            cplx zp = a, dp = eval(a);
            for (long k = 1; k <= n; ++k) {
                const cplx z = a + (b - a) * (double(k) / n);
                const cplx d = eval(z);
                sum += segment(zp, z, dp, d, 0);
                zp = z;
                dp = d;
            }
        }
        return sum;
    }

    long evals = 0;

private:
    const LinearModel& lin_;
};

}  // namespace

RootCount winding_count(const LinearModel& lin, const Rect& rect)
{
    if (!(rect.sigma_max > rect.sigma_min) || !(rect.omega_max > rect.omega_min))
        throw ValidationError("contour: rectangle bounds must be increasing");
    RootCount rc;
    Rect r = rect;
    const double base = 0.25 * lin.model.Lambda.minCoeff();
    Winder w(lin);
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            double h0 = std::min(base, 0.05 * std::max(r.sigma_max - r.sigma_min, r.omega_max - r.omega_min));
            for (int refine = 0; refine < 3; ++refine) {
                const double turns = w.total(r, h0) / (2.0 * std::numbers::pi);
                const double n = std::round(turns);
                if (std::abs(turns - n) < 0.05) {
                    rc.count = static_cast<int>(n);
                    rc.evaluations = w.evals;
                    return rc;
                }
                h0 *= 0.25;
            }
            throw OnContour{};
        } catch (const OnContour&) {
            rc.nudged = true;
            r.sigma_min += 1e-6;
            r.sigma_max += 1e-6;
            r.omega_min -= 1.3e-6;
            r.omega_max += 0.7e-6;
        }
    }
    throw NumericalError("contour: characteristic function vanishes on the contour");
}

RootCount count_unstable_roots(const LinearModel& lin, double sigma_max, double omega_max)
{
    if (!(sigma_max > 0.0) || !(omega_max > 0.0)) throw ValidationError("contour: bounds must be positive");
    return winding_count(lin, Rect{0.0, sigma_max, -omega_max, omega_max});
}

namespace {

bool newton_root(const LinearModel& lin, cplx& z)
{
    for (int it = 0; it < 60; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        const cplx d = char_det(lin, z);
        const cplx dd = (char_det(lin, z + h) - char_det(lin, z - h)) / (2.0 * h);
        if (dd == 0.0) return false;
        const cplx step = d / dd;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(z))) return true;
    }
    return false;
}

void locate(const LinearModel& lin, const Rect& r, int depth, std::vector<cplx>& out)
{
    const int n = winding_count(lin, r).count;
    if (n <= 0) return;
    const double w = r.sigma_max - r.sigma_min, h = r.omega_max - r.omega_min;
    const double size = std::max(w, h);
    if (n == 1 || depth > 40 || size < 1e-9) {
        cplx z(0.5 * (r.sigma_min + r.sigma_max), 0.5 * (r.omega_min + r.omega_max));
        const bool ok = newton_root(lin, z);
        const double m = 1e-9 * std::max(1.0, size);
        const bool inside = z.real() >= r.sigma_min - m && z.real() <= r.sigma_max + m &&
                            z.imag() >= r.omega_min - m && z.imag() <= r.omega_max + m;
        if (ok && inside) {
            for (int k = 0; k < n; ++k) out.push_back(z);
            return;
        }
        if (size < 1e-9 || depth > 40) {
            for (int k = 0; k < n; ++k) out.push_back(cplx(0.5 * (r.sigma_min + r.sigma_max), 0.5 * (r.omega_min + r.omega_max)));
            return;
        }
    }
    // off-centre split keeps conjugate-symmetric roots off the cut
    constexpr double f = 0.5 + 0.0137;
    Rect a = r, b = r;
    if (w >= h) {
        const double s = r.sigma_min + f * w;
        a.sigma_max = s;
        b.sigma_min = s;
    } else {
        const double s = r.omega_min + f * h;
        a.omega_max = s;
        b.omega_min = s;
    }
    locate(lin, a, depth + 1, out);
    locate(lin, b, depth + 1, out);
}

}  // namespace

std::vector<cplx> locate_roots(const LinearModel& lin, const Rect& rect)
{
    std::vector<cplx> roots;
    locate(lin, rect, 0, roots);
    return roots;
}

TransferMatrix transfer_function(const LinearModel& lin, cplx s)
{
    const StateSpaceModel& m = lin.model;
    const Blocks b = all_blocks(lin, s);
    const CMat6 M = assemble(lin, s, b);
    const Eigen::PartialPivLU<CMat6> lu(M);
    if (!(lu.rcond() > 1e-14)) throw PoleError("transfer function evaluated at a pole", std::abs(lu.determinant()));

    Eigen::Matrix<cplx, 6, 2> R;
    R.block<2, 2>(0, 0) = (m.G1 * lin.B1_tilde).cast<cplx>();
    R.block<2, 2>(2, 0) = -(b.Q1.asDiagonal() * m.G2.cast<cplx>());
    R.block<2, 2>(4, 0) = -(b.Q2.asDiagonal() * m.G2.cast<cplx>());
    const Eigen::Matrix<cplx, 6, 2> X = lu.solve(R);

    Eigen::Matrix<cplx, 4, 2> Y;
    Y.block<2, 2>(0, 0) = X.block<2, 2>(0, 0);
    Y.block<2, 2>(2, 0) = (lin.H1 * m.A2).cast<cplx>() * X.block<2, 2>(0, 0) + X.block<2, 2>(2, 0);
    Y.block<2, 2>(2, 0) -= lin.B1_tilde.cast<cplx>();
    Y = -Y;

    Eigen::Matrix<double, 5, 4> C = Eigen::Matrix<double, 5, 4>::Zero();
    C.block<4, 4>(0, 0).setIdentity();
    const double mg = m.cfg.m * kGravity;
    C(4, 2) = -1.0 / mg;
    C(4, 3) = -1.0 / mg;
    return C.cast<cplx>() * Y;
}

BodeTable bode_sweep(const LinearModel& lin, const std::vector<double>& omegas)
{
    BodeTable t;
    t.omega = omegas;
    const long n = static_cast<long>(omegas.size());
    t.mag_db.resize(n, 10);
    t.phase_deg.resize(n, 10);
    t.near_pole.assign(n, false);
    for (long k = 0; k < n; ++k) {
        if (!(omegas[k] >= 0.0) || !std::isfinite(omegas[k])) throw ValidationError("bode: frequencies must be finite and >= 0");
        TransferMatrix G;
        try {
            G = transfer_function(lin, cplx(0.0, omegas[k]));
        } catch (const PoleError&) {
            t.near_pole[k] = true;
            G.setConstant(cplx(std::nan(""), std::nan("")));
        }
        for (int o = 0; o < 5; ++o)
            for (int in = 0; in < 2; ++in) {
                const cplx g = G(o, in);
                t.mag_db(k, 2 * o + in) = 20.0 * std::log10(std::abs(g));
                double ph = std::arg(g) * 180.0 / std::numbers::pi;
                if (k > 0 && std::isfinite(t.phase_deg(k - 1, 2 * o + in)) && std::isfinite(ph)) {
                    const double prev = t.phase_deg(k - 1, 2 * o + in);
                    ph += 360.0 * std::round((prev - ph) / 360.0);
                }
                t.phase_deg(k, 2 * o + in) = ph;
            }
    }
    return t;
}

std::vector<double> log_space(double lo, double hi, int n)
{
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ValidationError("log_space: need 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int k = 0; k < n; ++k) out[k] = std::pow(10.0, a + (b - a) * k / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace tyrefield
