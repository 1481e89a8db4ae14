#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "tyrefield/friction.hpp"
#include "tyrefield/types.hpp"

namespace tyrefield {

enum class Variant { RigidCarcass, FlexibleCarcass };

struct AxleConfig {
    double L = 0.11;
    double F_z = 3924.0;
    double sigma_0 = 163.0;
    double sigma_1 = 0.1;
    double sigma_2 = 0.0;
    double w = 2.5e6;
    PressureProfile pressure;
    FrictionLaw friction = FrictionLaw::constant(1.0, 1e-6);

    // The larger share is computed directly and the other as its complement,
    // which is exact, so phi() + psi() == 1 holds in floating point.
    double phi() const
    {
        const double a = w / (sigma_0 * F_z + w);
        return a >= 0.5 ? a : 1.0 - sigma_0 * F_z / (sigma_0 * F_z + w);
    }
    double psi() const { return 1.0 - phi(); }
    double cornering_stiffness() const { return L * F_z * sigma_0; }
    double relaxation_length() const { return L * (F_z * sigma_0 + w) / (2.0 * w); }
};

struct VehicleConfig {
    double m = 1300.0;
    double I_z = 2000.0;
    double l1 = 1.0;
    double l2 = 1.6;
    double v_x = 20.0;
    int chi_1 = 0;
    int chi_2 = 0;
    int chi_3 = 0;
    Variant variant = Variant::RigidCarcass;
    std::array<AxleConfig, 2> axles;

    void validate() const;

    static VehicleConfig table2(Variant variant = Variant::RigidCarcass, double v_x = 20.0);
};

// Scalar friction environment seen by one axle at the configured speed.
BristleEnv axle_env(const VehicleConfig& cfg, int axle);

// K(xi) = diag(c_p[i] pbar_i(xi) + c_dp[i] pbar_i'(xi)).
struct DiagKernel {
    Vec2 c_p = Vec2::Zero();
    Vec2 c_dp = Vec2::Zero();
};

struct Sources {
    Vec2 Sigma;  // diagonal of Sigma(v)
    Vec2 h1;
    Vec2 h2;
};

// Derivatives of the diagonal entries with respect to the own-axle slip.
struct SourceGradients {
    Vec2 dSigma;
    Vec2 dh1;
    Vec2 dh2;
};

class StateSpaceModel {
public:
    VehicleConfig cfg;
    Mat2 A1, A2, G1, G2;
    Vec2 Lambda;
    DiagKernel K1, K3, K4, K5;
    Vec2 K2 = Vec2::Zero();
    Vec2 K6 = Vec2::Zero();

    double kernel(const DiagKernel& k, int axle, double xi) const;
    Mat2 kernel_matrix(const DiagKernel& k, double xi) const;

    Sources sources(const Vec2& v) const;
    SourceGradients source_gradients(const Vec2& v) const;

    // Stationary axle forces for slips v (twice the scalar steady force).
    Vec2 steady_axle_forces(const Vec2& v) const;
    SteadyBristle steady_profile(int axle, double v) const;

    bool flexible() const { return cfg.variant == Variant::FlexibleCarcass; }
};

StateSpaceModel assemble_model(const VehicleConfig& cfg);

// Lumped state reached with linear axle forces C_i v_i / v_x; zero if that system is singular.
Vec2 linear_steady_state(const StateSpaceModel& model, const Vec2& delta);

Vec2 slip_kinematics(const VehicleConfig& cfg, const Vec2& x, const Vec2& delta);

Sources eval_sources(const StateSpaceModel& model, const Vec2& v);

// Bristle deflections on nodes xi_j = j/N, j = 0..N; row 0 is pinned to zero.
struct GridFunction {
    int N = 0;
    Eigen::Matrix<double, Eigen::Dynamic, 2> values;

    GridFunction() = default;
    explicit GridFunction(int cells) : N(cells), values(Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(cells + 1, 2)) {}
    double d_xi() const { return 1.0 / N; }
};

struct NonlocalResult {
    Vec2 K1z = Vec2::Zero();
    Vec2 K2z = Vec2::Zero();
    Vec2 K3z = Vec2::Zero();
    Vec2 K4z = Vec2::Zero();
};

NonlocalResult apply_nonlocal(const StateSpaceModel& model, const GridFunction& z);

// Kernel values times trapezoid weights on a fixed grid; reused every step.
class DiscreteOperators {
public:
    DiscreteOperators(const StateSpaceModel& model, int N);

    NonlocalResult apply(const GridFunction& z) const;
    Vec2 forces(const StateSpaceModel& model, const GridFunction& z, const GridFunction* dz_total,
                const Vec2& v) const;

    int N() const { return N_; }

private:
    int N_;
    Eigen::Matrix<double, Eigen::Dynamic, 2> w1_, w3_, w4_, w5_, wp_;
    Vec2 K2_, K6_;
};

// Lateral force per axle from the distributed state.  dz_total is the total time
// derivative of z and is required for the rigid variant when sigma_1 > 0.
Vec2 axle_forces(const StateSpaceModel& model, const GridFunction& z, const GridFunction* dz_total,
                 const Vec2& v);

struct DerivedParams {
    double C1, C2;
    double lambda1, lambda2;
    double chi_us;
};

DerivedParams derived_params(const VehicleConfig& cfg);

struct DissipativityReport {
    bool h1_applicable = true;
    bool holds_H1 = false;
    bool holds_H2 = false;
    double max_psi_pbar = 0.0;
    int trials = 0;
    double qform_max = 0.0;
    bool qform_ok = false;
    std::uint64_t seed = 0;
};

DissipativityReport check_dissipativity(const VehicleConfig& cfg, std::uint64_t seed = 20240521,
                                        int trials = 1000);

double spectral_norm(const Mat2& M);
double growth_bound(const StateSpaceModel& model);

}  // namespace tyrefield
