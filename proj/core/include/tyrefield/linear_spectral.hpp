#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tyrefield/types.hpp"
#include "tyrefield/vehicle_model.hpp"

namespace tyrefield {

struct Equilibrium {
    Vec2 x_star = Vec2::Zero();
    Vec2 delta_star = Vec2::Zero();
    Vec2 v_star = Vec2::Zero();
    Vec2 F_star = Vec2::Zero();
    std::array<SteadyBristle, 2> z_star;
    double residual = 0.0;
    int iterations = 0;

    double z(int axle, double xi) const { return z_star[axle](xi); }
};

// Damped Newton on the stationary lumped equations with analytic stationary forces.
Equilibrium find_equilibrium(const StateSpaceModel& model, const Vec2& delta_star);

struct LinearModel {
    StateSpaceModel model;
    Equilibrium eq;
    Vec2 Sigma_star;
    Mat2 H1;
    // H2_i(xi) = alpha_i + beta_i exp(-kappa_i xi)
    Vec2 H2_alpha, H2_beta, H2_kappa;
    Mat2 A1_tilde;
    Mat2 B1_tilde;

    Mat2 H2(double xi) const;
    Mat2 A2_tilde(double xi) const { return H2(xi) * model.A2; }
    Mat2 B2_tilde(double xi) const { return H2(xi) * model.G2; }
};

LinearModel linearize(const StateSpaceModel& model, const Equilibrium& eq);

using CMat6 = Eigen::Matrix<cplx, 6, 6>;

struct CharMatrix {
    cplx lambda;
    CMat6 blocks;
    cplx det;
    // diagonal building blocks
    CVec2 Theta1, Theta2, Q1, Q2;
};

CharMatrix char_matrix(const LinearModel& lin, cplx lambda);

// D(lambda) without forming the 6x6 matrix.
cplx char_det(const LinearModel& lin, cplx lambda);

struct Rect {
    double sigma_min = 0.0;
    double sigma_max = 50.0;
    double omega_min = -500.0;
    double omega_max = 500.0;
};

struct RootCount {
    int count = 0;
    bool nudged = false;
    long evaluations = 0;
};

// Argument-principle count of zeros of D inside the rectangle.
RootCount winding_count(const LinearModel& lin, const Rect& rect);

RootCount count_unstable_roots(const LinearModel& lin, double sigma_max = 50.0, double omega_max = 500.0);

// Zeros of D inside the rectangle, refined by Newton.
std::vector<cplx> locate_roots(const LinearModel& lin, const Rect& rect);

// Front micro-stiffness rescaled to hit the requested understeer index, at speed v_x.
VehicleConfig chart_config(const VehicleConfig& base, double chi, double v_x);

// Carcass stiffness that produces the given relaxation length.
double carcass_stiffness_for(const AxleConfig& axle, double relaxation_length);

struct ChartSpec {
    double chi_min = 0.5, chi_max = 1.5;
    int n_chi = 60;
    double vx_min = 0.015, vx_max = 0.6;
    int n_vx = 40;
    double sigma_max = 50.0;
    double omega_max = 500.0;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
    double chi(int i) const;
    double vx(int j) const;
};

struct ChartCell {
    double chi = 0.0;
    double vx = 0.0;
    int unstable_roots = -1;
    bool nudged = false;
    std::string error;
};

struct StabilityChart {
    int n_chi = 0, n_vx = 0;
    std::vector<ChartCell> cells;  // chi-major

    const ChartCell& at(int i, int j) const { return cells[std::size_t(i) * n_vx + j]; }
    int unstable_cells() const;
};

using LinearFactory = std::function<LinearModel(double chi, double v_x)>;

// Linearisation about the zero equilibrium of chart_config(base, chi, v_x).
LinearFactory zero_equilibrium_factory(const VehicleConfig& base);

StabilityChart stability_chart(const LinearFactory& factory, const ChartSpec& spec);

using TransferMatrix = Eigen::Matrix<cplx, 5, 2>;

// Outputs (v_y, r, F_y1, F_y2, a_y/g) per steering input (delta_1, delta_2).
TransferMatrix transfer_function(const LinearModel& lin, cplx s);

struct BodeTable {
    std::vector<double> omega;
    // column 2*k + input for output k
    Eigen::MatrixXd mag_db;
    Eigen::MatrixXd phase_deg;
    std::vector<bool> near_pole;
};

BodeTable bode_sweep(const LinearModel& lin, const std::vector<double>& omegas);

std::vector<double> log_space(double lo, double hi, int n);

}  // namespace tyrefield
