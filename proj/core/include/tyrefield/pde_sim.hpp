#pragma once

#include <optional>
#include <vector>

#include "tyrefield/types.hpp"
#include "tyrefield/vehicle_model.hpp"

namespace tyrefield {

inline constexpr double kGravity = 9.81;
inline constexpr double kDefaultFreeResponseVy = 0.01;

enum class ScenarioKind { ConstantSteer, SineSweep, FreeResponse };

struct ScenarioParams {
    double delta1_amp = 0.0;  // rad
    double delta2_amp = 0.0;  // rad
    std::optional<double> omega;
    double T = 2.0;
    std::optional<Vec2> x0;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::ConstantSteer;
    double delta1_amp = 0.0;
    double delta2_amp = 0.0;
    double omega = 0.0;
    double T = 2.0;
    Vec2 x0 = Vec2::Zero();
    std::optional<GridFunction> z0;

    Vec2 delta(double t) const;
    void validate() const;
};

Scenario build_scenario(ScenarioKind kind, const ScenarioParams& params);

struct SimGrid {
    double d_xi = 0.02;
    double dt = 1e-4;
    int substeps = 0;  // 0 selects the CFL minimum

    int cells() const;
    void validate() const;
};

int substeps_for_cfl(const VehicleConfig& cfg, const SimGrid& grid);

struct SimState {
    Vec2 x = Vec2::Zero();
    GridFunction z;
};

struct Trajectory {
    std::vector<double> t, vy, r, Fy1, Fy2, ay_g;
    SimState final_state;
    int substeps = 1;

    std::size_t size() const { return t.size(); }
};

class Simulator {
public:
    Simulator(const StateSpaceModel& model, int cells);

    struct Rhs {
        Vec2 v;
        Vec2 dx;
        GridFunction dz;        // includes transport
        GridFunction dz_total;  // right-hand side without transport
        Vec2 forces;            // K1 z + Sigma K2 z + h1
    };

    Rhs rhs(const SimState& s, const Vec2& delta) const;
    SimState step(const SimState& s, const Vec2& delta, double dt_sub) const;
    void step_inplace(SimState& s, const Vec2& delta, double dt_sub);

    // Forces from the distributed state via axle_forces.
    Vec2 output_forces(const SimState& s, const Vec2& delta) const;

    // Fixed point of the semi-discrete right-hand side for constant delta.
    SimState discrete_equilibrium(const Vec2& delta, const Vec2& x_guess, double tol = 1e-13) const;

    // z solving the discrete stationary transport problem for frozen lumped state x.
    GridFunction stationary_profile(const Vec2& x, const Vec2& delta) const;

    const StateSpaceModel& model() const { return model_; }
    int cells() const { return N_; }

private:
    StateSpaceModel model_;
    int N_;
    DiscreteOperators ops_;
    GridFunction scratch_;
};

SimState step(const StateSpaceModel& model, const SimState& state, const Vec2& delta, double dt_sub);

Trajectory simulate(const StateSpaceModel& model, const Scenario& scenario, const SimGrid& grid);

}  // namespace tyrefield
