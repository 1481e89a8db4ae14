#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tyrefield/errors.hpp"
#include "tyrefield/friction.hpp"
#include "tyrefield/linear_spectral.hpp"
#include "tyrefield/pde_sim.hpp"
#include "tyrefield/vehicle_model.hpp"

namespace tyrefield {

// Parse failure with the offending line (1-based; 0 when not tied to a line).
class ConfigError : public ValidationError {
public:
    ConfigError(int line, const std::string& msg);
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Inputs of the scalar steady-force command; defaults are the Table 1 tyre.
struct FrictionSpec {
    FrictionLaw law = FrictionLaw::table1();
    BristleEnv env{180.0, 0.0, 0.0, 200.0, 0.1, 3000.0, 1, 0};
    PressureProfile pressure;
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::ConstantSteer;
    ScenarioParams params;
    SimGrid grid;
};

struct AnalysisSpec {
    ChartSpec chart;
    double bode_omega_min = 0.1;
    double bode_omega_max = 1000.0;
    int bode_points = 200;
    std::vector<double> bode_omegas;  // overrides the log sweep when set
    std::vector<double> bode_vx;      // defaults to vehicle v_x
    Vec2 delta_star = Vec2::Zero();   // linearisation / equilibrium steering (rad)
    double force_v_min = -10.0;
    double force_v_max = 10.0;
    int force_points = 200;
    int trials = 1000;
    std::uint64_t seed = 20240521;
};

struct OutputSpec {
    std::filesystem::path directory = "tyrefield_out";
    bool csv = true;
    bool svg = true;
};

struct RunConfig {
    VehicleConfig vehicle = VehicleConfig::table2();
    FrictionSpec friction;
    ScenarioSpec scenario;
    AnalysisSpec analysis;
    OutputSpec output;
    std::uint64_t config_hash = 0;

    void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace tyrefield
