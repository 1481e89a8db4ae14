#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tyrefield/config.hpp"
#include "tyrefield/csv.hpp"
#include "tyrefield/linear_spectral.hpp"
#include "tyrefield/pde_sim.hpp"
#include "tyrefield/vehicle_model.hpp"

namespace tyrefield {

struct Provenance {
    std::string command;
    std::uint64_t config_hash = 0;
    std::string version;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct SteadyForceTable {
    std::vector<double> v, force, force_quadrature;
};

struct BodeResult {
    double vx = 0.0;
    bool two_inputs = false;
    BodeTable table;
};

struct EquilibriumReport {
    Equilibrium eq;
    Mat2 A1_tilde;
    Mat2 B1_tilde;
};

struct DissipativitySummary {
    DissipativityReport report;
    double omega_0 = 0.0;
    Vec2 phi = Vec2::Zero();
    Vec2 psi = Vec2::Zero();
    DerivedParams derived{};
    bool flexible = false;
};

struct ResultBundle {
    Provenance provenance;
    std::optional<SteadyForceTable> steady_force;
    std::optional<Trajectory> trajectory;
    std::optional<StabilityChart> chart;
    std::vector<BodeResult> bode;
    std::optional<EquilibriumReport> equilibrium;
    std::optional<DissipativitySummary> dissipativity;
};

const std::vector<std::string>& known_commands();

ResultBundle run(const std::string& command, const RunConfig& config);

// One table per result kind, keyed by file name.
std::map<std::string, CsvTable> bundle_tables(const ResultBundle& bundle);

std::vector<std::filesystem::path> write_csv(const ResultBundle& bundle, const std::filesystem::path& dir);
void write_provenance(const ResultBundle& bundle, const std::filesystem::path& dir);

enum class PlotKind { SteadyForce, Trajectory, Chart, Bode };

std::vector<PlotKind> plot_kinds(const ResultBundle& bundle);
std::string render_svg_text(const ResultBundle& bundle, PlotKind kind);
void render_svg(const ResultBundle& bundle, PlotKind kind, const std::filesystem::path& path);

}  // namespace tyrefield
