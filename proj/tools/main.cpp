#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tyrefield/config.hpp"
#include "tyrefield/errors.hpp"
#include "tyrefield/results.hpp"
#include "tyrefield/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

const char* svg_name(tyrefield::PlotKind k)
{
    switch (k) {
    case tyrefield::PlotKind::SteadyForce: return "steady_force.svg";
    case tyrefield::PlotKind::Trajectory: return "trajectory.svg";
    case tyrefield::PlotKind::Chart: return "chart.svg";
    case tyrefield::PlotKind::Bode: return "bode.svg";
    }
    return "plot.svg";
}

void report_chart_failures(const tyrefield::ResultBundle& b)
{
    if (!b.chart) return;
    int failed = 0, nudged = 0;
    for (const auto& c : b.chart->cells) {
        if (c.unstable_roots < 0) {
            if (failed++ < 5) std::fprintf(stderr, "chart cell chi=%g vx=%g failed: %s\n", c.chi, c.vx, c.error.c_str());
        }
        nudged += c.nudged;
    }
    if (failed) std::fprintf(stderr, "%d chart cell(s) failed\n", failed);
    if (nudged) std::fprintf(stderr, "%d chart cell(s) used a nudged contour\n", nudged);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-track vehicle models with distributed FrBD tyres"};
    app.set_version_flag("--version", std::string(tyrefield::kVersion));

    std::string command, config_path, out_dir;
    std::uint64_t seed = 0;
    app.add_option("command", command, "steady-force | simulate | equilibrium | stability-chart | bode | check-dissipativity")
        ->required()
        ->check(CLI::IsMember(tyrefield::known_commands()));
    app.add_option("--config", config_path, "Run configuration file")->required();
    auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomised checks (overrides [analysis] seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        tyrefield::RunConfig cfg = tyrefield::load_config(config_path);
        if (*out_opt) cfg.output.directory = out_dir;
        if (*seed_opt) cfg.analysis.seed = seed;

        const tyrefield::ResultBundle bundle = tyrefield::run(command, cfg);
        report_chart_failures(bundle);

        const auto& dir = cfg.output.directory;
        if (cfg.output.csv)
            for (const auto& p : tyrefield::write_csv(bundle, dir)) std::cout << p.string() << '\n';
        if (cfg.output.svg)
            for (auto k : tyrefield::plot_kinds(bundle)) {
                const auto p = dir / svg_name(k);
                tyrefield::render_svg(bundle, k, p);
                std::cout << p.string() << '\n';
            }
        tyrefield::write_provenance(bundle, dir);
        return kExitOk;
    } catch (const tyrefield::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const tyrefield::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}
