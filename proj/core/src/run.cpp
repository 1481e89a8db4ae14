#include <chrono>
#include <cstdio>
#include <fstream>

#include "tyrefield/errors.hpp"
#include "tyrefield/results.hpp"
#include "tyrefield/version.hpp"

namespace tyrefield {

namespace {

const char* kOutputNames[5] = {"vy", "r", "Fy1", "Fy2", "ay_g"};

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

SteadyForceTable run_steady_force(const RunConfig& c)
{
    const auto& f = c.friction;
    SteadyForceTable t;
    t.v = linspace(c.analysis.force_v_min, c.analysis.force_v_max, c.analysis.force_points);
    for (double v : t.v) {
        t.force.push_back(steady_force(f.law, f.env, f.pressure, v));
        t.force_quadrature.push_back(steady_force_quadrature(f.law, f.env, f.pressure, v));
    }
    return t;
}

std::vector<BodeResult> run_bode(const RunConfig& c)
{
    const auto& a = c.analysis;
    const std::vector<double> omegas =
        a.bode_omegas.empty() ? log_space(a.bode_omega_min, a.bode_omega_max, a.bode_points) : a.bode_omegas;
    const std::vector<double> speeds = a.bode_vx.empty() ? std::vector<double>{c.vehicle.v_x} : a.bode_vx;
    std::vector<BodeResult> out;
    for (double vx : speeds) {
        VehicleConfig cfg = c.vehicle;
        cfg.v_x = vx;
        const StateSpaceModel model = assemble_model(cfg);
        const LinearModel lin = linearize(model, find_equilibrium(model, a.delta_star));
        out.push_back({vx, cfg.chi_3 == 1, bode_sweep(lin, omegas)});
    }
    return out;
}

DissipativitySummary run_dissipativity(const RunConfig& c)
{
    DissipativitySummary s;
    s.report = check_dissipativity(c.vehicle, c.analysis.seed, c.analysis.trials);
    s.omega_0 = growth_bound(assemble_model(c.vehicle));
    for (int i = 0; i < 2; ++i) {
        s.phi(i) = c.vehicle.axles[i].phi();
        s.psi(i) = c.vehicle.axles[i].psi();
    }
    s.derived = derived_params(c.vehicle);
    s.flexible = c.vehicle.variant == Variant::FlexibleCarcass;
    return s;
}

using Row = std::vector<std::string>;

Row kv(const std::string& k, double v) { return {k, format_double(v)}; }
Row kv(const std::string& k, const std::string& v) { return {k, v}; }

}  // namespace

const std::vector<std::string>& known_commands()
{
    static const std::vector<std::string> c = {"steady-force",    "simulate", "equilibrium",
                                               "stability-chart", "bode",     "check-dissipativity"};
    return c;
}

ResultBundle run(const std::string& command, const RunConfig& config)
{
    config.validate();
    ResultBundle b;
    b.provenance.command = command;
    b.provenance.config_hash = config.config_hash;
    b.provenance.version = kVersion;
    b.provenance.seed = config.analysis.seed;
    const auto t0 = std::chrono::steady_clock::now();

    if (command == "steady-force") {
        b.steady_force = run_steady_force(config);
    } else if (command == "simulate") {
        const Scenario sc = build_scenario(config.scenario.kind, config.scenario.params);
        b.trajectory = simulate(assemble_model(config.vehicle), sc, config.scenario.grid);
    } else if (command == "equilibrium") {
        const StateSpaceModel model = assemble_model(config.vehicle);
        const Equilibrium eq = find_equilibrium(model, config.analysis.delta_star);
        const LinearModel lin = linearize(model, eq);
        b.equilibrium = EquilibriumReport{eq, lin.A1_tilde, lin.B1_tilde};
    } else if (command == "stability-chart") {
        b.chart = stability_chart(zero_equilibrium_factory(config.vehicle), config.analysis.chart);
    } else if (command == "bode") {
        b.bode = run_bode(config);
    } else if (command == "check-dissipativity") {
        b.dissipativity = run_dissipativity(config);
    } else {
        throw ValidationError("unknown command '" + command + "'");
    }

    b.provenance.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return b;
}

std::map<std::string, CsvTable> bundle_tables(const ResultBundle& b)
{
    std::map<std::string, CsvTable> out;

    if (b.steady_force) {
        CsvTable t{{"v", "F", "F_quadrature"}, {}};
        const auto& s = *b.steady_force;
        for (std::size_t k = 0; k < s.v.size(); ++k)
            t.rows.push_back({format_double(s.v[k]), format_double(s.force[k]), format_double(s.force_quadrature[k])});
        out["steady_force.csv"] = std::move(t);
    }

    if (b.trajectory) {
        CsvTable t{{"t", "vy", "r", "Fy1", "Fy2", "ay_g"}, {}};
        const auto& tr = *b.trajectory;
        for (std::size_t k = 0; k < tr.size(); ++k)
            t.rows.push_back({format_double(tr.t[k]), format_double(tr.vy[k]), format_double(tr.r[k]),
                              format_double(tr.Fy1[k]), format_double(tr.Fy2[k]), format_double(tr.ay_g[k])});
        out["trajectory.csv"] = std::move(t);
    }

    if (b.chart) {
        CsvTable t{{"chi", "vx", "unstable_roots"}, {}};
        for (const auto& c : b.chart->cells)
            t.rows.push_back({format_double(c.chi), format_double(c.vx), std::to_string(c.unstable_roots)});
        out["chart.csv"] = std::move(t);
    }

    if (!b.bode.empty()) {
        const bool two = b.bode.front().two_inputs;
        CsvTable t;
        t.header = {"vx", "omega"};
        for (int o = 0; o < 5; ++o)
            for (int in = 0; in < (two ? 2 : 1); ++in) {
                const std::string base = std::string(kOutputNames[o]) + "_d" + std::to_string(in + 1);
                t.header.push_back(base + "_mag_db");
                t.header.push_back(base + "_phase_deg");
            }
        t.header.push_back("near_pole");
        for (const auto& r : b.bode) {
            const BodeTable& bt = r.table;
            for (std::size_t k = 0; k < bt.omega.size(); ++k) {
                Row row{format_double(r.vx), format_double(bt.omega[k])};
                for (int o = 0; o < 5; ++o)
                    for (int in = 0; in < (two ? 2 : 1); ++in) {
                        row.push_back(format_double(bt.mag_db(long(k), 2 * o + in)));
                        row.push_back(format_double(bt.phase_deg(long(k), 2 * o + in)));
                    }
                row.push_back(bt.near_pole[k] ? "1" : "0");
                t.rows.push_back(std::move(row));
            }
        }
        out["bode.csv"] = std::move(t);
    }

    if (b.equilibrium) {
        const auto& e = b.equilibrium->eq;
        CsvTable t{{"quantity", "value"}, {}};
        t.rows = {kv("vy", e.x_star(0)),        kv("r", e.x_star(1)),         kv("delta1", e.delta_star(0)),
                  kv("delta2", e.delta_star(1)), kv("v1", e.v_star(0)),        kv("v2", e.v_star(1)),
                  kv("Fy1", e.F_star(0)),        kv("Fy2", e.F_star(1)),       kv("residual", e.residual),
                  kv("iterations", e.iterations)};
        const Mat2& A = b.equilibrium->A1_tilde;
        const Mat2& B = b.equilibrium->B1_tilde;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
                t.rows.push_back(kv("A1_tilde_" + ij, A(i, j)));
            }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const std::string ij = std::to_string(i + 1) + std::to_string(j + 1);
                t.rows.push_back(kv("B1_tilde_" + ij, B(i, j)));
            }
        out["equilibrium.csv"] = std::move(t);
    }

    if (b.dissipativity) {
        const auto& d = *b.dissipativity;
        const auto& r = d.report;
        CsvTable t{{"quantity", "value"}, {}};
        t.rows = {kv("variant", d.flexible ? "flexible" : "rigid"),
                  kv("H1", r.h1_applicable ? (r.holds_H1 ? "holds" : "violated") : "not_applicable"),
                  kv("H2", r.holds_H2 ? "holds" : "violated"),
                  kv("max_psi_pbar", r.max_psi_pbar),
                  kv("qform_max", r.qform_max),
                  kv("qform_ok", r.qform_ok ? "true" : "false"),
                  kv("trials", r.trials),
                  kv("seed", std::to_string(r.seed)),
                  kv("phi1", d.phi(0)),
                  kv("phi2", d.phi(1)),
                  kv("psi1", d.psi(0)),
                  kv("psi2", d.psi(1)),
                  kv("omega_0", d.omega_0),
                  kv("C1", d.derived.C1),
                  kv("C2", d.derived.C2),
                  kv("lambda1", d.derived.lambda1),
                  kv("lambda2", d.derived.lambda2),
                  kv("chi", d.derived.chi_us)};
        out["dissipativity.csv"] = std::move(t);
    }

    return out;
}

std::vector<std::filesystem::path> write_csv(const ResultBundle& bundle, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    for (const auto& [name, table] : bundle_tables(bundle)) {
        files.push_back(dir / name);
        write_csv_file(files.back(), table);
    }
    return files;
}

void write_provenance(const ResultBundle& b, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / "provenance.txt";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(b.provenance.config_hash));
    out << "command = " << b.provenance.command << '\n'
        << "version = " << b.provenance.version << '\n'
        << "config_hash = " << hash << '\n'
        << "seed = " << b.provenance.seed << '\n'
        << "wall_seconds = " << format_double(b.provenance.wall_seconds) << '\n';
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace tyrefield
