#include <atomic>
#include <cmath>
#include <thread>

#include "tyrefield/errors.hpp"
#include "tyrefield/linear_spectral.hpp"

namespace tyrefield {

VehicleConfig chart_config(const VehicleConfig& base, double chi, double v_x)
{
    if (!(chi > 0.0) || !std::isfinite(chi)) throw ValidationError("chart: chi must be > 0");
    VehicleConfig c = base;
    c.v_x = v_x;
    const double chi0 = derived_params(base).chi_us;
    c.axles[0].sigma_0 = base.axles[0].sigma_0 * chi / chi0;
    c.validate();
    return c;
}

double carcass_stiffness_for(const AxleConfig& axle, double relaxation_length)
{
    const double den = 2.0 * relaxation_length - axle.L;
    if (!(den > 0.0)) throw ValidationError("relaxation length must exceed half the contact length");
    return axle.L * axle.F_z * axle.sigma_0 / den;
}

void ChartSpec::validate() const
{
    if (!(chi_min > 0.0 && chi_max >= chi_min) || n_chi < 1) throw ValidationError("chart: bad chi range");
    if (!(vx_min > 0.0 && vx_max >= vx_min) || n_vx < 1) throw ValidationError("chart: bad v_x range");
    if ((n_chi > 1 && chi_max == chi_min) || (n_vx > 1 && vx_max == vx_min))
        throw ValidationError("chart: degenerate range with more than one point");
    if (!(sigma_max > 0.0 && omega_max > 0.0)) throw ValidationError("chart: contour bounds must be > 0");
}

double ChartSpec::chi(int i) const { return n_chi == 1 ? chi_min : chi_min + (chi_max - chi_min) * i / (n_chi - 1); }

double ChartSpec::vx(int j) const { return n_vx == 1 ? vx_min : vx_min + (vx_max - vx_min) * j / (n_vx - 1); }

int StabilityChart::unstable_cells() const
{
    int n = 0;
    for (const auto& c : cells) n += c.unstable_roots > 0;
    return n;
}

LinearFactory zero_equilibrium_factory(const VehicleConfig& base)
{
    return [base](double chi, double v_x) {
        const StateSpaceModel m = assemble_model(chart_config(base, chi, v_x));
        return linearize(m, find_equilibrium(m, Vec2::Zero()));
    };
}

StabilityChart stability_chart(const LinearFactory& factory, const ChartSpec& spec)
{
    spec.validate();
    StabilityChart chart;
    chart.n_chi = spec.n_chi;
    chart.n_vx = spec.n_vx;
    chart.cells.resize(std::size_t(spec.n_chi) * spec.n_vx);
    for (int i = 0; i < spec.n_chi; ++i)
        for (int j = 0; j < spec.n_vx; ++j) {
            ChartCell& c = chart.cells[std::size_t(i) * spec.n_vx + j];
            c.chi = spec.chi(i);
            c.vx = spec.vx(j);
        }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < chart.cells.size(); k = next++) {
            ChartCell& c = chart.cells[k];
            try {
                const LinearModel lin = factory(c.chi, c.vx);
                const RootCount rc = count_unstable_roots(lin, spec.sigma_max, spec.omega_max);
                c.unstable_roots = rc.count;
                c.nudged = rc.nudged;
            } catch (const std::exception& e) {
                c.unstable_roots = -1;
                c.error = e.what();
            }
        }
    };
    unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(chart.cells.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return chart;
}

}  // namespace tyrefield
