#include <numbers>

#include <benchmark/benchmark.h>

#include "tyrefield/config.hpp"
#include "tyrefield/friction.hpp"
#include "tyrefield/linear_spectral.hpp"
#include "tyrefield/pde_sim.hpp"

using namespace tyrefield;

namespace {

LinearModel island()
{
    static const LinearModel lin =
        zero_equilibrium_factory(load_config(TYREFIELD_CONFIG_DIR "/fig3a_chart.cfg").vehicle)(0.8, 0.42);
    return lin;
}

void BM_SteadyForce(benchmark::State& st)
{
    const FrictionLaw law = FrictionLaw::table1();
    const BristleEnv env{};
    const PressureProfile p = PressureProfile::exponential(1.0);
    double v = -10.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(steady_force(law, env, p, v));
        v = v > 10.0 ? -10.0 : v + 0.01;
    }
}
BENCHMARK(BM_SteadyForce);

void BM_CharDet(benchmark::State& st)
{
    const LinearModel lin = island();
    cplx z(0.3, -400.0);
    for (auto _ : st) {
        benchmark::DoNotOptimize(char_det(lin, z));
        z += cplx(0.0, 0.1);
    }
}
BENCHMARK(BM_CharDet);

void BM_WindingCount(benchmark::State& st)
{
    const LinearModel lin = island();
    for (auto _ : st) benchmark::DoNotOptimize(count_unstable_roots(lin).count);
}
BENCHMARK(BM_WindingCount)->Unit(benchmark::kMillisecond);

void BM_SimStep(benchmark::State& st)
{
    const StateSpaceModel m = assemble_model(VehicleConfig::table2(Variant::FlexibleCarcass, 20.0));
    const int N = static_cast<int>(st.range(0));
    Simulator sim(m, N);
    const Vec2 d(2.0 * std::numbers::pi / 180.0, 0.0);
    SimState s = sim.discrete_equilibrium(d, linear_steady_state(m, d));
    for (auto _ : st) sim.step_inplace(s, d, 1e-5);
    st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_SimStep)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
