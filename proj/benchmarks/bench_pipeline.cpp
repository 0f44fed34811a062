#include <benchmark/benchmark.h>

#include "ipmc/circuit.hpp"
#include "ipmc/dataset.hpp"
#include "ipmc/estimation.hpp"
#include "ipmc/lm_trainer.hpp"
#include "ipmc/mlp.hpp"
#include "ipmc/stimulus.hpp"

using namespace ipmc;

namespace {

Signal prbs(double duration) {
    StimulusSpec s = StimulusSpec::defaults(StimulusKind::Prbs);
    s.duration = duration;
    return generate_stimulus(s);
}

WindowedDataset prbs_dataset(std::size_t tau) {
    const Signal v = prbs(120.0);
    const Signal v_o = simulate_cascade(build_cascade(PhysicalParams{}, 45), v, 16);
    return split_dataset(frame_windows(v, v_o, {tau, 1}), SplitRatios{}, 1);
}

} // namespace

static void BM_SimulateCascade(benchmark::State& state) {
    const Signal v = prbs(120.0);
    const CascadeModel model = build_cascade(PhysicalParams{}, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_cascade(model, v, 16));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_SimulateCascade)->Arg(10)->Arg(45)->Unit(benchmark::kMillisecond);

static void BM_EstimationObjective(benchmark::State& state) {
    const Signal v = prbs(60.0);
    const Signal v_o = simulate_cascade(build_cascade(PhysicalParams{}, 45), v, 16);
    EstimationProblem problem(v, v_o);
    problem.stages = 45;
    const PhysicalParams p;
    for (auto _ : state) benchmark::DoNotOptimize(objective_affine_nmse(p, problem));
}
BENCHMARK(BM_EstimationObjective)->Unit(benchmark::kMillisecond);

static void BM_Jacobian(benchmark::State& state) {
    const WindowedDataset d = prbs_dataset(60);
    const MlpModel m = init_model(default_layer_sizes(60), Activation::Tanh, 1);
    for (auto _ : state) benchmark::DoNotOptimize(jacobian(m, d.inputs));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.rows()));
}
BENCHMARK(BM_Jacobian)->Unit(benchmark::kMillisecond);

static void BM_LmEpoch(benchmark::State& state) {
    const WindowedDataset d = prbs_dataset(60);
    const std::vector<std::size_t> hidden(static_cast<std::size_t>(state.range(0)), 10);
    std::vector<std::size_t> sizes{60};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    MlpModel m = init_model(sizes, Activation::Tanh, 1);
    fit_normalization(m, d);
    LmConfig cfg;
    cfg.max_epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train_lm(m, d, cfg));
}
BENCHMARK(BM_LmEpoch)->Arg(2)->Arg(11)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
