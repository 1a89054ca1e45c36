// Serial reference vs OpenMP path for the candidate-parallel kernels.
// Range argument 0 selects serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "antigone/dataset.hpp"
#include "antigone/jtt.hpp"
#include "antigone/labeller.hpp"
#include "antigone/mc_noise.hpp"

using namespace antigone;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

const DatasetSplits& planted() {
    static const DatasetSplits parts =
        split(generate_synthetic(SyntheticSpec::spurious_blocks(4000, 0.1, 1.0, 2.0, 8, 1)), {0.5, 0.25, 0.25}, 1);
    return parts;
}

std::vector<HyperParams> grid(int epochs) {
    std::vector<HyperParams> out;
    for (double lr : {0.1, 0.03, 0.01, 0.003}) {
        for (double wd : {0.0, 0.001}) {
            HyperParams hp;
            hp.learning_rate = lr;
            hp.weight_decay = wd;
            hp.epochs = epochs;
            hp.seed = 1;
            hp.architecture = Architecture::mlp(16);
            out.push_back(hp);
        }
    }
    return out;
}

void BM_ScoreCandidates(benchmark::State& state) {
    const auto& d = planted();
    std::vector<std::vector<ModelParams>> runs;
    for (const auto& hp : grid(10)) runs.push_back(train_erm(d.train, hp));
    const auto candidates = enumerate_candidates(runs);
    for (auto _ : state) benchmark::DoNotOptimize(score_candidates(candidates, d.validation, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(candidates.size()));
}

void BM_McSweep(benchmark::State& state) {
    Vector a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    const auto groups = gaussian_clean_groups(a, b, 1.0, 20000, 0.5, 1);
    auto clf = initial_params(HyperParams{}, 2);
    clf.layers[0].weight << 1.0, -1.0;
    const auto cells = noise_grid(0.1, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(mc_sweep(groups, &clf, cells, 5000, 3, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells.size()));
}

void BM_EvaluateErmCandidates(benchmark::State& state) {
    const auto& d = planted();
    const std::vector<ValidationLabelling> l{{SensitiveSource::ground_truth, *d.validation.sensitive()}};
    const auto g = grid(5);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_erm_candidates(d.train, d.validation, l, g, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

}  // namespace

BENCHMARK(BM_ScoreCandidates)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McSweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateErmCandidates)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
