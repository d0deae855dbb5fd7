#include <benchmark/benchmark.h>

#include "nlazf/metrics.hpp"
#include "nlazf/precoder.hpp"
#include "nlazf/rng.hpp"
#include "nlazf/simulation.hpp"

namespace {

struct Instance {
    nlazf::Channel h;
    nlazf::PAArray pa;
    nlazf::PowerAllocation power;
};

Instance make_instance(int antennas, std::uint64_t seed) {
    nlazf::Rng rng(seed);
    nlazf::Channel h = nlazf::draw_channel(2, antennas, rng);
    nlazf::PAArray pa = nlazf::perturb_pa(nlazf::PACoefficients({1.0, 0.0}, {-0.05, 0.01}),
                                          0.10, antennas, rng);
    return {std::move(h), std::move(pa), nlazf::PowerAllocation::equal_split(1.0, 2)};
}

void SolveAlg2(benchmark::State& state) {
    const Instance inst = make_instance(2, 7);
    for (auto _ : state) {
        auto report = nlazf::nla_zf_alg2(inst.h, inst.pa, inst.power, 1e-4, 100);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(SolveAlg2);

void SolveBlock(benchmark::State& state) {
    const Instance inst = make_instance(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        auto report = nlazf::nla_zf_block(inst.h, inst.pa, inst.power, 1e-4, 100);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(SolveBlock)->Arg(2)->Arg(8)->Arg(32);

void DistortionCovariance(benchmark::State& state) {
    const Instance inst = make_instance(static_cast<int>(state.range(0)), 7);
    const nlazf::Precoder w = nlazf::naive_zf(inst.h, inst.power);
    for (auto _ : state) {
        auto c = nlazf::distortion_covariance(w, inst.pa);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(DistortionCovariance)->Arg(2)->Arg(8);

void EmpiricalCovariance(benchmark::State& state) {
    const Instance inst = make_instance(2, 7);
    const nlazf::Precoder w = nlazf::naive_zf(inst.h, inst.power);
    for (auto _ : state) {
        auto stats = nlazf::empirical_distortion_stats(w, inst.pa, state.range(0), 11);
        benchmark::DoNotOptimize(stats);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(EmpiricalCovariance)->Arg(1 << 12)->Arg(1 << 16);

void SindrPerUser(benchmark::State& state) {
    const Instance inst = make_instance(8, 7);
    const nlazf::Precoder w = nlazf::naive_zf(inst.h, inst.power);
    for (auto _ : state) {
        auto report = nlazf::sindr_per_user(inst.h, w, inst.pa, 0.01);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(SindrPerUser);

void SmallSweep(benchmark::State& state) {
    nlazf::SimConfig config;
    config.n_realizations = static_cast<int>(state.range(0));
    config.snr_grid_db = {0, 10, 20, 30};
    for (auto _ : state) {
        auto result = nlazf::run_sweep(config);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(SmallSweep)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
