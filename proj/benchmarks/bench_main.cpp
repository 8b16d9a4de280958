#include "igs/baselines.hpp"
#include "igs/iga.hpp"
#include "igs/simgen.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace igs;

namespace {

struct Case1
{
    SimInstance instance;
    std::shared_ptr<const Dataset> data;
    std::unique_ptr<Objective> objective;

    Case1(int n, Family family)
        : instance([&] {
              SimSpec spec;
              spec.sim_case = family == Family::gaussian ? SimCase::case1 : SimCase::case2;
              spec.n = n;
              spec.seed = 11;
              return generate(spec);
          }()),
          data(std::make_shared<const Dataset>(standardize(instance.data))),
          objective(make_objective(family, data))
    {
    }
};

const Case1& shared_case(int n, Family family)
{
    static Case1 gaussian300(300, Family::gaussian);
    static Case1 gaussian1200(1200, Family::gaussian);
    static Case1 logistic300(300, Family::logistic);
    if (family == Family::logistic) return logistic300;
    return n == 300 ? gaussian300 : gaussian1200;
}

void BM_ForwardGains(benchmark::State& state)
{
    const auto& c = shared_case(static_cast<int>(state.range(0)), Family::gaussian);
    IgaEngine engine(*c.objective, c.instance.partition, IgaConfig{});
    for (int k = 0; k < 3; ++k) engine.step(SelectionPolicy::greedy());
    const Eigen::VectorXd w = engine.coefficients();
    std::vector<int> inactive;
    for (int g = 0; g < c.instance.partition.m(); ++g) {
        if (!engine.active().contains(g)) inactive.push_back(g);
    }
    for (auto _ : state) benchmark::DoNotOptimize(c.objective->forward_gains(w, inactive, c.instance.partition));
}
BENCHMARK(BM_ForwardGains)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

void BM_RestrictedRefit(benchmark::State& state)
{
    const auto& c = shared_case(300, state.range(0) == 0 ? Family::gaussian : Family::logistic);
    const GroupSet support({1, 3, 5, 7, 9, 20, 40, 60});
    const auto features = feature_set(c.instance.partition, support);
    for (auto _ : state) benchmark::DoNotOptimize(c.objective->restricted_minimize(features, nullptr));
}
BENCHMARK(BM_RestrictedRefit)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_GroupLassoFit(benchmark::State& state)
{
    const auto& c = shared_case(300, Family::gaussian);
    const double alpha = 0.2 * alpha_max(*c.objective, c.instance.partition);
    const double L = lipschitz_constant(*c.objective);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            group_lasso_fit(*c.objective, c.instance.partition, alpha, nullptr, GroupLassoConfig{}, L));
    }
}
BENCHMARK(BM_GroupLassoFit)->Unit(benchmark::kMillisecond);

void BM_IgaPath(benchmark::State& state)
{
    const auto& c = shared_case(300, state.range(0) == 0 ? Family::gaussian : Family::logistic);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            run_path(*c.objective, c.instance.partition, IgaConfig{}, SelectionPolicy::greedy()));
    }
}
BENCHMARK(BM_IgaPath)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
