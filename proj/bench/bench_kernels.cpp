#include "hfc/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

namespace {

hfc::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    hfc::Matrix x(rows, cols);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    return x;
}

}  // namespace

static void BM_KernelMatrix(benchmark::State& state) {
    const auto x = random_matrix(state.range(0), 5, 1);
    const hfc::KernelSpec spec{hfc::KernelType::rbf, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(hfc::kernel_matrix(x, spec));
}
static void BM_KernelMatrixRef(benchmark::State& state) {
    const auto x = random_matrix(state.range(0), 5, 1);
    const hfc::KernelSpec spec{hfc::KernelType::rbf, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(hfc::kernel_matrix_ref(x, spec));
}
BENCHMARK(BM_KernelMatrix)->Arg(100)->Arg(400)->Arg(1600);
BENCHMARK(BM_KernelMatrixRef)->Arg(100)->Arg(400)->Arg(1600);

namespace {

struct SplitFixture {
    hfc::Matrix x;
    std::vector<double> residual;
    std::vector<std::vector<int>> sorted;
    std::vector<int> features;

    explicit SplitFixture(Eigen::Index rows) : x(random_matrix(rows, 8, 2)) {
        const auto r = random_matrix(rows, 1, 3);
        residual.assign(r.data(), r.data() + rows);
        for (int f = 0; f < 8; ++f) {
            features.push_back(f);
            std::vector<int> idx(static_cast<std::size_t>(rows));
            for (int i = 0; i < rows; ++i) idx[static_cast<std::size_t>(i)] = i;
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
            sorted.push_back(std::move(idx));
        }
    }
};

}  // namespace

static void BM_BestSplit(benchmark::State& state) {
    const SplitFixture s(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hfc::best_split(s.x, s.residual, s.sorted, s.features, 1.0, 1));
}
static void BM_BestSplitRef(benchmark::State& state) {
    const SplitFixture s(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hfc::best_split_ref(s.x, s.residual, s.sorted, s.features, 1.0, 1));
}
BENCHMARK(BM_BestSplit)->Arg(1000)->Arg(10000);
BENCHMARK(BM_BestSplitRef)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
