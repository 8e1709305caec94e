#include <benchmark/benchmark.h>

#include "lightfc/conv.hpp"
#include "lightfc/ecm.hpp"
#include "lightfc/random.hpp"

using namespace lightfc;

// Args: channels in, channels out, spatial size, kernel, groups (0 = depthwise).
static void BM_Conv2d(benchmark::State& state) {
  const auto ci = static_cast<std::size_t>(state.range(0));
  const auto co = static_cast<std::size_t>(state.range(1));
  const auto hw = static_cast<std::size_t>(state.range(2));
  const auto k = static_cast<std::size_t>(state.range(3));
  const auto g = state.range(4) == 0 ? ci : static_cast<std::size_t>(state.range(4));
  Rng rng(1);
  const Conv2dParams p = make_conv(rng, ci, co, k, 1, g);
  const Tensor x = random_tensor(rng, {1, ci, hw, hw});
  for (auto _ : state) {
    Tensor y = conv2d(x, p);
    benchmark::DoNotOptimize(y);
  }
  const double macs = double(hw * hw * co * (ci / g) * k * k);
  state.counters["MAC/s"] = benchmark::Counter(macs, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv2d)
    ->Args({160, 128, 16, 3, 1})  // head stage 1
    ->Args({128, 64, 16, 3, 1})
    ->Args({64, 384, 16, 1, 1})   // backbone expand
    ->Args({384, 384, 16, 3, 0})  // backbone depthwise
    ->Args({32, 32, 128, 3, 0})
    ->Unit(benchmark::kMicrosecond);

static void BM_PixelwiseCorr(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto hz = static_cast<std::size_t>(state.range(1));
  const auto hx = static_cast<std::size_t>(state.range(2));
  Rng rng(2);
  const Tensor z = random_tensor(rng, {1, c, hz, hz});
  const Tensor x = random_tensor(rng, {1, c, hx, hx});
  for (auto _ : state) {
    Tensor y = pixelwise_corr(z, x);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_PixelwiseCorr)->Args({96, 8, 16})->Args({96, 4, 8})->Args({96, 16, 32})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
