#include <benchmark/benchmark.h>

#include "lightfc/model.hpp"
#include "lightfc/rigged.hpp"
#include "lightfc/synth.hpp"
#include "lightfc/tracker.hpp"

using namespace lightfc;

namespace {

const Model& train_model() {
  static const Model m = make_model(ModelConfig{});
  return m;
}

const Model& deploy_model() {
  static const Model m = fuse(train_model());
  return m;
}

}  // namespace

static void BM_Backbone(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const Tensor x = random_tensor(rng, {1, 3, side, side});
  const Backbone& net = train_model().backbone;
  for (auto _ : state) {
    Tensor f = backbone_forward(x, net);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_Backbone)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

// Arg 0: train form, 1: deploy form. Template features are cached, as in tracking.
static void BM_SearchStep(benchmark::State& state) {
  const Model& m = state.range(0) == 0 ? train_model() : deploy_model();
  Rng rng(4);
  const Tensor z = encode_template(m, random_tensor(rng, {1, 3, 128, 128}));
  const Tensor x = random_tensor(rng, {1, 3, 256, 256});
  for (auto _ : state) {
    HeadOutput out = predict(m, z, x);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_SearchStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_TrackFrame(benchmark::State& state) {
  SynthOptions opt;
  opt.frames = 2;
  const SynthSequence seq = make_synth(opt);
  const PipelineConfig cfg;
  const NetworkPredictor net(deploy_model());
  TrackerState s = init(net, cfg, seq.frames[0], seq.boxes[0]);
  const TrackerState start = s;
  for (auto _ : state) {
    s.box = start.box;
    TrackResult r = track(net, s, seq.frames[1]);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_TrackFrame)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
