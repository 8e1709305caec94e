#include <doctest.h>

#include <cmath>

#include "lightfc/crop.hpp"
#include "lightfc/error.hpp"
#include "lightfc/model.hpp"
#include "lightfc/rigged.hpp"
#include "lightfc/synth.hpp"
#include "lightfc/tracker.hpp"
#include "oracles.hpp"

using namespace lightfc;

namespace {

Image gradient_frame(std::size_t w, std::size_t h) {
  Image img(w, h);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        img.at(c, y, x) = float(0.002 * x + 0.003 * y + 0.1 * c + 0.00001 * x * y);
  return img;
}

// Every cell equally likely, so only the window decides.
class FlatPredictor final : public Predictor {
 public:
  explicit FlatPredictor(std::size_t hs) : hs_(hs) {}
  Tensor encode_template(const Tensor&) const override { return Tensor({1, 1, 1, 1}); }
  HeadOutput predict(const Tensor&, const Tensor&) const override {
    return {Tensor({1, 1, hs_, hs_}), Tensor({1, 2, hs_, hs_}, 0.5f), Tensor({1, 2, hs_, hs_}, 0.2f)};
  }

 private:
  std::size_t hs_;
};

PipelineConfig small_pipeline() {
  PipelineConfig p;
  p.template_size = 64;
  p.search_size = 128;
  return p;
}

}  // namespace

TEST_CASE("crop: centered target needs no padding") {
  const Image f = gradient_frame(200, 160);
  const Crop c = crop_region(f, {80, 60, 40, 40}, 2.0, 64);
  CHECK(c.padded_pixels == 0);
  CHECK(c.patch.shape() == Shape{1, 3, 64, 64});
  CHECK(c.geom.side == doctest::Approx(80.0));
  CHECK(c.geom.scale == doctest::Approx(0.8));
}

TEST_CASE("crop: target centered on the origin pads all but one quadrant") {
  const Image f = gradient_frame(200, 160);
  const Crop c = crop_region(f, {-20, -20, 40, 40}, 2.0, 64);
  CHECK(c.padded_pixels == 64 * 64 - 32 * 32);
  const auto means = f.channel_means();
  for (std::size_t ch = 0; ch < 3; ++ch) {
    CHECK(c.patch.at(0, ch, 10, 10) == means[ch]);
    CHECK(c.patch.at(0, ch, 10, 50) == means[ch]);
    CHECK(c.patch.at(0, ch, 50, 10) == means[ch]);
    CHECK(c.patch.at(0, ch, 50, 50) != means[ch]);
  }
}

TEST_CASE("crop: resampled values match the bilinear oracle") {
  const Image f = gradient_frame(97, 83);
  const Box target{30.3, 20.7, 25.1, 19.6};
  const Crop c = crop_region(f, target, 2.0, 57);
  const std::pair<std::size_t, std::size_t> probes[] = {{0, 0}, {56, 56}, {28, 13}, {5, 44}, {40, 3}};
  for (auto [u, v] : probes) {
    const double fx = c.geom.origin_x() + (u + 0.5) / c.geom.scale;
    const double fy = c.geom.origin_y() + (v + 0.5) / c.geom.scale;
    REQUIRE(fx >= 0.0);
    REQUIRE(fy >= 0.0);
    for (std::size_t ch = 0; ch < 3; ++ch) {
      CHECK(std::abs(c.patch.at(0, ch, v, u) - oracle::bilinear(f, ch, fx, fy)) <= 1e-4);
    }
  }
}

TEST_CASE("crop: invalid inputs") {
  CHECK_THROWS_AS(crop_region(Image(), {0, 0, 4, 4}, 2.0, 16), InputError);
  CHECK_THROWS_AS(crop_region(gradient_frame(8, 8), {0, 0, 0, 4}, 2.0, 16), InputError);
}

TEST_CASE("hanning: zero, full and default weights") {
  Rng rng(1);
  const Tensor w = hanning_window(16, 16);
  const Tensor r = random_tensor(rng, {1, 1, 16, 16}, 0.0, 1.0);
  CHECK(hanning_penalty(r, w, 0.0) == r);
  CHECK(hanning_penalty(r, w, 1.0) == w);
  const std::size_t top = argmax_index(w);
  CHECK((top / 16 == 7 || top / 16 == 8));
  CHECK((top % 16 == 7 || top % 16 == 8));
  CHECK(w.at(0, 0, 0, 0) == 0.0f);

  Tensor one_hot({1, 1, 16, 16});
  one_hot.at(0, 0, 8, 8) = 1.0f;
  CHECK(argmax_index(hanning_penalty(one_hot, w, 0.49)) == 8 * 16 + 8);
  CHECK_THROWS_AS(hanning_penalty(r, hanning_window(15, 16), 0.5), ShapeError);
  CHECK_THROWS_AS(hanning_penalty(r, w, 1.5), InputError);
}

TEST_CASE("init: template features and determinism") {
  ModelConfig mc;
  const Model m = make_model(mc);
  const NetworkPredictor net(m);
  const PipelineConfig cfg;
  const SynthSequence seq = make_synth({});
  const TrackerState a = init(net, cfg, seq.frames[0], seq.boxes[0]);
  const TrackerState b = init(net, cfg, seq.frames[0], seq.boxes[0]);
  CHECK(a.template_features.shape() == Shape{1, 96, 8, 8});
  CHECK(a.template_features == b.template_features);
  CHECK(a.box == seq.boxes[0]);
  CHECK(a.window.shape() == Shape{1, 1, 16, 16});
  CHECK_THROWS_AS(init(net, cfg, seq.frames[0], {10, 10, 0.5, 20}), InputError);
  CHECK_THROWS_AS(init(net, cfg, Image(), seq.boxes[0]), InputError);
}

TEST_CASE("track: rigged weights follow a static target within 1 px") {
  SynthOptions opt;
  opt.frames = 2;
  const SynthSequence seq = make_synth(opt);
  const PipelineConfig cfg;
  const ChromaOraclePredictor rig(cfg);
  TrackerState s = init(rig, cfg, seq.frames[0], seq.boxes[0]);
  const Box gt = seq.boxes[0];
  for (int f = 0; f < 10; ++f) {
    const Box b = track(rig, s, seq.frames[0]).box;
    CHECK(std::abs(b.x - gt.x) <= 1.0);
    CHECK(std::abs(b.y - gt.y) <= 1.0);
    CHECK(std::abs(b.w - gt.w) <= 1.0);
    CHECK(std::abs(b.h - gt.h) <= 1.0);
  }
}

TEST_CASE("track: flat response keeps the box near its previous center") {
  const Image f = gradient_frame(320, 240);
  PipelineConfig cfg;
  const FlatPredictor flat(cfg.search_feature());
  const Box start{140, 100, 40, 40};
  TrackerState s = init(flat, cfg, f, start);
  const double cell = 4.0 * 40.0 / 16.0;
  const Box b = track(flat, s, f).box;
  CHECK(std::abs(b.cx() - start.cx()) <= cell);
  CHECK(std::abs(b.cy() - start.cy()) <= cell);
}

TEST_CASE("track: random weights over 100 frames stay inside the frame") {
  SynthOptions opt;
  opt.frames = 100;
  opt.motion = Motion::sine;
  opt.width = 240;
  opt.height = 180;
  opt.target_size = 30;
  const SynthSequence seq = make_synth(opt);
  const PipelineConfig cfg = small_pipeline();
  ModelConfig mc;
  mc.template_feature = cfg.template_feature();
  const Model m = make_model(mc);
  const NetworkPredictor net(m);
  TrackerState s = init(net, cfg, seq.frames[0], seq.boxes[0]);
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    const Box b = track(net, s, seq.frames[i]).box;
    CHECK(b.w >= 1.0);
    CHECK(b.h >= 1.0);
    CHECK(b.x >= 0.0);
    CHECK(b.y >= 0.0);
    CHECK(b.right() <= 240.0);
    CHECK(b.bottom() <= 180.0);
  }
}

TEST_CASE("track: identical runs are bit-identical") {
  SynthOptions opt;
  opt.frames = 4;
  const SynthSequence seq = make_synth(opt);
  const PipelineConfig cfg = small_pipeline();
  ModelConfig mc;
  mc.template_feature = cfg.template_feature();
  const Model m = make_model(mc);
  const NetworkPredictor net(m);
  auto run = [&] {
    std::vector<Box> out;
    TrackerState s = init(net, cfg, seq.frames[0], seq.boxes[0]);
    for (std::size_t i = 1; i < seq.frames.size(); ++i) out.push_back(track(net, s, seq.frames[i]).box);
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("track: train and deploy forms agree step by step") {
  SynthOptions opt;
  opt.frames = 12;
  const SynthSequence seq = make_synth(opt);
  const PipelineConfig cfg = small_pipeline();
  ModelConfig mc;
  mc.template_feature = cfg.template_feature();
  const Model m = make_model(mc);
  const Model d = fuse(m);
  const NetworkPredictor train(m);
  const NetworkPredictor deploy(d);
  TrackerState s = init(train, cfg, seq.frames[0], seq.boxes[0]);
  const TrackerState sd = init(deploy, cfg, seq.frames[0], seq.boxes[0]);
  CHECK(max_abs_diff(s.template_features, sd.template_features) <= 1e-3);
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    TrackerState shadow = s;
    shadow.template_features = sd.template_features;
    const Box bd = track(deploy, shadow, seq.frames[i]).box;
    const Box bt = track(train, s, seq.frames[i]).box;
    CHECK(std::abs(bt.x - bd.x) <= 1.0);
    CHECK(std::abs(bt.y - bd.y) <= 1.0);
    CHECK(std::abs(bt.w - bd.w) <= 1.0);
    CHECK(std::abs(bt.h - bd.h) <= 1.0);
  }
}
