#include "lightfc/tracker.hpp"

#include <cmath>
#include <numbers>

#include "lightfc/error.hpp"

namespace lightfc {

namespace {

std::vector<double> taper(std::size_t n) {
  std::vector<double> v(n, 1.0);
  if (n < 2) return v;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  }
  return v;
}

Tensor prepare(Crop& crop, const PipelineConfig& cfg) {
  normalize_patch(crop.patch, cfg.norm_mean, cfg.norm_std);
  return std::move(crop.patch);
}

void check_box(const Image& frame, const Box& box) {
  if (frame.empty()) throw InputError("tracker: empty frame");
  if (!std::isfinite(box.x) || !std::isfinite(box.y) || !(box.w >= 1.0) || !(box.h >= 1.0)) {
    throw InputError("tracker: degenerate initial box");
  }
}

}  // namespace

Tensor hanning_window(std::size_t rows, std::size_t cols) {
  const auto r = taper(rows);
  const auto c = taper(cols);
  Tensor w({1, 1, rows, cols});
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) w.at(0, 0, y, x) = static_cast<float>(r[y] * c[x]);
  }
  return w;
}

Tensor hanning_penalty(const Tensor& response, const Tensor& window, double weight) {
  if (response.shape() != window.shape()) {
    throw ShapeError("hanning_penalty: response " + response.shape().str() + " vs window " +
                     window.shape().str());
  }
  if (!(weight >= 0.0 && weight <= 1.0)) throw InputError("hanning_penalty: weight outside [0, 1]");
  Tensor out = response;
  auto o = out.data();
  auto w = window.data();
  const float a = static_cast<float>(1.0 - weight);
  const float b = static_cast<float>(weight);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * o[i] + b * w[i];
  return out;
}

TrackerState init(const Predictor& model, const PipelineConfig& cfg, const Image& frame,
                  const Box& box) {
  check_box(frame, box);
  TrackerState state;
  state.config = cfg;
  state.box = box;
  Crop crop = crop_region(frame, box, cfg.template_factor, cfg.template_size);
  state.last_crop = crop.geom;
  state.template_features = model.encode_template(prepare(crop, cfg));
  state.window = hanning_window(cfg.search_feature(), cfg.search_feature());
  return state;
}

TrackResult track(const Predictor& model, TrackerState& state, const Image& frame) {
  if (frame.empty()) throw InputError("tracker: empty frame");
  if (state.template_features.empty()) throw InputError("tracker: state is not initialized");
  const PipelineConfig& cfg = state.config;
  Crop crop = crop_region(frame, state.box, cfg.search_factor, cfg.search_size);
  const CropGeometry geom = crop.geom;
  const HeadOutput out = model.predict(state.template_features, prepare(crop, cfg));
  const Tensor scores = hanning_penalty(sigmoid(out.response), state.window, cfg.window_weight);
  const Decoded d = decode_scores(scores, out.offset, out.size);
  state.box = map_box_to_image(d.box, geom);
  state.last_crop = geom;
  ++state.frame_index;
  return {state.box, d.score};
}

}  // namespace lightfc
