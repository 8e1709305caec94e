#pragma once

#include <array>

#include "lightfc/crop.hpp"
#include "lightfc/head.hpp"

namespace lightfc {

struct PipelineConfig {
  double template_factor = 2.0;
  std::size_t template_size = 128;
  double search_factor = 4.0;
  std::size_t search_size = 256;
  double window_weight = 0.49;
  std::array<float, 3> norm_mean{0.485f, 0.456f, 0.406f};
  std::array<float, 3> norm_std{0.229f, 0.224f, 0.225f};

  std::size_t template_feature() const { return template_size / 16; }
  std::size_t search_feature() const { return search_size / 16; }
  bool operator==(const PipelineConfig&) const = default;
};

// Everything the tracking loop needs from a model. Implementations must be safe to share
// across threads.
class Predictor {
 public:
  virtual ~Predictor() = default;
  // Normalized template patch -> template features.
  virtual Tensor encode_template(const Tensor& patch) const = 0;
  // Cached template features + normalized search patch -> head maps.
  virtual HeadOutput predict(const Tensor& template_features, const Tensor& search_patch) const = 0;
};

struct TrackerState {
  Box box;  // frame pixels, 0-based top-left
  Tensor template_features;
  CropGeometry last_crop;
  Tensor window;  // (1, 1, Hs, Ws)
  PipelineConfig config;
  std::size_t frame_index = 0;
};

struct TrackResult {
  Box box;
  double score = 0.0;
};

// Outer product of two symmetric cosine tapers, shape (1, 1, rows, cols).
Tensor hanning_window(std::size_t rows, std::size_t cols);

// (1 - weight) * response + weight * window.
Tensor hanning_penalty(const Tensor& response, const Tensor& window, double weight);

// Throws InputError on an empty frame or a degenerate box.
TrackerState init(const Predictor& model, const PipelineConfig& cfg, const Image& frame,
                  const Box& box);

// Searches around the previous box; the template from init is never replaced.
TrackResult track(const Predictor& model, TrackerState& state, const Image& frame);

}  // namespace lightfc
