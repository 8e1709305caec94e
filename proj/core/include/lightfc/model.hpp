#pragma once

#include <cstdint>

#include "lightfc/backbone.hpp"
#include "lightfc/ecm.hpp"
#include "lightfc/head.hpp"
#include "lightfc/tracker.hpp"

namespace lightfc {

struct ModelConfig {
  EcmConfig ecm;
  HeadConfig head;
  std::size_t template_feature = 8;  // Hz = Wz of the template feature map
  std::uint64_t seed = 1;

  std::size_t corr_channels() const { return template_feature * template_feature; }
  bool operator==(const ModelConfig&) const = default;
};

// Backbone, cross-correlation module and center head.
struct Model {
  ModelConfig config;
  Backbone backbone;
  EcmParams ecm;
  Head head;
};

Model make_model(const ModelConfig& cfg, const InitOptions& opt = {});

// Sets every train-form BN's running mean and variance to the jittered statistics of its
// input during one forward pass over a random template and a search crop twice its size.
// Keeps activations of random models near unit scale, as trained statistics would.
void calibrate_bn(Model& m, Rng& rng);

Tensor encode_template(const Model& m, const Tensor& template_image);
HeadOutput predict(const Model& m, const Tensor& template_features, const Tensor& search_image);
HeadOutput forward(const Model& m, const Tensor& template_image, const Tensor& search_image);

// Every rep unit replaced by its single-kernel equivalent.
Model fuse(const Model& m);
// True when no rep unit is left in train form.
bool is_deploy_form(const Model& m);

class NetworkPredictor final : public Predictor {
 public:
  explicit NetworkPredictor(const Model& model) : model_(model) {}
  Tensor encode_template(const Tensor& patch) const override;
  HeadOutput predict(const Tensor& template_features, const Tensor& search_patch) const override;

 private:
  const Model& model_;
};

}  // namespace lightfc
