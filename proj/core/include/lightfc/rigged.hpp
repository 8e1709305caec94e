#pragma once

#include "lightfc/tracker.hpp"

namespace lightfc {

// Stand-in for trained weights on synth sequences. It locates the target from the
// red-minus-blue chroma of the search patch and emits a one-hot response at the true
// cell with the exact sub-cell offset and size, so the surrounding pipeline (cropping,
// windowing, decoding, mapping back) is what gets tested.
class ChromaOraclePredictor final : public Predictor {
 public:
  explicit ChromaOraclePredictor(PipelineConfig cfg) : cfg_(cfg) {}

  Tensor encode_template(const Tensor& patch) const override;
  HeadOutput predict(const Tensor& template_features, const Tensor& search_patch) const override;

  static constexpr float kLogit = 20.0f;

 private:
  PipelineConfig cfg_;
};

}  // namespace lightfc
