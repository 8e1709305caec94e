#include "lightfc/backbone.hpp"

#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

Backbone make_backbone(Rng& rng, const InitOptions& opt) {
  Backbone net;
  net.stem = make_cbr(rng, 3, kStemChannels, 3, 2, 1, Activation::relu, opt);
  std::size_t c_in = kStemChannels;
  for (const StageSpec& s : kBackboneStages) {
    std::vector<InvertedResidual> blocks;
    for (std::size_t i = 0; i < s.repeats; ++i) {
      blocks.push_back(
          make_inverted_residual(rng, c_in, s.channels, i == 0 ? s.stride : 1, s.expansion, opt));
      c_in = s.channels;
    }
    net.stages.push_back(std::move(blocks));
  }
  return net;
}

Tensor backbone_forward(const Tensor& image, const Backbone& net) {
  const Shape& s = image.shape();
  if (s.c != 3) throw ShapeError("backbone: expected 3 input channels, got " + s.str());
  if (s.h == 0 || s.w == 0 || s.h % kBackboneStride != 0 || s.w % kBackboneStride != 0) {
    throw ShapeError("backbone: input " + s.str() + " is not divisible by stride 16");
  }
  Tensor x = cbr_forward(image, net.stem);
  for (const auto& stage : net.stages) {
    for (const auto& block : stage) x = inverted_residual_forward(x, block);
  }
  return x;
}

}  // namespace lightfc
