#pragma once

#include <vector>

#include "lightfc/blocks.hpp"

namespace lightfc {

// MobileNetV2 layer table up to and including the 96-channel stage.
struct StageSpec {
  std::size_t expansion;
  std::size_t channels;
  std::size_t repeats;
  std::size_t stride;
};

inline constexpr std::size_t kBackboneStride = 16;
inline constexpr std::size_t kBackboneChannels = 96;
inline constexpr std::size_t kStemChannels = 32;
inline constexpr StageSpec kBackboneStages[] = {
    {1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2}, {6, 96, 3, 1},
};

struct Backbone {
  CbrBlock stem;  // 3x3 stride 2, 3 -> 32
  std::vector<std::vector<InvertedResidual>> stages;
};

Backbone make_backbone(Rng& rng, const InitOptions& opt = {});

// image (1, 3, H, W) with H and W divisible by 16 -> (1, 96, H/16, W/16).
Tensor backbone_forward(const Tensor& image, const Backbone& net);

}  // namespace lightfc
