#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "lightfc/box.hpp"
#include "lightfc/image.hpp"

namespace lightfc {

enum class Motion { linear, sine };

std::string_view to_string(Motion m);
Motion parse_motion(std::string_view name);

struct SynthOptions {
  std::size_t frames = 20;
  Motion motion = Motion::linear;
  std::size_t width = 400;
  std::size_t height = 300;
  double target_size = 56.0;
  std::uint64_t seed = 7;
};

// Target color constants; the background is gray (R = G = B).
inline constexpr float kTargetRed = 230.0f / 255.0f;
inline constexpr float kTargetBlue = 26.0f / 255.0f;

struct SynthSequence {
  std::vector<Image> frames;
  std::vector<Box> boxes;  // exact target placement, 0-based
};

// Square target with a green-channel texture over a gray structured background. Edges are
// area-weighted so sub-pixel positions are represented. Throws InputError when frames < 2
// or the target does not fit.
SynthSequence make_synth(const SynthOptions& opt);

// dir/img/00000001.png ... plus dir/groundtruth.txt.
void write_synth(const SynthSequence& seq, const std::filesystem::path& dir);

}  // namespace lightfc
