#pragma once

#include <array>
#include <optional>

#include "lightfc/blocks.hpp"
#include "lightfc/box.hpp"
#include "lightfc/reparam.hpp"

namespace lightfc {

struct HeadConfig {
  RepKind stage1 = RepKind::repn33;
  RepKind stage2 = RepKind::conv33;
  bool use_se = true;
  std::size_t width = 128;
  std::size_t se_ratio = 4;

  bool operator==(const HeadConfig&) const = default;
};

// Stage 1 (c_in -> C) and three stage-2 blocks (C -> C/2 -> C/4 -> C/8) are rep units
// followed by ReLU; the fifth block is a plain 3x3 projection to out_ch.
struct HeadBranch {
  RepUnit stage1;
  std::optional<SeBlock> se;
  std::array<RepUnit, 3> stage2;
  Conv2dParams output;
};

struct Head {
  HeadBranch cls;     // 1 channel: response logits
  HeadBranch offset;  // 2 channels: x, y
  HeadBranch size;    // 2 channels: w, h
};

struct HeadOutput {
  Tensor response;  // (1, 1, Hs, Ws) logits
  Tensor offset;    // (1, 2, Hs, Ws) cell fractions in [0, 1)
  Tensor size;      // (1, 2, Hs, Ws) fractions of the search side in (0, 1]
};

struct Decoded {
  Box box;  // normalized search coordinates
  double score = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

Tensor branch_forward(const Tensor& f, const HeadBranch& branch);
// Offset and size pass through a sigmoid; the response stays as logits.
HeadOutput head_forward(const Tensor& cls_in, const Tensor& box_in, const Head& head);

// Argmax over sigmoid(response) * window (ones when absent), lowest flat index on ties.
Decoded decode_box(const HeadOutput& out, const Tensor* window = nullptr);
// Same decoding over an already final score map (1, 1, Hs, Ws).
Decoded decode_scores(const Tensor& scores, const Tensor& offset, const Tensor& size);

std::size_t argmax_index(const Tensor& scores);

HeadBranch make_branch(Rng& rng, const HeadConfig& cfg, std::size_t c_in, std::size_t out_ch,
                       const InitOptions& opt = {});
Head make_head(Rng& rng, const HeadConfig& cfg, std::size_t cls_in, std::size_t box_in,
               const InitOptions& opt = {});

HeadBranch fuse(const HeadBranch& branch);
Head fuse(const Head& head);

// Throws ShapeError unless width is divisible down to C/8 and by the SE ratio.
void validate(const HeadConfig& cfg);

}  // namespace lightfc
