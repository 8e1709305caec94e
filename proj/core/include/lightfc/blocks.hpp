#pragma once

#include <optional>
#include <vector>

#include "lightfc/conv.hpp"
#include "lightfc/random.hpp"

namespace lightfc {

enum class Activation { relu, none };

// Conv-BN-ReLU, or Conv-BN when activation is none.
struct CbrBlock {
  Conv2dParams conv;
  BatchNormParams bn;
  Activation activation = Activation::relu;

  void validate() const;
};

struct SeBlock {
  Conv2dParams reduce;  // 1x1, c -> c / ratio
  Conv2dParams expand;  // 1x1, c / ratio -> c
  std::size_t ratio = 4;

  std::size_t channels() const { return expand.out_channels(); }
};

struct InvertedResidual {
  std::optional<CbrBlock> expand;  // absent when the expansion factor is 1
  CbrBlock depthwise;
  CbrBlock project;  // activation none
  bool use_skip = false;

  std::size_t in_channels() const;
  std::size_t out_channels() const { return project.conv.out_channels(); }
  std::size_t stride() const { return depthwise.conv.stride; }
};

Tensor cbr_forward(const Tensor& x, const CbrBlock& b);
Tensor se_forward(const Tensor& x, const SeBlock& s);
// The per-channel gate in (0, 1), shape (n, c, 1, 1).
Tensor se_gate(const Tensor& x, const SeBlock& s);
Tensor inverted_residual_forward(const Tensor& x, const InvertedResidual& b);

CbrBlock make_cbr(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel,
                  std::size_t stride = 1, std::size_t groups = 1,
                  Activation act = Activation::relu, const InitOptions& opt = {});
// Throws ShapeError when ratio does not divide channels.
SeBlock make_se(Rng& rng, std::size_t channels, std::size_t ratio, const InitOptions& opt = {});
InvertedResidual make_inverted_residual(Rng& rng, std::size_t c_in, std::size_t c_out,
                                        std::size_t stride, std::size_t expansion,
                                        const InitOptions& opt = {});

}  // namespace lightfc
