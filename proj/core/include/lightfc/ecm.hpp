#pragma once

#include <optional>
#include <string_view>

#include "lightfc/blocks.hpp"
#include "lightfc/reparam.hpp"

namespace lightfc {

enum class ReuseMode { concat, add, none };

std::string_view to_string(ReuseMode mode);
ReuseMode parse_reuse_mode(std::string_view name);

struct EcmConfig {
  bool use_scf = true;
  bool use_iab = true;
  bool scf_skip = true;
  bool iab_skip = true;
  ReuseMode reuse_mode = ReuseMode::concat;
  bool reuse_cls = true;
  bool reuse_box = true;
  double iab_expansion = 4.0;
  std::size_t se_ratio = 4;

  bool operator==(const EcmConfig&) const = default;
};

// Inverted activation block: 1x1 expand Conv-BN, ReLU, 1x1 project Conv-BN.
struct Iab {
  CbrBlock expand;   // activation relu
  CbrBlock project;  // activation none
};

struct EcmParams {
  SeBlock se;
  std::optional<RepUnit> scf;
  std::optional<Iab> iab;
};

struct EcmOutput {
  Tensor cls_in;
  Tensor box_in;
};

// Scale applied to every correlation value: 1 / sqrt(channels).
double correlation_scale(std::size_t channels);

// z (1, C, Hz, Wz), x (1, C, Hx, Wx) -> (1, Hz*Wz, Hx, Wx); channel i*Wz + j holds the
// response of template cell (i, j).
Tensor pixelwise_corr(const Tensor& z, const Tensor& x);

Tensor scf_forward(const Tensor& f, const RepUnit& scf, bool skip);
Tensor iab_forward(const Tensor& f, const Iab& iab, bool skip);
EcmOutput ecm_forward(const Tensor& z_feat, const Tensor& x_feat, const EcmParams& params,
                      const EcmConfig& cfg);

// Width of the tensor handed to the classification (cls = true) or box branch.
std::size_t ecm_output_channels(const EcmConfig& cfg, std::size_t corr_channels,
                                std::size_t search_channels, bool cls);

// Throws ShapeError for an add-reuse config whose widths differ, or a non-integer IAB width.
void validate(const EcmConfig& cfg, std::size_t corr_channels, std::size_t search_channels);

std::size_t iab_hidden_channels(const EcmConfig& cfg, std::size_t channels);

EcmParams make_ecm(Rng& rng, const EcmConfig& cfg, std::size_t corr_channels,
                   std::size_t search_channels, const InitOptions& opt = {});

}  // namespace lightfc
