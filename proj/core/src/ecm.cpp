#include "lightfc/ecm.hpp"

#include <cmath>
#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

std::string_view to_string(ReuseMode mode) {
  switch (mode) {
    case ReuseMode::concat: return "concat";
    case ReuseMode::add: return "add";
    case ReuseMode::none: return "none";
  }
  return "?";
}

ReuseMode parse_reuse_mode(std::string_view name) {
  if (name == "concat") return ReuseMode::concat;
  if (name == "add") return ReuseMode::add;
  if (name == "none") return ReuseMode::none;
  throw InputError("unknown reuse mode '" + std::string(name) + "' (expected concat, add, none)");
}

double correlation_scale(std::size_t channels) {
  return 1.0 / std::sqrt(static_cast<double>(channels));
}

Tensor pixelwise_corr(const Tensor& z, const Tensor& x) {
  const Shape& zs = z.shape();
  const Shape& xs = x.shape();
  if (zs.c != xs.c) {
    throw ShapeError("pixelwise_corr: template has " + std::to_string(zs.c) +
                     " channels, search has " + std::to_string(xs.c));
  }
  if (zs.n != xs.n) throw ShapeError("pixelwise_corr: batch sizes differ");
  const std::size_t c = zs.c;
  const std::size_t kernels = zs.plane();
  const std::size_t pixels = xs.plane();
  const float s = static_cast<float>(correlation_scale(c));
  Tensor out({xs.n, kernels, xs.h, xs.w});
  for (std::size_t n = 0; n < xs.n; ++n) {
    const float* zp = z.plane(n, 0);
    const float* xp = x.plane(n, 0);
    float* op = out.plane(n, 0);
    for (std::size_t k = 0; k < kernels; ++k) {
      float* row = op + k * pixels;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const float zv = zp[ch * kernels + k] * s;
        const float* src = xp + ch * pixels;
        for (std::size_t p = 0; p < pixels; ++p) row[p] += zv * src[p];
      }
    }
  }
  check_finite(out, "pixelwise_corr");
  return out;
}

Tensor scf_forward(const Tensor& f, const RepUnit& scf, bool skip) {
  if (in_channels(scf) != f.shape().c || out_channels(scf) != f.shape().c) {
    throw ShapeError("scf: unit width does not match " + f.shape().str());
  }
  Tensor y = rep_forward(f, scf);
  return skip ? add(y, f) : y;
}

Tensor iab_forward(const Tensor& f, const Iab& iab, bool skip) {
  if (iab.expand.conv.in_channels() != f.shape().c ||
      iab.project.conv.out_channels() != f.shape().c) {
    throw ShapeError("iab: block width does not match " + f.shape().str());
  }
  Tensor y = cbr_forward(cbr_forward(f, iab.expand), iab.project);
  return skip ? add(y, f) : y;
}

std::size_t iab_hidden_channels(const EcmConfig& cfg, std::size_t channels) {
  const double width = cfg.iab_expansion * static_cast<double>(channels);
  const double rounded = std::round(width);
  if (!(cfg.iab_expansion > 0.0) || std::abs(width - rounded) > 1e-9 || rounded < 1.0) {
    throw ShapeError("iab: expansion " + std::to_string(cfg.iab_expansion) + " of " +
                     std::to_string(channels) + " channels is not a positive integer width");
  }
  return static_cast<std::size_t>(rounded);
}

void validate(const EcmConfig& cfg, std::size_t corr_channels, std::size_t search_channels) {
  if (cfg.reuse_mode == ReuseMode::add && (cfg.reuse_cls || cfg.reuse_box) &&
      corr_channels != search_channels) {
    throw ShapeError("ecm: add reuse needs equal widths, correlation has " +
                     std::to_string(corr_channels) + " channels and search features " +
                     std::to_string(search_channels));
  }
  if (cfg.use_iab) iab_hidden_channels(cfg, corr_channels);
  if (cfg.se_ratio == 0 || corr_channels % cfg.se_ratio != 0) {
    throw ShapeError("ecm: se ratio " + std::to_string(cfg.se_ratio) + " does not divide " +
                     std::to_string(corr_channels));
  }
}

std::size_t ecm_output_channels(const EcmConfig& cfg, std::size_t corr_channels,
                                std::size_t search_channels, bool cls) {
  const bool reuse = cls ? cfg.reuse_cls : cfg.reuse_box;
  if (reuse && cfg.reuse_mode == ReuseMode::concat) return corr_channels + search_channels;
  return corr_channels;
}

EcmOutput ecm_forward(const Tensor& z_feat, const Tensor& x_feat, const EcmParams& params,
                      const EcmConfig& cfg) {
  Tensor f = se_forward(pixelwise_corr(z_feat, x_feat), params.se);
  if (cfg.use_scf) {
    if (!params.scf) throw ShapeError("ecm: config enables SCF but parameters have none");
    f = scf_forward(f, *params.scf, cfg.scf_skip);
  }
  if (cfg.use_iab) {
    if (!params.iab) throw ShapeError("ecm: config enables IAB but parameters have none");
    f = iab_forward(f, *params.iab, cfg.iab_skip);
  }
  auto reuse = [&](bool enabled) -> Tensor {
    if (!enabled) return f;
    switch (cfg.reuse_mode) {
      case ReuseMode::concat: return concat_channels(f, x_feat);
      case ReuseMode::add: return add(f, x_feat);
      case ReuseMode::none: return f;
    }
    return f;
  };
  return {reuse(cfg.reuse_cls), reuse(cfg.reuse_box)};
}

EcmParams make_ecm(Rng& rng, const EcmConfig& cfg, std::size_t corr_channels,
                   std::size_t search_channels, const InitOptions& opt) {
  validate(cfg, corr_channels, search_channels);
  EcmParams p;
  p.se = make_se(rng, corr_channels, cfg.se_ratio, opt);
  if (cfg.use_scf) p.scf = make_scf(rng, corr_channels, opt);
  if (cfg.use_iab) {
    const std::size_t hidden = iab_hidden_channels(cfg, corr_channels);
    p.iab = Iab{make_cbr(rng, corr_channels, hidden, 1, 1, 1, Activation::relu, opt),
                make_cbr(rng, hidden, corr_channels, 1, 1, 1, Activation::none, opt)};
  }
  return p;
}

}  // namespace lightfc
