#include "lightfc/reparam.hpp"

#include <cmath>
#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

std::string_view to_string(RepKind kind) {
  switch (kind) {
    case RepKind::conv33: return "conv33";
    case RepKind::repn33: return "repn33";
    case RepKind::repn31: return "repn31";
  }
  return "?";
}

RepKind parse_rep_kind(std::string_view name) {
  if (name == "conv33") return RepKind::conv33;
  if (name == "repn33") return RepKind::repn33;
  if (name == "repn31") return RepKind::repn31;
  throw InputError("unknown rep block kind '" + std::string(name) +
                   "' (expected conv33, repn33 or repn31)");
}

void RepBranchSpec::validate() const {
  if (branches.empty()) throw ShapeError("rep block: no branches");
  const std::size_t ci = in_channels();
  const std::size_t co = out_channels();
  for (const RepBranch& b : branches) {
    b.conv.validate();
    b.bn.validate();
    const std::size_t k = b.kernel();
    if (k != 1 && k != 3) throw ShapeError("rep block: only 1x1 and 3x3 branches are supported");
    if (b.conv.in_channels() != ci || b.conv.out_channels() != co) {
      throw ShapeError("rep block: branches disagree on channel counts");
    }
    if (b.conv.groups != 1 || b.conv.stride != 1 || b.conv.padding != (k - 1) / 2) {
      throw ShapeError("rep block: branches must be dense, stride 1, same-padded");
    }
    if (b.bn.channels() != co) throw ShapeError("rep block: bn width differs from conv output");
  }
}

Conv2dParams fold_conv_bn(const Conv2dParams& conv, const BatchNormParams& bn) {
  conv.validate();
  bn.validate();
  const std::size_t co = conv.out_channels();
  if (bn.channels() != co) {
    throw ShapeError("fold_conv_bn: conv has " + std::to_string(co) + " outputs, bn has " +
                     std::to_string(bn.channels()));
  }
  Conv2dParams out = conv;
  out.bias.assign(co, 0.0f);
  const std::size_t per_out = conv.weight.numel() / co;
  auto w = out.weight.data();
  for (std::size_t o = 0; o < co; ++o) {
    const float k = bn.gamma[o] / std::sqrt(bn.running_var[o] + bn.epsilon);
    for (std::size_t i = 0; i < per_out; ++i) w[o * per_out + i] *= k;
    const float b = conv.has_bias() ? conv.bias[o] : 0.0f;
    out.bias[o] = bn.beta[o] + (b - bn.running_mean[o]) * k;
  }
  return out;
}

Conv2dParams pad_1x1_to_3x3(const Conv2dParams& conv) {
  conv.validate();
  if (conv.kernel() != 1) {
    throw ShapeError("pad_1x1_to_3x3: kernel is " + std::to_string(conv.kernel()) + "x" +
                     std::to_string(conv.kernel()));
  }
  const Shape& s = conv.weight.shape();
  Conv2dParams out = conv;
  out.weight = Tensor({s.n, s.c, 3, 3});
  for (std::size_t o = 0; o < s.n; ++o) {
    for (std::size_t i = 0; i < s.c; ++i) out.weight.at(o, i, 1, 1) = conv.weight.at(o, i, 0, 0);
  }
  out.padding = conv.padding + 1;
  return out;
}

FusedConv fuse_branches(const RepBranchSpec& spec) {
  spec.validate();
  FusedConv fused;
  fused.conv.weight = Tensor({spec.out_channels(), spec.in_channels(), 3, 3});
  fused.conv.bias.assign(spec.out_channels(), 0.0f);
  fused.conv.padding = 1;
  for (const RepBranch& b : spec.branches) {
    Conv2dParams folded = fold_conv_bn(b.conv, b.bn);
    if (folded.kernel() == 1) folded = pad_1x1_to_3x3(folded);
    auto dst = fused.conv.weight.data();
    auto src = folded.weight.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    for (std::size_t o = 0; o < fused.conv.bias.size(); ++o) fused.conv.bias[o] += folded.bias[o];
  }
  return fused;
}

RepUnit fuse(const RepUnit& unit) {
  if (const auto* spec = std::get_if<RepBranchSpec>(&unit)) return fuse_branches(*spec);
  return unit;
}

bool is_fused(const RepUnit& unit) { return std::holds_alternative<FusedConv>(unit); }

RepBranchSpec as_spec(const FusedConv& fused) {
  RepBranchSpec spec;
  spec.branches.push_back({fused.conv, BatchNormParams::identity(fused.out_channels())});
  return spec;
}

Tensor rep_forward(const Tensor& x, const RepBranchSpec& spec) {
  spec.validate();
  Tensor sum;
  for (const RepBranch& b : spec.branches) {
    Tensor y = batchnorm_infer(conv2d(x, b.conv), b.bn);
    sum = sum.empty() ? std::move(y) : add(sum, y);
  }
  return sum;
}

Tensor rep_forward(const Tensor& x, const FusedConv& fused) { return conv2d(x, fused.conv); }

Tensor rep_forward(const Tensor& x, const RepUnit& unit) {
  return std::visit([&](const auto& u) { return rep_forward(x, u); }, unit);
}

std::size_t in_channels(const RepUnit& unit) {
  return std::visit([](const auto& u) { return u.in_channels(); }, unit);
}

std::size_t out_channels(const RepUnit& unit) {
  return std::visit([](const auto& u) { return u.out_channels(); }, unit);
}

std::size_t param_count(const RepBranchSpec& spec) {
  std::size_t n = 0;
  for (const RepBranch& b : spec.branches) {
    n += b.conv.weight.numel() + b.conv.bias.size() + b.bn.gamma.size() + b.bn.beta.size();
  }
  return n;
}

std::size_t param_count(const FusedConv& fused) {
  return fused.conv.weight.numel() + fused.conv.bias.size();
}

std::size_t param_count(const RepUnit& unit) {
  return std::visit([](const auto& u) { return param_count(u); }, unit);
}

namespace {

RepBranch make_branch(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t k,
                      const InitOptions& opt) {
  return {make_conv(rng, c_in, c_out, k, 1, 1, opt), make_bn(rng, c_out, opt)};
}

}  // namespace

RepBranchSpec make_scf(Rng& rng, std::size_t channels, const InitOptions& opt) {
  return make_repn31(rng, channels, channels, opt);
}

RepBranchSpec make_repn33(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt) {
  RepBranchSpec spec;
  spec.branches.push_back(make_branch(rng, c_in, c_out, 3, opt));
  spec.branches.push_back(make_branch(rng, c_in, c_out, 3, opt));
  return spec;
}

RepBranchSpec make_repn31(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt) {
  RepBranchSpec spec;
  spec.branches.push_back(make_branch(rng, c_in, c_out, 3, opt));
  spec.branches.push_back(make_branch(rng, c_in, c_out, 1, opt));
  return spec;
}

RepBranchSpec make_conv33(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt) {
  RepBranchSpec spec;
  spec.branches.push_back(make_branch(rng, c_in, c_out, 3, opt));
  return spec;
}

RepBranchSpec make_rep(RepKind kind, Rng& rng, std::size_t c_in, std::size_t c_out,
                       const InitOptions& opt) {
  switch (kind) {
    case RepKind::conv33: return make_conv33(rng, c_in, c_out, opt);
    case RepKind::repn33: return make_repn33(rng, c_in, c_out, opt);
    case RepKind::repn31: return make_repn31(rng, c_in, c_out, opt);
  }
  throw InputError("unknown rep kind");
}

}  // namespace lightfc
