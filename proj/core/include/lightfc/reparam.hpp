#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "lightfc/conv.hpp"
#include "lightfc/random.hpp"

namespace lightfc {

// One linear Conv-BN branch of a train-form block. Stride 1, padding (k - 1) / 2.
struct RepBranch {
  Conv2dParams conv;
  BatchNormParams bn;

  std::size_t kernel() const { return conv.kernel(); }
};

// Parallel branches summed elementwise.
struct RepBranchSpec {
  std::vector<RepBranch> branches;

  std::size_t in_channels() const { return branches.front().conv.in_channels(); }
  std::size_t out_channels() const { return branches.front().conv.out_channels(); }
  void validate() const;
};

// Deploy form: a single 3x3 kernel with bias.
struct FusedConv {
  Conv2dParams conv;

  std::size_t in_channels() const { return conv.in_channels(); }
  std::size_t out_channels() const { return conv.out_channels(); }
};

// A reparameterizable slot of the network, in either form.
using RepUnit = std::variant<RepBranchSpec, FusedConv>;

enum class RepKind { conv33, repn33, repn31 };

std::string_view to_string(RepKind kind);
RepKind parse_rep_kind(std::string_view name);

Conv2dParams fold_conv_bn(const Conv2dParams& conv, const BatchNormParams& bn);
Conv2dParams pad_1x1_to_3x3(const Conv2dParams& conv);
FusedConv fuse_branches(const RepBranchSpec& spec);
// Train-form units are fused, deploy-form units are returned as they are.
RepUnit fuse(const RepUnit& unit);
bool is_fused(const RepUnit& unit);

// Single branch with a pass-through BN; fusing it reproduces `fused` exactly.
RepBranchSpec as_spec(const FusedConv& fused);

Tensor rep_forward(const Tensor& x, const RepBranchSpec& spec);
Tensor rep_forward(const Tensor& x, const FusedConv& fused);
Tensor rep_forward(const Tensor& x, const RepUnit& unit);

std::size_t in_channels(const RepUnit& unit);
std::size_t out_channels(const RepUnit& unit);

// Trainable parameters: weights, biases, BN gamma and beta.
std::size_t param_count(const RepBranchSpec& spec);
std::size_t param_count(const FusedConv& fused);
std::size_t param_count(const RepUnit& unit);

RepBranchSpec make_scf(Rng& rng, std::size_t channels, const InitOptions& opt = {});
RepBranchSpec make_repn33(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt = {});
RepBranchSpec make_repn31(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt = {});
RepBranchSpec make_conv33(Rng& rng, std::size_t c_in, std::size_t c_out,
                          const InitOptions& opt = {});
RepBranchSpec make_rep(RepKind kind, Rng& rng, std::size_t c_in, std::size_t c_out,
                       const InitOptions& opt = {});

}  // namespace lightfc
