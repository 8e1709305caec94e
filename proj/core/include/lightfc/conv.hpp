#pragma once

#include <cstddef>
#include <vector>

#include "lightfc/tensor.hpp"

namespace lightfc {

struct Conv2dParams {
  Tensor weight;                // (c_out, c_in / groups, k, k)
  std::vector<float> bias;      // empty or c_out
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t groups = 1;

  std::size_t out_channels() const { return weight.shape().n; }
  std::size_t in_channels() const { return weight.shape().c * groups; }
  std::size_t kernel() const { return weight.shape().h; }
  bool has_bias() const { return !bias.empty(); }

  // Throws ShapeError unless the weight layout, groups and kernel size agree.
  void validate() const;
};

struct BatchNormParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> running_mean;
  std::vector<float> running_var;
  float epsilon = 1e-5f;

  std::size_t channels() const { return gamma.size(); }
  void validate() const;

  static BatchNormParams identity(std::size_t channels);
};

// Output spatial size of a convolution, or throws ShapeError when no kernel placement fits.
std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding);

Tensor conv2d(const Tensor& x, const Conv2dParams& p);

// Six nested loops, no blocking or reuse. Reference for conv2d.
Tensor conv2d_oracle(const Tensor& x, const Conv2dParams& p);

Tensor batchnorm_infer(const Tensor& x, const BatchNormParams& p);

}  // namespace lightfc
