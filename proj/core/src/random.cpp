#include "lightfc/random.hpp"

#include <cmath>
#include <numbers>

namespace lightfc {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

Conv2dParams make_conv(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel,
                       std::size_t stride, std::size_t groups, const InitOptions& opt) {
  Conv2dParams p;
  p.weight = Tensor({c_out, c_in / groups, kernel, kernel});
  const double fan_in = static_cast<double>((c_in / groups) * kernel * kernel);
  const double std_dev = std::sqrt(2.0 / fan_in);
  for (float& v : p.weight.data()) v = static_cast<float>(rng.normal() * std_dev);
  p.bias.resize(c_out);
  for (float& b : p.bias) b = static_cast<float>(rng.uniform(-1.0, 1.0) * opt.shift_scale);
  p.stride = stride;
  p.padding = (kernel - 1) / 2;
  p.groups = groups;
  return p;
}

BatchNormParams make_bn(Rng& rng, std::size_t channels, const InitOptions& opt) {
  BatchNormParams bn;
  bn.gamma.resize(channels);
  bn.beta.resize(channels);
  bn.running_mean.resize(channels);
  bn.running_var.resize(channels);
  bn.epsilon = 1e-5f;
  for (std::size_t c = 0; c < channels; ++c) {
    bn.gamma[c] = opt.random_bn ? static_cast<float>(rng.uniform(0.5, 1.5)) : 1.0f;
    bn.running_var[c] = opt.random_bn ? static_cast<float>(rng.uniform(0.5, 1.5)) : 1.0f;
    bn.beta[c] = static_cast<float>(rng.uniform(-1.0, 1.0) * opt.shift_scale);
    bn.running_mean[c] = static_cast<float>(rng.uniform(-1.0, 1.0) * opt.shift_scale);
  }
  return bn;
}

Tensor random_tensor(Rng& rng, Shape shape, double lo, double hi) {
  Tensor t(shape);
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

}  // namespace lightfc
