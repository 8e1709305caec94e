#pragma once

#include <cstdint>
#include <random>

#include "lightfc/conv.hpp"

namespace lightfc {

// Seeded generator with portable uniform/normal draws (std distributions differ across
// standard libraries, the weights they produce must not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// How freshly initialized parameters look.
struct InitOptions {
  // Spread of conv biases, BN shifts and running means; 0 zeroes them.
  double shift_scale = 0.1;
  // Draw BN gamma/var away from identity so folding is exercised.
  bool random_bn = true;
  // Models only: set BN running statistics from one forward pass on seeded random input.
  bool calibrate = true;
};

// He (fan-in) normal weights.
Conv2dParams make_conv(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel,
                       std::size_t stride = 1, std::size_t groups = 1,
                       const InitOptions& opt = {});
BatchNormParams make_bn(Rng& rng, std::size_t channels, const InitOptions& opt = {});

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0);

}  // namespace lightfc
