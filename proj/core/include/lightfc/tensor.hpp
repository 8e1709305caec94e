#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lightfc {

struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t numel() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense float32 array in row-major (n, c, h, w) order.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  const Shape& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float>& values() const { return data_; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  float& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[index(n, c, h, w)];
  }
  float at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[index(n, c, h, w)];
  }

  // Contiguous h*w plane of one (n, c) slice.
  float* plane(std::size_t n, std::size_t c) { return data_.data() + index(n, c, 0, 0); }
  const float* plane(std::size_t n, std::size_t c) const {
    return data_.data() + index(n, c, 0, 0);
  }

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Throws NumericError naming `what` if any value is NaN or Inf.
void check_finite(const Tensor& t, const char* what);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor global_avg_pool(const Tensor& x);
Tensor add(const Tensor& x, const Tensor& y);
Tensor scale(const Tensor& x, float factor);
// x's channels first, then y's.
Tensor concat_channels(const Tensor& x, const Tensor& y);
Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t count);
// Multiplies every (n, c) plane of x by gate(n, c, 0, 0).
Tensor mul_channels(const Tensor& x, const Tensor& gate);

double max_abs_diff(const Tensor& a, const Tensor& b);
// ||a - b||_F / max(||b||_F, tiny)
double relative_frobenius(const Tensor& a, const Tensor& b);

}  // namespace lightfc
