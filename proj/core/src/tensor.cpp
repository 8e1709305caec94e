#include "lightfc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lightfc/error.hpp"

namespace lightfc {

std::string Shape::str() const {
  std::ostringstream os;
  os << '(' << n << ',' << c << ',' << h << ',' << w << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, float fill) : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> values)
    : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.numel()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_.str());
  }
}

void check_finite(const Tensor& t, const char* what) {
  for (float v : t.data()) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(what) + ": non-finite value in output " +
                         t.shape().str());
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (float& v : y.data()) v = v > 0.0f ? v : 0.0f;
  return y;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y = x;
  for (float& v : y.data()) v = 1.0f / (1.0f + std::exp(-v));
  return y;
}

Tensor global_avg_pool(const Tensor& x) {
  const Shape& s = x.shape();
  Tensor y({s.n, s.c, 1, 1});
  const std::size_t hw = s.plane();
  if (hw == 0) throw ShapeError("global_avg_pool: empty spatial extent");
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const float* p = x.plane(n, c);
      double acc = 0.0;
      for (std::size_t i = 0; i < hw; ++i) acc += p[i];
      y.at(n, c, 0, 0) = static_cast<float>(acc / static_cast<double>(hw));
    }
  }
  return y;
}

Tensor add(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape()) {
    throw ShapeError("add: shapes " + x.shape().str() + " and " + y.shape().str() + " differ");
  }
  Tensor out = x;
  auto o = out.data();
  auto b = y.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += b[i];
  check_finite(out, "add");
  return out;
}

Tensor scale(const Tensor& x, float factor) {
  Tensor out = x;
  for (float& v : out.data()) v *= factor;
  return out;
}

Tensor concat_channels(const Tensor& x, const Tensor& y) {
  const Shape& a = x.shape();
  const Shape& b = y.shape();
  if (a.n != b.n || a.h != b.h || a.w != b.w) {
    throw ShapeError("concat_channels: " + a.str() + " and " + b.str() + " disagree on n,h,w");
  }
  Tensor out({a.n, a.c + b.c, a.h, a.w});
  const std::size_t hw = a.plane();
  for (std::size_t n = 0; n < a.n; ++n) {
    if (a.c > 0) std::copy_n(x.plane(n, 0), a.c * hw, out.plane(n, 0));
    if (b.c > 0) std::copy_n(y.plane(n, 0), b.c * hw, out.plane(n, a.c));
  }
  return out;
}

Tensor slice_channels(const Tensor& x, std::size_t begin, std::size_t count) {
  const Shape& s = x.shape();
  if (begin + count > s.c) {
    throw ShapeError("slice_channels: range exceeds " + std::to_string(s.c) + " channels");
  }
  Tensor out({s.n, count, s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n) {
    if (count > 0) std::copy_n(x.plane(n, begin), count * s.plane(), out.plane(n, 0));
  }
  return out;
}

Tensor mul_channels(const Tensor& x, const Tensor& gate) {
  const Shape& s = x.shape();
  const Shape& g = gate.shape();
  if (g.n != s.n || g.c != s.c || g.h != 1 || g.w != 1) {
    throw ShapeError("mul_channels: gate " + g.str() + " does not match " + s.str());
  }
  Tensor out = x;
  const std::size_t hw = s.plane();
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const float k = gate.at(n, c, 0, 0);
      float* p = out.plane(n, c);
      for (std::size_t i = 0; i < hw; ++i) p[i] *= k;
    }
  }
  return out;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("max_abs_diff: shapes " + a.shape().str() + " and " + b.shape().str());
  }
  double m = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i])));
  }
  return m;
}

double relative_frobenius(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("relative_frobenius: shapes differ");
  }
  double num = 0.0;
  double den = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    num += d * d;
    den += static_cast<double>(y[i]) * static_cast<double>(y[i]);
  }
  return std::sqrt(num) / std::max(std::sqrt(den), std::numeric_limits<double>::min());
}

}  // namespace lightfc
