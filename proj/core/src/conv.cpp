#include "lightfc/conv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

void Conv2dParams::validate() const {
  const Shape& s = weight.shape();
  if (s.numel() == 0) throw ShapeError("conv: empty weight");
  if (s.h != s.w) throw ShapeError("conv: kernel must be square, got " + s.str());
  if (s.h % 2 == 0) throw ShapeError("conv: even kernel size " + std::to_string(s.h));
  if (stride == 0) throw ShapeError("conv: stride must be positive");
  if (groups == 0) throw ShapeError("conv: groups must be positive");
  if (s.n % groups != 0) {
    throw ShapeError("conv: groups " + std::to_string(groups) + " do not divide c_out " +
                     std::to_string(s.n));
  }
  if (!bias.empty() && bias.size() != s.n) {
    throw ShapeError("conv: bias length " + std::to_string(bias.size()) + " != c_out " +
                     std::to_string(s.n));
  }
}

void BatchNormParams::validate() const {
  const std::size_t c = gamma.size();
  if (beta.size() != c || running_mean.size() != c || running_var.size() != c) {
    throw ShapeError("batchnorm: parameter vectors have different lengths");
  }
  if (!(epsilon >= 0.0f)) throw ShapeError("batchnorm: epsilon must be non-negative");
  for (std::size_t i = 0; i < c; ++i) {
    if (running_var[i] < 0.0f || !(running_var[i] + epsilon > 0.0f)) {
      throw ShapeError("batchnorm: running_var + epsilon must be positive");
    }
  }
}

BatchNormParams BatchNormParams::identity(std::size_t channels) {
  BatchNormParams bn;
  bn.gamma.assign(channels, 1.0f);
  bn.beta.assign(channels, 0.0f);
  bn.running_mean.assign(channels, 0.0f);
  bn.running_var.assign(channels, 1.0f);
  bn.epsilon = 0.0f;
  return bn;
}

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding) {
  if (in + 2 * padding < kernel) {
    throw ShapeError("conv: input extent " + std::to_string(in) + " with padding " +
                     std::to_string(padding) + " is smaller than kernel " +
                     std::to_string(kernel));
  }
  return (in + 2 * padding - kernel) / stride + 1;
}

namespace {

struct Geometry {
  std::size_t c_in, c_out, k, stride, pad, groups;
  std::size_t h, w, ho, wo;
};

Geometry check_conv(const Tensor& x, const Conv2dParams& p) {
  p.validate();
  const Shape& s = x.shape();
  if (s.c != p.in_channels()) {
    throw ShapeError("conv: input has " + std::to_string(s.c) + " channels, kernel expects " +
                     std::to_string(p.in_channels()));
  }
  Geometry g{p.in_channels(), p.out_channels(), p.kernel(), p.stride, p.padding, p.groups,
             s.h, s.w, 0, 0};
  g.ho = conv_output_size(s.h, g.k, g.stride, g.pad);
  g.wo = conv_output_size(s.w, g.k, g.stride, g.pad);
  return g;
}

// Valid output range [lo, hi) along one axis for kernel tap `tap`.
void tap_range(std::size_t out, std::size_t in, std::size_t stride, std::size_t pad,
               std::size_t tap, std::size_t& lo, std::size_t& hi) {
  // input index = o * stride + tap - pad must lie in [0, in)
  lo = 0;
  if (tap < pad) lo = (pad - tap + stride - 1) / stride;
  if (in + pad <= tap) {
    hi = 0;
  } else {
    hi = std::min(out, (in + pad - tap - 1) / stride + 1);
  }
  if (hi < lo) hi = lo;
}

// One output plane per channel, one input plane per channel.
void depthwise(const float* in, float* out, const float* kernel, float bias, const Geometry& g) {
  std::fill_n(out, g.ho * g.wo, bias);
  for (std::size_t ky = 0; ky < g.k; ++ky) {
    std::size_t oy0, oy1;
    tap_range(g.ho, g.h, g.stride, g.pad, ky, oy0, oy1);
    for (std::size_t kx = 0; kx < g.k; ++kx) {
      std::size_t ox0, ox1;
      tap_range(g.wo, g.w, g.stride, g.pad, kx, ox0, ox1);
      const float wv = kernel[ky * g.k + kx];
      for (std::size_t oy = oy0; oy < oy1; ++oy) {
        const float* src = in + (oy * g.stride + ky - g.pad) * g.w;
        float* dst = out + oy * g.wo;
        if (g.stride == 1) {
          for (std::size_t ox = ox0; ox < ox1; ++ox) dst[ox] += wv * src[ox + kx - g.pad];
        } else {
          for (std::size_t ox = ox0; ox < ox1; ++ox) {
            dst[ox] += wv * src[ox * g.stride + kx - g.pad];
          }
        }
      }
    }
  }
}

// Rows of `col` are (ic, ky, kx) taps, columns are output pixels.
void im2col(const float* in, std::size_t c_in, const Geometry& g, float* col) {
  const std::size_t n_out = g.ho * g.wo;
  for (std::size_t ic = 0; ic < c_in; ++ic) {
    const float* plane = in + ic * g.h * g.w;
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      std::size_t oy0, oy1;
      tap_range(g.ho, g.h, g.stride, g.pad, ky, oy0, oy1);
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        std::size_t ox0, ox1;
        tap_range(g.wo, g.w, g.stride, g.pad, kx, ox0, ox1);
        float* row = col + ((ic * g.k + ky) * g.k + kx) * n_out;
        std::fill_n(row, n_out, 0.0f);
        for (std::size_t oy = oy0; oy < oy1; ++oy) {
          const float* src = plane + (oy * g.stride + ky - g.pad) * g.w;
          float* dst = row + oy * g.wo;
          for (std::size_t ox = ox0; ox < ox1; ++ox) dst[ox] = src[ox * g.stride + kx - g.pad];
        }
      }
    }
  }
}

// out[m][p] = bias[m] + sum_k a[m][k] * b[k][p]; four output rows share each pass over b.
void gemm_bias(const float* a, const float* b, const float* bias, float* out, std::size_t m,
               std::size_t k, std::size_t n) {
  constexpr std::size_t kTile = 512;
  for (std::size_t p0 = 0; p0 < n; p0 += kTile) {
    const std::size_t len = std::min(kTile, n - p0);
    std::size_t r = 0;
    for (; r + 4 <= m; r += 4) {
      float* o0 = out + (r + 0) * n + p0;
      float* o1 = out + (r + 1) * n + p0;
      float* o2 = out + (r + 2) * n + p0;
      float* o3 = out + (r + 3) * n + p0;
      std::fill_n(o0, len, bias ? bias[r + 0] : 0.0f);
      std::fill_n(o1, len, bias ? bias[r + 1] : 0.0f);
      std::fill_n(o2, len, bias ? bias[r + 2] : 0.0f);
      std::fill_n(o3, len, bias ? bias[r + 3] : 0.0f);
      for (std::size_t q = 0; q < k; ++q) {
        const float w0 = a[(r + 0) * k + q];
        const float w1 = a[(r + 1) * k + q];
        const float w2 = a[(r + 2) * k + q];
        const float w3 = a[(r + 3) * k + q];
        const float* src = b + q * n + p0;
        for (std::size_t i = 0; i < len; ++i) {
          const float v = src[i];
          o0[i] += w0 * v;
          o1[i] += w1 * v;
          o2[i] += w2 * v;
          o3[i] += w3 * v;
        }
      }
    }
    for (; r < m; ++r) {
      float* o = out + r * n + p0;
      std::fill_n(o, len, bias ? bias[r] : 0.0f);
      for (std::size_t q = 0; q < k; ++q) {
        const float wv = a[r * k + q];
        const float* src = b + q * n + p0;
        for (std::size_t i = 0; i < len; ++i) o[i] += wv * src[i];
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Conv2dParams& p) {
  const Geometry g = check_conv(x, p);
  const std::size_t batch = x.shape().n;
  Tensor y({batch, g.c_out, g.ho, g.wo});
  const std::size_t cin_g = g.c_in / g.groups;
  const std::size_t cout_g = g.c_out / g.groups;
  const std::size_t taps = cin_g * g.k * g.k;
  const std::size_t n_out = g.ho * g.wo;
  const float* weight = p.weight.data().data();
  const float* bias = p.has_bias() ? p.bias.data() : nullptr;

  const bool is_depthwise = cin_g == 1 && cout_g == 1;
  const bool is_pointwise = g.k == 1 && g.stride == 1 && g.pad == 0;
  std::vector<float> col;
  if (!is_depthwise && !is_pointwise) col.resize(taps * n_out);

  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t grp = 0; grp < g.groups; ++grp) {
      const float* in = x.plane(n, grp * cin_g);
      float* out = y.plane(n, grp * cout_g);
      const float* wg = weight + grp * cout_g * taps;
      const float* bg = bias ? bias + grp * cout_g : nullptr;
      if (is_depthwise) {
        depthwise(in, out, wg, bg ? bg[0] : 0.0f, g);
      } else if (is_pointwise) {
        gemm_bias(wg, in, bg, out, cout_g, taps, n_out);
      } else {
        im2col(in, cin_g, g, col.data());
        gemm_bias(wg, col.data(), bg, out, cout_g, taps, n_out);
      }
    }
  }
  check_finite(y, "conv2d");
  return y;
}

Tensor batchnorm_infer(const Tensor& x, const BatchNormParams& p) {
  p.validate();
  const Shape& s = x.shape();
  if (s.c != p.channels()) {
    throw ShapeError("batchnorm: input has " + std::to_string(s.c) + " channels, params have " +
                     std::to_string(p.channels()));
  }
  Tensor y = x;
  const std::size_t hw = s.plane();
  for (std::size_t c = 0; c < s.c; ++c) {
    const float k = p.gamma[c] / std::sqrt(p.running_var[c] + p.epsilon);
    const float m = p.running_mean[c];
    const float b = p.beta[c];
    for (std::size_t n = 0; n < s.n; ++n) {
      float* v = y.plane(n, c);
      for (std::size_t i = 0; i < hw; ++i) v[i] = (v[i] - m) * k + b;
    }
  }
  check_finite(y, "batchnorm");
  return y;
}

}  // namespace lightfc
