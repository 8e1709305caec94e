#include <cmath>
#include <string>

#include "lightfc/conv.hpp"
#include "lightfc/error.hpp"

namespace lightfc {

Tensor conv2d_oracle(const Tensor& x, const Conv2dParams& p) {
  const Shape& ws = p.weight.shape();
  const Shape& xs = x.shape();
  const long k = static_cast<long>(ws.h);
  const long groups = static_cast<long>(p.groups);
  const long stride = static_cast<long>(p.stride);
  const long pad = static_cast<long>(p.padding);
  if (ws.h != ws.w || ws.h % 2 == 0 || ws.numel() == 0) {
    throw ShapeError("conv oracle: kernel must be odd and square");
  }
  if (groups <= 0 || stride <= 0) throw ShapeError("conv oracle: bad stride/groups");
  const long c_out = static_cast<long>(ws.n);
  const long cin_g = static_cast<long>(ws.c);
  if (c_out % groups != 0) throw ShapeError("conv oracle: groups do not divide c_out");
  if (static_cast<long>(xs.c) != cin_g * groups) {
    throw ShapeError("conv oracle: channel mismatch");
  }
  if (!p.bias.empty() && static_cast<long>(p.bias.size()) != c_out) {
    throw ShapeError("conv oracle: bias length mismatch");
  }
  const long h = static_cast<long>(xs.h);
  const long w = static_cast<long>(xs.w);
  if (h + 2 * pad < k || w + 2 * pad < k) throw ShapeError("conv oracle: input too small");
  const long ho = (h + 2 * pad - k) / stride + 1;
  const long wo = (w + 2 * pad - k) / stride + 1;
  const long cout_g = c_out / groups;

  Tensor y({xs.n, static_cast<std::size_t>(c_out), static_cast<std::size_t>(ho),
            static_cast<std::size_t>(wo)});
  for (std::size_t n = 0; n < xs.n; ++n) {
    for (long oc = 0; oc < c_out; ++oc) {
      const long grp = oc / cout_g;
      for (long oy = 0; oy < ho; ++oy) {
        for (long ox = 0; ox < wo; ++ox) {
          float acc = 0.0f;
          for (long ic = 0; ic < cin_g; ++ic) {
            for (long ky = 0; ky < k; ++ky) {
              for (long kx = 0; kx < k; ++kx) {
                const long iy = oy * stride + ky - pad;
                const long ix = ox * stride + kx - pad;
                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                acc += p.weight.at(oc, ic, ky, kx) * x.at(n, grp * cin_g + ic, iy, ix);
              }
            }
          }
          if (!p.bias.empty()) acc += p.bias[oc];
          if (!std::isfinite(acc)) throw NumericError("conv oracle: non-finite output");
          y.at(n, oc, oy, ox) = acc;
        }
      }
    }
  }
  return y;
}

}  // namespace lightfc
