#include "lightfc/rigged.hpp"

#include <algorithm>
#include <cmath>

#include "lightfc/error.hpp"
#include "lightfc/synth.hpp"

namespace lightfc {

Tensor ChromaOraclePredictor::encode_template(const Tensor& patch) const {
  if (patch.shape().c != 3) throw ShapeError("rigged: template patch must have 3 channels");
  return Tensor({1, 1, 1, 1});
}

HeadOutput ChromaOraclePredictor::predict(const Tensor& /*template_features*/,
                                          const Tensor& search_patch) const {
  const Shape& s = search_patch.shape();
  if (s.n != 1 || s.c != 3 || s.h != s.w || s.h == 0) {
    throw ShapeError("rigged: search patch must be (1, 3, S, S), got " + s.str());
  }
  const std::size_t n = s.h;
  const std::size_t cells = cfg_.search_feature();
  const float contrast = kTargetRed - kTargetBlue;

  // Membership in [0, 1]; the ramp is symmetric about 0.5 so anti-aliased edges keep their
  // area.
  std::vector<double> col(n, 0.0);
  std::vector<double> row(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      const float r = search_patch.at(0, 0, v, u) * cfg_.norm_std[0] + cfg_.norm_mean[0];
      const float b = search_patch.at(0, 2, v, u) * cfg_.norm_std[2] + cfg_.norm_mean[2];
      const double m = (r - b) / contrast;
      const double a = std::clamp((m - 0.25) / 0.5, 0.0, 1.0);
      col[u] += a;
      row[v] += a;
    }
  }

  HeadOutput out;
  out.response = Tensor({1, 1, cells, cells});
  out.offset = Tensor({1, 2, cells, cells});
  out.size = Tensor({1, 2, cells, cells});
  for (float& v : out.response.data()) v = -kLogit;

  auto moments = [n](const std::vector<double>& p, double& center, double& extent) {
    double mass = 0.0, first = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass += p[i];
      first += (static_cast<double>(i) + 0.5) * p[i];
      peak = std::max(peak, p[i]);
    }
    if (mass <= 0.0) return false;
    center = first / mass / static_cast<double>(n);
    extent = mass / peak / static_cast<double>(n);
    return true;
  };
  double cx = 0.5, cy = 0.5, w = 0.0, h = 0.0;
  const bool found = moments(col, cx, w) && moments(row, cy, h);
  if (!found) {
    // Nothing visible: keep the previous box (search centered, 1 / factor of the side).
    w = h = 1.0 / cfg_.search_factor;
    cx = cy = 0.5;
  }
  const double gx = cx * static_cast<double>(cells);
  const double gy = cy * static_cast<double>(cells);
  const std::size_t c = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, gx)));
  const std::size_t r = std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, gy)));
  if (found) out.response.at(0, 0, r, c) = kLogit;
  for (std::size_t y = 0; y < cells; ++y) {
    for (std::size_t x = 0; x < cells; ++x) {
      out.offset.at(0, 0, y, x) = static_cast<float>(gx - static_cast<double>(x));
      out.offset.at(0, 1, y, x) = static_cast<float>(gy - static_cast<double>(y));
      out.size.at(0, 0, y, x) = static_cast<float>(w);
      out.size.at(0, 1, y, x) = static_cast<float>(h);
    }
  }
  return out;
}

}  // namespace lightfc
