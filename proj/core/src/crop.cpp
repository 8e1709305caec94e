#include "lightfc/crop.hpp"

#include <algorithm>
#include <cmath>

#include "lightfc/error.hpp"

namespace lightfc {

void CropGeometry::validate() const {
  if (!(side > 0.0) || !(scale > 0.0) || out_size == 0 || !std::isfinite(side) ||
      !std::isfinite(scale)) {
    throw InputError("degenerate crop geometry (side " + std::to_string(side) + ", scale " +
                     std::to_string(scale) + ")");
  }
}

CropGeometry make_crop_geometry(const Image& frame, const Box& target, double context_factor,
                                std::size_t out_size) {
  if (frame.empty()) throw InputError("crop: empty frame");
  if (!target.valid()) throw InputError("crop: target box has non-positive size");
  CropGeometry g;
  g.center_x = target.cx();
  g.center_y = target.cy();
  g.side = context_factor * std::sqrt(target.w * target.h);
  g.out_size = out_size;
  g.scale = static_cast<double>(out_size) / g.side;
  g.pad_value = frame.channel_means();
  g.frame_width = frame.width;
  g.frame_height = frame.height;
  g.validate();
  return g;
}

float sample_bilinear(const Image& frame, std::size_t channel, double x, double y) {
  const double fx = x - 0.5;
  const double fy = y - 0.5;
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const double ax = fx - x0f;
  const double ay = fy - y0f;
  const long w = static_cast<long>(frame.width);
  const long h = static_cast<long>(frame.height);
  const long x0 = std::clamp(static_cast<long>(x0f), 0L, w - 1);
  const long x1 = std::clamp(static_cast<long>(x0f) + 1, 0L, w - 1);
  const long y0 = std::clamp(static_cast<long>(y0f), 0L, h - 1);
  const long y1 = std::clamp(static_cast<long>(y0f) + 1, 0L, h - 1);
  const double v00 = frame.at(channel, y0, x0);
  const double v01 = frame.at(channel, y0, x1);
  const double v10 = frame.at(channel, y1, x0);
  const double v11 = frame.at(channel, y1, x1);
  const double top = v00 + (v01 - v00) * ax;
  const double bottom = v10 + (v11 - v10) * ax;
  return static_cast<float>(top + (bottom - top) * ay);
}

Crop crop_region(const Image& frame, const Box& target, double context_factor,
                 std::size_t out_size) {
  Crop crop;
  crop.geom = make_crop_geometry(frame, target, context_factor, out_size);
  const CropGeometry& g = crop.geom;
  crop.patch = Tensor({1, 3, out_size, out_size});
  const double ox = g.origin_x();
  const double oy = g.origin_y();
  const double w = static_cast<double>(frame.width);
  const double h = static_cast<double>(frame.height);
  for (std::size_t v = 0; v < out_size; ++v) {
    const double fy = oy + (static_cast<double>(v) + 0.5) / g.scale;
    for (std::size_t u = 0; u < out_size; ++u) {
      const double fx = ox + (static_cast<double>(u) + 0.5) / g.scale;
      const bool inside = fx >= 0.0 && fx < w && fy >= 0.0 && fy < h;
      if (!inside) ++crop.padded_pixels;
      for (std::size_t c = 0; c < 3; ++c) {
        crop.patch.at(0, c, v, u) = inside ? sample_bilinear(frame, c, fx, fy) : g.pad_value[c];
      }
    }
  }
  return crop;
}

Box map_box_to_image(const Box& box_norm, const CropGeometry& crop) {
  crop.validate();
  const double k = static_cast<double>(crop.out_size) / crop.scale;  // == side
  Box b{crop.origin_x() + box_norm.x * k, crop.origin_y() + box_norm.y * k, box_norm.w * k,
        box_norm.h * k};
  if (crop.frame_width == 0 || crop.frame_height == 0) return b;
  const double fw = static_cast<double>(crop.frame_width);
  const double fh = static_cast<double>(crop.frame_height);
  double x1 = std::clamp(b.x, 0.0, std::max(0.0, fw - 1.0));
  double y1 = std::clamp(b.y, 0.0, std::max(0.0, fh - 1.0));
  double x2 = std::clamp(b.right(), 0.0, fw);
  double y2 = std::clamp(b.bottom(), 0.0, fh);
  if (x2 - x1 < 1.0) x2 = std::min(fw, x1 + 1.0);
  if (y2 - y1 < 1.0) y2 = std::min(fh, y1 + 1.0);
  return {x1, y1, x2 - x1, y2 - y1};
}

Box map_box_to_crop(const Box& frame_box, const CropGeometry& crop) {
  crop.validate();
  const double k = crop.side;
  return {(frame_box.x - crop.origin_x()) / k, (frame_box.y - crop.origin_y()) / k,
          frame_box.w / k, frame_box.h / k};
}

void normalize_patch(Tensor& patch, const std::array<float, 3>& mean,
                     const std::array<float, 3>& std_dev) {
  const Shape& s = patch.shape();
  if (s.c != 3) throw ShapeError("normalize_patch: expected 3 channels");
  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < 3; ++c) {
      float* p = patch.plane(n, c);
      const float inv = 1.0f / std_dev[c];
      for (std::size_t i = 0; i < s.plane(); ++i) p[i] = (p[i] - mean[c]) * inv;
    }
  }
}

}  // namespace lightfc
