#pragma once

#include <array>

#include "lightfc/box.hpp"
#include "lightfc/image.hpp"
#include "lightfc/tensor.hpp"

namespace lightfc {

// Square frame window resampled to out_size x out_size. Patch pixel (u, v) has its center at
// frame position (origin + (u + 0.5) / scale).
struct CropGeometry {
  double center_x = 0.0;
  double center_y = 0.0;
  double side = 0.0;
  std::size_t out_size = 0;
  double scale = 0.0;  // out_size / side
  std::array<float, 3> pad_value{};
  std::size_t frame_width = 0;
  std::size_t frame_height = 0;

  double origin_x() const { return center_x - 0.5 * side; }
  double origin_y() const { return center_y - 0.5 * side; }
  // Throws InputError for non-positive side or scale.
  void validate() const;
};

CropGeometry make_crop_geometry(const Image& frame, const Box& target, double context_factor,
                                std::size_t out_size);

struct Crop {
  Tensor patch;  // (1, 3, out_size, out_size), raw [0, 1] values
  CropGeometry geom;
  std::size_t padded_pixels = 0;
};

// Side = context_factor * sqrt(w * h) around the target center, bilinear resampling, area
// outside the frame filled with the frame's channel means.
Crop crop_region(const Image& frame, const Box& target, double context_factor,
                 std::size_t out_size);

// Bilinear sample at continuous frame position (x, y); pixel centers sit at i + 0.5.
float sample_bilinear(const Image& frame, std::size_t channel, double x, double y);

// Normalized search coordinates ([0, 1] of the crop side) -> frame pixels, clipped to the
// frame with a minimum size of 1 px.
Box map_box_to_image(const Box& box_norm, const CropGeometry& crop);
// Frame pixels -> normalized search coordinates, no clipping.
Box map_box_to_crop(const Box& frame_box, const CropGeometry& crop);

// Per-channel (v - mean) / std, in place.
void normalize_patch(Tensor& patch, const std::array<float, 3>& mean,
                     const std::array<float, 3>& std_dev);

}  // namespace lightfc
