#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "lightfc/tensor.hpp"

namespace lightfc {

// Planar RGB frame, values in [0, 1].
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> pixels;  // 3 planes of height * width

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), pixels(3 * w * h, 0.0f) {}

  bool empty() const { return width == 0 || height == 0; }
  float& at(std::size_t c, std::size_t y, std::size_t x) {
    return pixels[(c * height + y) * width + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return pixels[(c * height + y) * width + x];
  }
  std::array<float, 3> channel_means() const;
};

// Decodes PNG, JPEG or BMP (by signature) into [0, 1] RGB. Throws InputError.
Image load_image(const std::filesystem::path& path);

// Writes 8-bit RGB; format chosen by extension (.png or .bmp).
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace lightfc
