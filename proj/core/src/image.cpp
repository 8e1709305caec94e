#include "lightfc/image.hpp"

#include <png.h>
#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "lightfc/error.hpp"

namespace lightfc {

std::array<float, 3> Image::channel_means() const {
  std::array<float, 3> m{};
  const std::size_t n = width * height;
  if (n == 0) return m;
  for (std::size_t c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += pixels[c * n + i];
    m[c] = static_cast<float>(acc / static_cast<double>(n));
  }
  return m;
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image from_interleaved(const unsigned char* rgb, std::size_t w, std::size_t h,
                       std::size_t stride_bytes, std::size_t channels, bool bgr = false) {
  Image img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const unsigned char* row = rgb + y * stride_bytes;
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t src = channels == 1 ? 0 : (bgr ? 2 - c : c);
        img.at(c, y, x) = static_cast<float>(row[x * channels + src]) / 255.0f;
      }
    }
  }
  return img;
}

unsigned char to_byte(float v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Uncompressed 24/32-bit BMP, bottom-up or top-down.
Image decode_bmp(const std::vector<unsigned char>& buf, const std::string& name) {
  if (buf.size() < 54) throw InputError(name + ": truncated BMP header");
  const std::uint32_t offset = le32(&buf[10]);
  const std::int32_t width = static_cast<std::int32_t>(le32(&buf[18]));
  const std::int32_t raw_height = static_cast<std::int32_t>(le32(&buf[22]));
  const std::uint16_t bpp = le16(&buf[28]);
  const std::uint32_t compression = le32(&buf[30]);
  if ((bpp != 24 && bpp != 32) || (compression != 0 && compression != 3) || width <= 0 ||
      raw_height == 0) {
    throw InputError(name + ": unsupported BMP variant (need uncompressed 24/32-bit)");
  }
  const bool top_down = raw_height < 0;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(top_down ? -raw_height : raw_height);
  const std::size_t bytes = bpp / 8;
  const std::size_t stride = (w * bytes + 3) / 4 * 4;
  if (offset + stride * h > buf.size()) throw InputError(name + ": truncated BMP pixel data");
  Image img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t src_row = top_down ? y : h - 1 - y;
    const unsigned char* row = buf.data() + offset + src_row * stride;
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(c, y, x) = static_cast<float>(row[x * bytes + 2 - c]) / 255.0f;
      }
    }
  }
  return img;
}

Image decode_png(const std::vector<unsigned char>& buf, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, buf.data(), buf.size())) {
    throw InputError(name + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw InputError(name + ": " + msg);
  }
  return from_interleaved(rgb.data(), image.width, image.height, 3 * image.width, 3);
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegError*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

Image decode_jpeg(const std::vector<unsigned char>& buf, const std::string& name) {
  jpeg_decompress_struct info;
  JpegError err;
  info.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = on_jpeg_error;
  std::vector<unsigned char> rgb;
  std::size_t w = 0;
  std::size_t h = 0;
  std::size_t channels = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&info);
    throw InputError(name + ": " + err.message);
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, buf.data(), static_cast<unsigned long>(buf.size()));
  jpeg_read_header(&info, TRUE);
  if (info.num_components != 1) info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  w = info.output_width;
  h = info.output_height;
  channels = static_cast<std::size_t>(info.output_components);
  rgb.resize(w * h * channels);
  while (info.output_scanline < info.output_height) {
    unsigned char* row = rgb.data() + info.output_scanline * w * channels;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return from_interleaved(rgb.data(), w, h, w * channels, channels);
}

void write_bmp(const Image& img, const std::filesystem::path& path) {
  const std::size_t stride = (img.width * 3 + 3) / 4 * 4;
  const std::size_t data_size = stride * img.height;
  std::vector<unsigned char> buf(54 + data_size, 0);
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf[at + i] = static_cast<unsigned char>(v >> (8 * i));
  };
  buf[0] = 'B';
  buf[1] = 'M';
  put32(2, static_cast<std::uint32_t>(buf.size()));
  put32(10, 54);
  put32(14, 40);
  put32(18, static_cast<std::uint32_t>(img.width));
  put32(22, static_cast<std::uint32_t>(img.height));
  buf[26] = 1;
  buf[28] = 24;
  put32(34, static_cast<std::uint32_t>(data_size));
  for (std::size_t y = 0; y < img.height; ++y) {
    unsigned char* row = buf.data() + 54 + (img.height - 1 - y) * stride;
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) row[x * 3 + 2 - c] = to_byte(img.at(c, y, x));
    }
  }
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("cannot write " + path.string());
}

void write_png(const Image& img, const std::filesystem::path& path) {
  std::vector<unsigned char> rgb(img.width * img.height * 3);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) rgb[(y * img.width + x) * 3 + c] = to_byte(img.at(c, y, x));
    }
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, rgb.data(), 0, nullptr)) {
    throw InputError("cannot write " + path.string() + ": " + image.message);
  }
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const std::vector<unsigned char> buf = read_file(path);
  const std::string name = path.string();
  if (buf.size() >= 8 && buf[0] == 0x89 && buf[1] == 'P' && buf[2] == 'N' && buf[3] == 'G') {
    return decode_png(buf, name);
  }
  if (buf.size() >= 3 && buf[0] == 0xFF && buf[1] == 0xD8 && buf[2] == 0xFF) {
    return decode_jpeg(buf, name);
  }
  if (buf.size() >= 2 && buf[0] == 'B' && buf[1] == 'M') return decode_bmp(buf, name);
  throw InputError(name + ": unrecognized image format (expected PNG, JPEG or BMP)");
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw InputError("save_image: empty image");
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    write_png(img, path);
  } else if (ext == ".bmp") {
    write_bmp(img, path);
  } else {
    throw InputError("save_image: unsupported extension '" + ext + "' (use .png or .bmp)");
  }
}

}  // namespace lightfc
