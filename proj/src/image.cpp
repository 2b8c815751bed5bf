// Copyright 2026 The occlear Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "occlear/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>

#include "occlear/error.hpp"

namespace occlear {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp. Everything with a destructor lives in
// the callers, so the jump never skips one.
bool decode(std::FILE* fp, RawRaster& out, std::vector<png_byte>& buffer,
            std::vector<png_bytep>& rows, std::string& error) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    error = "corrupt PNG data";
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth < 8) png_set_packing(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  out.width = int(png_get_image_width(png, info));
  out.height = int(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info) == 16 ? 16 : 8;
  const std::size_t stride = png_get_rowbytes(png, info);

  buffer.resize(stride * std::size_t(out.height));
  rows.resize(std::size_t(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + stride * std::size_t(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode(std::FILE* fp, const RawRaster& in, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, png_uint_32(in.width), png_uint_32(in.height), in.bit_depth,
               in.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

RawRaster read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(std::filesystem::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open image " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorCode::kInvalidData, path.string() + " is not a PNG file");
  }
  std::rewind(fp.get());

  RawRaster out;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  std::string error;
  if (!decode(fp.get(), out, buffer, rows, error)) {
    fail(ErrorCode::kInvalidData, "cannot decode " + path.string() + (error.empty() ? "" : ": " + error));
  }

  const std::size_t n = std::size_t(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = std::uint16_t((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    std::copy(buffer.begin(), buffer.begin() + std::ptrdiff_t(n), out.samples.begin());
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RawRaster& raster) {
  if ((raster.channels != 1 && raster.channels != 3) ||
      (raster.bit_depth != 8 && raster.bit_depth != 16)) {
    fail(ErrorCode::kInvalidArgument, "PNG writer supports 1 or 3 channels at 8 or 16 bits");
  }
  const std::size_t n = std::size_t(raster.width) * raster.height * raster.channels;
  if (raster.samples.size() != n || raster.width < 1 || raster.height < 1) {
    fail(ErrorCode::kInvalidArgument, "raster size does not match its dimensions");
  }
  const std::size_t bytes = raster.bit_depth / 8;
  std::vector<png_byte> buffer(n * bytes);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t v = raster.samples[i];
    if (bytes == 2) {
      buffer[2 * i] = png_byte(v >> 8);
      buffer[2 * i + 1] = png_byte(v & 0xFF);
    } else {
      buffer[i] = png_byte(std::min<std::uint16_t>(v, 255));
    }
  }
  const std::size_t stride = std::size_t(raster.width) * raster.channels * bytes;
  std::vector<png_bytep> rows(std::size_t(raster.height));
  for (int y = 0; y < raster.height; ++y) rows[y] = buffer.data() + stride * std::size_t(y);

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(ErrorCode::kIo, "cannot write image " + path.string());
  if (!encode(fp.get(), raster, rows)) fail(ErrorCode::kIo, "PNG encoding failed for " + path.string());
}

Image to_image(const RawRaster& raster) {
  Image img(raster.width, raster.height);
  const float scale = raster.bit_depth == 16 ? 65535.0f : 255.0f;
  const int ch = raster.channels;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const std::uint16_t* s = raster.samples.data() + p * ch;
    for (int c = 0; c < 3; ++c) {
      const std::uint16_t v = ch >= 3 ? s[c] : s[0];
      img.data[p * 3 + c] = float(v) / scale;
    }
  }
  return img;
}

RawRaster to_raster8(const Image& image) {
  RawRaster r{image.width, image.height, 3, 8, {}};
  r.samples.resize(image.data.size());
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    const float v = std::clamp(image.data[i], 0.0f, 1.0f);
    r.samples[i] = std::uint16_t(std::lround(v * 255.0f));
  }
  return r;
}

Image load_image(const std::filesystem::path& path) { return to_image(read_png(path)); }

void save_image(const std::filesystem::path& path, const Image& image) {
  write_png(path, to_raster8(image));
}

Image side_by_side(const Image& left, const Image& right) {
  const int h = std::max(left.height, right.height);
  Image out(left.width + right.width, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const bool is_left = x < left.width;
      const Image& src = is_left ? left : right;
      const int sx = is_left ? x : x - left.width;
      if (y >= src.height) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(sx, y, c);
    }
  }
  return out;
}

double mean_squared_error(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::kInvalidArgument, "image dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    sum += d * d;
  }
  return a.data.empty() ? 0.0 : sum / double(a.data.size());
}

double psnr(const Image& a, const Image& b) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace occlear
