#include "mpano/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mpano/error.hpp"

namespace mpano {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return f;
}

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;
};

enum class ReadMode { kRgb8, kGray16 };

class PngReadHandle {
 public:
  PngReadHandle() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png_) info_ = png_create_info_struct(png_);
    if (!png_ || !info_) throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  ~PngReadHandle() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReadHandle(const PngReadHandle&) = delete;
  PngReadHandle& operator=(const PngReadHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriteHandle {
 public:
  PngWriteHandle() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png_) info_ = png_create_info_struct(png_);
    if (!png_ || !info_) throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  ~PngWriteHandle() { png_destroy_write_struct(&png_, &info_); }
  PngWriteHandle(const PngWriteHandle&) = delete;
  PngWriteHandle& operator=(const PngWriteHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

// libpng reports errors by longjmp into this frame. Only libpng's own frames
// are unwound; everything with a destructor lives in the caller.
bool read_png_rows(std::FILE* fp, PngReadHandle& h, ReadMode mode, RawPng& out) {
  png_structp png = h.png();
  png_infop info = h.info();
  if (setjmp(png_jmpbuf(png))) return false;

  png_init_io(png, fp);
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.color_type = png_get_color_type(png, info);

  if (mode == ReadMode::kGray16) {
    if (out.bit_depth != 16 || out.color_type != PNG_COLOR_TYPE_GRAY) return true;
    if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
    out.channels = 1;
  } else {
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    out.channels = 3;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * static_cast<std::size_t>(out.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return true;
}

bool write_png_rows(std::FILE* fp, PngWriteHandle& h, int width, int height, int bit_depth,
                    int color_type, const std::uint8_t* data, std::size_t row_bytes) {
  png_structp png = h.png();
  png_infop info = h.info();
  if (setjmp(png_jmpbuf(png))) return false;

  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if constexpr (std::endian::native == std::endian::little) {
    if (bit_depth == 16) png_set_swap(png);
  }
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + row_bytes * static_cast<std::size_t>(y)));
  }
  png_write_end(png, nullptr);
  return true;
}

RawPng read_raw(const std::filesystem::path& path, ReadMode mode) {
  FilePtr fp = open_file(path, "rb");
  std::uint8_t sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorCode::kParse, path.string() + " is not a PNG file");
  }
  PngReadHandle h;
  png_set_sig_bytes(h.png(), 8);
  RawPng raw;
  if (!read_png_rows(fp.get(), h, mode, raw)) {
    throw Error(ErrorCode::kParse, "corrupt PNG " + path.string());
  }
  return raw;
}

}  // namespace

void write_png(const Raster<std::uint8_t>& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PNG writer supports 1 or 3 channels");
  }
  if (img.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot write an empty image");
  FilePtr fp = open_file(path, "wb");
  PngWriteHandle h;
  const int type = img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  if (!write_png_rows(fp.get(), h, img.width(), img.height(), 8, type, img.data().data(),
                      static_cast<std::size_t>(img.width()) * img.channels())) {
    throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  RawPng raw = read_raw(path, ReadMode::kRgb8);
  RgbImage img(raw.width, raw.height, 3);
  std::copy(raw.bytes.begin(), raw.bytes.end(), img.data().begin());
  return img;
}

void write_depth_png(const DepthImage& depth, const std::filesystem::path& path) {
  const int w = depth.width();
  const int h = depth.height();
  if (w == 0 || h == 0) throw Error(ErrorCode::kInvalidArgument, "cannot write an empty depth map");
  std::vector<std::uint16_t> units(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!depth.valid(x, y)) continue;
      const double q = std::round(depth.at(x, y) * kDepthUnitsPerMeter);
      if (!(q <= 65535.0)) {
        throw Error(ErrorCode::kOutOfRange, "depth " + std::to_string(depth.at(x, y)) +
                                                " m exceeds the 16-bit millimeter range");
      }
      // sub-millimeter depths would alias the invalid sentinel
      units[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint16_t>(std::max(q, 1.0));
    }
  }
  FilePtr fp = open_file(path, "wb");
  PngWriteHandle h16;
  if (!write_png_rows(fp.get(), h16, w, h, 16, PNG_COLOR_TYPE_GRAY,
                      reinterpret_cast<const std::uint8_t*>(units.data()),
                      static_cast<std::size_t>(w) * 2)) {
    throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }
}

DepthImage read_depth_png(const std::filesystem::path& path) {
  RawPng raw = read_raw(path, ReadMode::kGray16);
  if (raw.bit_depth != 16 || raw.color_type != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorCode::kParse, path.string() + " is not a 16-bit single-channel depth PNG");
  }
  DepthImage depth(raw.width, raw.height);
  const auto* units = reinterpret_cast<const std::uint16_t*>(raw.bytes.data());
  auto out = depth.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = units[i] / kDepthUnitsPerMeter;
  return depth;
}

void write_labeling_png(const SeamLabeling& labeling, const std::filesystem::path& path) {
  Mask img(labeling.width, labeling.height);
  for (int y = 0; y < labeling.height; ++y)
    for (int x = 0; x < labeling.width; ++x) img.at(x, y) = labeling.at(x, y) == 1 ? 255 : 0;
  write_png(img, path);
}

void write_seam_pairs(const std::vector<SeamPair>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  for (const auto& [a, b] : pairs) out << a.x << ' ' << a.y << ' ' << b.x << ' ' << b.y << '\n';
}

}  // namespace mpano
