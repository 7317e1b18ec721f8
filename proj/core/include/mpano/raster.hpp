#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mpano/error.hpp"

namespace mpano {

// Row-major, channel-interleaved image buffer.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  template <typename U>
  bool same_size(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

// 8-bit, 3 interleaved channels (R, G, B).
using RgbImage = Raster<std::uint8_t>;
// 8-bit single channel, 0 = unset, nonzero = set.
using Mask = Raster<std::uint8_t>;

inline RgbImage make_rgb(int width, int height) { return RgbImage(width, height, 3); }
inline Mask make_mask(int width, int height) { return Mask(width, height, 1); }

// Metric depth raster; 0 marks an invalid pixel.
class DepthImage {
 public:
  static constexpr double kInvalid = 0.0;

  DepthImage() = default;
  DepthImage(int width, int height) : values_(width, height, 1, kInvalid) {}

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  bool contains(int x, int y) const noexcept { return values_.contains(x, y); }

  double at(int x, int y) const noexcept { return values_.at(x, y); }
  double& at(int x, int y) noexcept { return values_.at(x, y); }
  bool valid(int x, int y) const noexcept { return values_.at(x, y) > 0.0; }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (double d : values_.data()) n += d > 0.0 ? 1 : 0;
    return n;
  }

  std::span<double> data() noexcept { return values_.data(); }
  std::span<const double> data() const noexcept { return values_.data(); }

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  Raster<double> values_;
};

struct PixelIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
  friend auto operator<=>(const PixelIndex& a, const PixelIndex& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

}  // namespace mpano
