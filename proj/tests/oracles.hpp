#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mpano/raster.hpp"
#include "mpano/seam.hpp"

namespace mpano::oracle {

// Walks each of the 8 directions to the raster edge on the original values.
inline DepthImage fill_scan(const DepthImage& in, int r0, int r1) {
  DepthImage out = in;
  for (int y = r0; y < r1; ++y)
    for (int x = 0; x < in.width(); ++x) {
      if (in.valid(x, y)) continue;
      double best = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          for (int s = 1;; ++s) {
            const int nx = x + s * dx, ny = y + s * dy;
            if (!in.contains(nx, ny)) break;
            if (in.valid(nx, ny)) {
              if (best == 0.0 || in.at(nx, ny) < best) best = in.at(nx, ny);
              break;
            }
          }
        }
      out.at(x, y) = best;
    }
  return out;
}

inline double cut_energy(const SeamGraph& g, const std::vector<std::uint8_t>& lab) {
  double e = 0.0;
  const int w = g.width();
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w && lab[i] != lab[i + 1]) e += g.right(x, y);
      if (y + 1 < g.height() && lab[i] != lab[i + w]) e += g.down(x, y);
    }
  return e;
}

// Minimum over all labelings that respect the forced pixels.
inline double min_energy_exhaustive(const SeamGraph& g) {
  const int w = g.width(), h = g.height();
  std::vector<std::uint8_t> lab(static_cast<std::size_t>(w) * h);
  std::vector<std::size_t> free;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      switch (g.forced(x, y)) {
        case SeamLabel::kImage1: lab[i] = 1; break;
        case SeamLabel::kImage2: lab[i] = 2; break;
        case SeamLabel::kFree: free.push_back(i); break;
      }
    }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
    for (std::size_t k = 0; k < free.size(); ++k) lab[free[k]] = (bits >> k) & 1 ? 2 : 1;
    best = std::min(best, cut_energy(g, lab));
  }
  return best;
}

// Random overlap whose free (shared) pixel count is at most `max_free`, with
// seam inputs on a 1/256 grid so every energy sum is exact in double.
struct DyadicOverlap {
  OverlapRegion ov;
  SeamInput in1;
  SeamInput in2;
};

inline DyadicOverlap random_dyadic_overlap(std::mt19937_64& rng, int max_free) {
  std::uniform_int_distribution<int> side(2, 5);
  std::uniform_int_distribution<int> q(0, 256);
  std::uniform_int_distribution<int> gq(-64, 64);
  for (;;) {
    const int w = side(rng), h = side(rng);
    DyadicOverlap d;
    d.ov.rect = {0, 0, w, h};
    d.ov.valid1 = Mask(w, h);
    d.ov.valid2 = Mask(w, h);
    // image 1 covers a left band, image 2 a right band, shared in between
    std::uniform_int_distribution<int> cut1(1, w - 1);
    int shared_count = 0;
    for (int y = 0; y < h; ++y) {
      const int a = cut1(rng);                                    // image 2 starts here
      const int b = std::uniform_int_distribution<int>(a, w)(rng);  // image 1 ends here
      for (int x = 0; x < w; ++x) {
        d.ov.valid1.at(x, y) = x < b ? 1 : 0;
        d.ov.valid2.at(x, y) = x >= a ? 1 : 0;
        shared_count += (x >= a && x < b) ? 1 : 0;
      }
    }
    if (shared_count > max_free) continue;
    auto make = [&](SeamInput& in) {
      in = {Raster<float>(w, h), Raster<float>(w, h), Raster<float>(w, h), Raster<float>(w, h)};
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          in.saturation.at(x, y) = q(rng) / 256.0f;
          in.value.at(x, y) = q(rng) / 256.0f;
          in.grad_x.at(x, y) = gq(rng) / 256.0f;
          in.grad_y.at(x, y) = gq(rng) / 256.0f;
        }
    };
    make(d.in1);
    make(d.in2);
    return d;
  }
}

}  // namespace mpano::oracle
