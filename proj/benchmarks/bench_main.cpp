#include <random>

#include <benchmark/benchmark.h>

#include "mpano/blend.hpp"
#include "mpano/depth_fusion.hpp"
#include "mpano/seam.hpp"

using namespace mpano;

namespace {

RgbImage random_rgb(std::mt19937_64& rng, int w, int h) {
  RgbImage img(w, h, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

// Square overlap with image 1 on the left third, image 2 on the right third.
void bm_min_cut(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  OverlapRegion ov;
  ov.rect = {0, 0, n, n};
  ov.valid1 = Mask(n, n);
  ov.valid2 = Mask(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      ov.valid1.at(x, y) = x < 2 * n / 3;
      ov.valid2.at(x, y) = x >= n / 3;
    }
  const SeamInput a = prepare_seam_input(random_rgb(rng, n, n), ov.valid1);
  const SeamInput b = prepare_seam_input(random_rgb(rng, n, n), ov.valid2);
  const SeamGraph g = build_seam_graph(ov, a, b, SeamParams{});
  for (auto _ : state) benchmark::DoNotOptimize(min_cut(g));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_min_cut)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_multiband_blend(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const RgbImage a = random_rgb(rng, n, n), b = random_rgb(rng, n, n);
  Mask m(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) m.at(x, y) = x < n / 2;
  const int levels = default_blend_levels(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(multiband_blend(a, b, m, levels));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_multiband_blend)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_fill_invalid_depth(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dep(0.5, 20.0), u01(0.0, 1.0);
  DepthImage d(w, w / 2);
  for (double& v : d.data())
    if (u01(rng) < 0.3) v = dep(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fill_invalid_depth(d, {0, w / 2}));
  state.SetItemsProcessed(state.iterations() * w * (w / 2));
}
BENCHMARK(bm_fill_invalid_depth)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
