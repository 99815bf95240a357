#include <random>

#include <benchmark/benchmark.h>

#include "actv/exec.hpp"
#include "actv/motion.hpp"
#include "actv/tfilter.hpp"

namespace {

actv::MotionFrame random_frame(int gw, int gh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto f = actv::MotionFrame::zeros(gw, gh);
  for (auto& b : f.blocks) {
    b.density = u(rng);
    for (auto& h : b.dir_hist) h = u(rng);
  }
  return f;
}

actv::GrayFrame random_gray(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  actv::GrayFrame g;
  g.width = w;
  g.height = h;
  g.pixels.resize(static_cast<std::size_t>(w) * h);
  for (auto& p : g.pixels) p = static_cast<std::uint8_t>(u(rng));
  return g;
}

void cascade_step(benchmark::State& state, actv::Exec exec) {
  const int side = static_cast<int>(state.range(0));
  actv::BandParams p;
  p.frame_rate = 1.0;  // every tick is a full short-term update
  actv::CascadeFilter f(side, side, p, exec);
  const auto in = random_frame(side, side, 1);
  actv::BandOutputs out;
  std::int64_t t = 0;
  for (auto _ : state) {
    f.step(in, t++, out);
    benchmark::DoNotOptimize(out.m_S2.blocks.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

void extract(benchmark::State& state, actv::Exec exec) {
  const int side = static_cast<int>(state.range(0));
  const auto a = random_gray(side, side, 1);
  const auto b = random_gray(side, side, 2);
  for (auto _ : state) {
    auto m = actv::extract_motion(a, b, 16, 8.0, exec);
    benchmark::DoNotOptimize(m.blocks.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

}  // namespace

BENCHMARK_CAPTURE(cascade_step, serial, actv::Exec::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(cascade_step, parallel, actv::Exec::parallel)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(extract, serial, actv::Exec::serial)->Arg(640)->Arg(1920);
BENCHMARK_CAPTURE(extract, parallel, actv::Exec::parallel)->Arg(640)->Arg(1920);

BENCHMARK_MAIN();
