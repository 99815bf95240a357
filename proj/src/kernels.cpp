#include "actv/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace actv::kernels {

namespace {

std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

}  // namespace

void ema_update(Exec exec, std::span<MotionBlock> state, std::span<const MotionBlock> in, double alpha) {
  const double beta = 1.0 - alpha;
  const std::ptrdiff_t n = ssize(state.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    MotionBlock& s = state[k];
    const MotionBlock& x = in[k];
    s.density = alpha * s.density + beta * x.density;
    for (int b = 0; b < kDirBins; ++b) s.dir_hist[b] = alpha * s.dir_hist[b] + beta * x.dir_hist[b];
  }
}

void highpass_update(Exec exec, std::span<MotionBlock> lp, std::span<const MotionBlock> in, double alpha,
                     std::span<MotionBlock> out) {
  const double beta = 1.0 - alpha;
  const std::ptrdiff_t n = ssize(lp.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    MotionBlock& s = lp[k];
    const MotionBlock& x = in[k];
    MotionBlock& o = out[k];
    s.density = alpha * s.density + beta * x.density;
    o.density = std::max(0.0, x.density - s.density);
    for (int b = 0; b < kDirBins; ++b) {
      s.dir_hist[b] = alpha * s.dir_hist[b] + beta * x.dir_hist[b];
      o.dir_hist[b] = std::max(0.0, x.dir_hist[b] - s.dir_hist[b]);
    }
  }
}

void accumulate(Exec exec, std::span<MotionBlock> acc, std::span<const MotionBlock> in) {
  const std::ptrdiff_t n = ssize(acc.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (int c = 0; c < kBlockComponents; ++c) acc[k].component(c) += in[k].component(c);
  }
}

void accumulate_squares(Exec exec, std::span<MotionBlock> acc, std::span<const MotionBlock> in) {
  const std::ptrdiff_t n = ssize(acc.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (int c = 0; c < kBlockComponents; ++c) {
      const double v = in[k].component(c);
      acc[k].component(c) += v * v;
    }
  }
}

void scale_into(Exec exec, std::span<const MotionBlock> in, double s, std::span<MotionBlock> out) {
  const std::ptrdiff_t n = ssize(in.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (int c = 0; c < kBlockComponents; ++c) out[k].component(c) = in[k].component(c) * s;
  }
}

void difference(Exec exec, std::span<const MotionBlock> a, std::span<const MotionBlock> b,
                std::span<MotionBlock> out) {
  const std::ptrdiff_t n = ssize(a.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (int c = 0; c < kBlockComponents; ++c) out[k].component(c) = a[k].component(c) - b[k].component(c);
  }
}

void clamp_nonneg(Exec exec, std::span<MotionBlock> x) {
  const std::ptrdiff_t n = ssize(x.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    for (int c = 0; c < kBlockComponents; ++c) x[k].component(c) = std::max(0.0, x[k].component(c));
  }
}

void fill_zero(Exec exec, std::span<MotionBlock> x) {
  const std::ptrdiff_t n = ssize(x.size());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) x[k] = MotionBlock{};
}

}  // namespace actv::kernels
