#pragma once

#include <span>

#include "actv/exec.hpp"
#include "actv/motion.hpp"

// Per-block frame kernels. Every kernel loops over blocks independently, so
// Exec::parallel (OpenMP) and Exec::serial give bit-identical results.
namespace actv::kernels {

// state = alpha * state + (1 - alpha) * in
void ema_update(Exec exec, std::span<MotionBlock> state, std::span<const MotionBlock> in, double alpha);

// lp = ema(lp, in); out = max(0, in - lp)
void highpass_update(Exec exec, std::span<MotionBlock> lp, std::span<const MotionBlock> in, double alpha,
                     std::span<MotionBlock> out);

// acc += in
void accumulate(Exec exec, std::span<MotionBlock> acc, std::span<const MotionBlock> in);

// acc += in * in (component-wise)
void accumulate_squares(Exec exec, std::span<MotionBlock> acc, std::span<const MotionBlock> in);

// out = in * s
void scale_into(Exec exec, std::span<const MotionBlock> in, double s, std::span<MotionBlock> out);

// out = a - b
void difference(Exec exec, std::span<const MotionBlock> a, std::span<const MotionBlock> b,
                std::span<MotionBlock> out);

// x = max(0, x)
void clamp_nonneg(Exec exec, std::span<MotionBlock> x);

void fill_zero(Exec exec, std::span<MotionBlock> x);

}  // namespace actv::kernels
