// Copyright 2026 The WMCG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmcg/mc_sampler.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "wmcg/error.hpp"

namespace wmcg {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kOutputTag = 0xA5A5000000000001ULL;
constexpr std::uint64_t kPairTag = 0xA5A5000000000002ULL;

std::uint64_t Mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

KeyedStream KeyedStream::ForPath(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  KeyedStream s(Mix(seed + kGolden));
  for (std::uint64_t c : path) s = s.Derive(c);
  return s;
}

KeyedStream KeyedStream::Derive(std::uint64_t component) const {
  return KeyedStream(Mix(key_ ^ Mix(component + kGolden)));
}

std::uint64_t KeyedStream::NextU64() {
  ++counter_;
  return Mix(key_ + counter_ * kGolden);
}

double KeyedStream::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double KeyedStream::NextUniform(double lo, double hi) {
  const double u = NextUniform();
  if (hi == lo) return lo;
  const double v = lo + (hi - lo) * u;
  return v < hi ? v : lo;
}

double KeyedStream::NextOpenUniform() {
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double KeyedStream::NextNormal() {
  // Box-Muller, one variate per call.
  const double u1 = NextOpenUniform();
  const double u2 = NextUniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int KeyedStream::NextIndex(int n) {
  const int i = static_cast<int>(NextUniform() * n);
  return i < n ? i : n - 1;
}

AugmentationConfig AugmentationConfig::Identity() {
  AugmentationConfig c;
  c.shear_angle_range = {0.0, 0.0};
  c.scale_factor_range = {1.0, 1.0};
  c.isotropic_scaling = true;
  c.rotation_enabled = false;
  c.shift_enabled = false;
  return c;
}

void AugmentationConfig::Validate() const {
  const double half_pi = 0.5 * std::numbers::pi;
  const auto& sh = shear_angle_range;
  if (!std::isfinite(sh.lo) || !std::isfinite(sh.hi) || sh.lo > sh.hi ||
      !(sh.lo > -half_pi) || sh.hi > half_pi) {
    throw Error(ErrorCode::kInvalidArgument,
                "shear_angle_range must satisfy -pi/2 < lo <= hi <= pi/2");
  }
  const auto& sc = scale_factor_range;
  if (!std::isfinite(sc.lo) || !std::isfinite(sc.hi) || !(sc.lo > 0.0) || sc.lo > sc.hi) {
    throw Error(ErrorCode::kInvalidArgument,
                "scale_factor_range must satisfy 0 < lo <= hi");
  }
}

TransformParams SampleParams(const AugmentationConfig& config, KeyedStream& stream) {
  constexpr double kPi = std::numbers::pi;
  TransformParams p;
  const double t1 = stream.NextUniform(-kPi, kPi);
  const double t3 = stream.NextUniform(-kPi, kPi);
  if (config.rotation_enabled) {
    p.theta1 = t1;
    p.theta3 = t3;
  }
  const auto& sc = config.scale_factor_range;
  const double f0 = stream.NextUniform(sc.lo, sc.hi);
  const double f1 = stream.NextUniform(sc.lo, sc.hi);
  const double f2 = stream.NextUniform(sc.lo, sc.hi);
  p.alpha = std::log2(f0);
  p.beta = config.isotropic_scaling ? p.alpha : std::log2(f1);
  p.gamma = config.isotropic_scaling ? p.alpha : std::log2(f2);

  const auto& sh = config.shear_angle_range;
  auto shear = [&] { return std::tan(stream.NextUniform(sh.lo, sh.hi)); };
  p.s01 = shear();
  p.s10 = shear();
  p.s02 = shear();
  p.s20 = shear();
  p.s12 = shear();
  p.s21 = shear();
  return p;
}

Mat3 LayerSamplingPlan::PairTransform(int co, int ci) const {
  return Inverse(ComposeParams(a_samples[co])) * ComposeParams(b(co, ci));
}

LayerSamplingPlan BuildLayerPlan(const AugmentationConfig& config, int c_out, int c_in,
                                 int kernel_size, std::uint64_t layer_id) {
  config.Validate();
  if (c_out < 1 || c_in < 1 || kernel_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "plan dimensions must be positive");
  }
  LayerSamplingPlan plan;
  plan.c_out = c_out;
  plan.c_in = c_in;
  plan.kernel_size = kernel_size;
  plan.layer_id = layer_id;
  plan.a_samples.resize(c_out);
  const std::size_t pairs = static_cast<std::size_t>(c_out) * c_in;
  plan.b_samples.resize(pairs);
  plan.shifts.resize(pairs);
  plan.haar.resize(pairs);

  const KeyedStream layer = KeyedStream::ForPath(config.seed, {layer_id});
  for (int co = 0; co < c_out; ++co) {
    const KeyedStream out_stream = layer.Derive(static_cast<std::uint64_t>(co));
    KeyedStream a_stream = out_stream.Derive(kOutputTag);
    plan.a_samples[co] = SampleParams(config, a_stream);
    const KeyedStream pair_root = out_stream.Derive(kPairTag);
    for (int ci = 0; ci < c_in; ++ci) {
      KeyedStream s = pair_root.Derive(static_cast<std::uint64_t>(ci));
      const std::size_t idx = plan.PairIndex(co, ci);
      plan.b_samples[idx] = SampleParams(config, s);
      IntVec3 shift{s.NextIndex(kernel_size), s.NextIndex(kernel_size),
                    s.NextIndex(kernel_size)};
      plan.shifts[idx] = config.shift_enabled ? shift : IntVec3{0, 0, 0};
      plan.haar[idx] = HaarCoefficient(plan.b_samples[idx]);
    }
  }
  return plan;
}

std::string PlanToText(const LayerSamplingPlan& plan) {
  std::ostringstream os;
  os << "# c_out=" << plan.c_out << " c_in=" << plan.c_in
     << " kernel_size=" << plan.kernel_size << " layer_id=" << plan.layer_id << "\n";
  os << "# co ci a[11] b[11] shift_x shift_y shift_z haar\n";
  char buf[32];
  for (int co = 0; co < plan.c_out; ++co) {
    for (int ci = 0; ci < plan.c_in; ++ci) {
      const std::size_t idx = plan.PairIndex(co, ci);
      os << co << ' ' << ci << ' ' << ToString(plan.a_samples[co]) << ' '
         << ToString(plan.b_samples[idx]);
      for (int v : plan.shifts[idx]) os << ' ' << v;
      std::snprintf(buf, sizeof(buf), " %.17g", plan.haar[idx]);
      os << buf << "\n";
    }
  }
  return os.str();
}

}  // namespace wmcg
