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

// Monte-Carlo sampling of transformation parameters.
//
// Every random draw comes from a keyed counter stream addressed by a path
// (seed, layer, output channel, input channel), so a plan does not depend on
// the order in which channels are visited.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include "wmcg/affine_group.hpp"
#include "wmcg/sfb_basis.hpp"

namespace wmcg {

// SplitMix64 output function applied to (key + counter * golden gamma).
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) : key_(key) {}

  static KeyedStream ForPath(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  KeyedStream Derive(std::uint64_t component) const;

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform in [lo, hi); returns lo when hi == lo.
  double NextUniform(double lo, double hi);
  // Uniform in (0, 1).
  double NextOpenUniform();
  double NextNormal();
  // Uniform integer in [0, n).
  int NextIndex(int n);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct Interval {
  double lo = 0;
  double hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AugmentationConfig {
  Interval shear_angle_range{-0.25 * std::numbers::pi, 0.25 * std::numbers::pi};
  Interval scale_factor_range{1.0, 2.0};
  bool isotropic_scaling = true;
  bool rotation_enabled = true;
  bool shift_enabled = true;
  std::uint64_t seed = 0;

  // Shear angles in [-pi/4, pi/4), isotropic scale in [1, 2), rotation and
  // circular shift on.
  static AugmentationConfig Default() { return {}; }
  // Every draw collapses to the identity transform.
  static AugmentationConfig Identity();
  void Validate() const;

  friend bool operator==(const AugmentationConfig&, const AugmentationConfig&) = default;
};

// Draw order is fixed (theta1, theta3, three scale factors, six shear angles)
// and independent of the enable flags.
TransformParams SampleParams(const AugmentationConfig& config, KeyedStream& stream);

struct LayerSamplingPlan {
  int c_out = 0;
  int c_in = 0;
  int kernel_size = 0;
  std::uint64_t layer_id = 0;
  std::vector<TransformParams> a_samples;  // c_out
  std::vector<TransformParams> b_samples;  // c_out * c_in, row-major
  std::vector<IntVec3> shifts;             // c_out * c_in
  std::vector<double> haar;                // c_out * c_in

  std::size_t PairIndex(int co, int ci) const {
    return static_cast<std::size_t>(co) * c_in + ci;
  }
  const TransformParams& b(int co, int ci) const { return b_samples[PairIndex(co, ci)]; }

  // M(a)^-1 M(b) for the pair.
  Mat3 PairTransform(int co, int ci) const;
};

LayerSamplingPlan BuildLayerPlan(const AugmentationConfig& config, int c_out, int c_in,
                                 int kernel_size, std::uint64_t layer_id);

// One line per channel pair: co ci, a (11), b (11), shift (3), haar.
std::string PlanToText(const LayerSamplingPlan& plan);

}  // namespace wmcg
