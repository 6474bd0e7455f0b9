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

// JSON run configuration shared by every CLI command. All sections and keys
// are optional; missing keys keep their defaults. Example:
//
//   {
//     "augmentation": {"shear_angle_range": [-0.785398, 0.785398],
//                      "scale_factor_range": [1, 2], "isotropic_scaling": true,
//                      "rotation": true, "shift": true, "seed": 0},
//     "kernel": {"size": 5, "radius": 2.5},
//     "basis": {"count": 27, "profile": "sfb", "sigma": 0.5, "normalize": true},
//     "layer": {"c_out": 4, "c_in": 4, "layer_id": 0, "weights": "unit",
//               "weight_seed": 0, "weight_file": ""},
//     "conv": {"padding": "zero"},
//     "equiv": {"family": "full_affine", "samples": 40, "volume_size": 32,
//               "crop_margin": 2, "seed": 0,
//               "volume": "bandlimited_noise", "layer": "wmcg", "weights": "random"},
//     "bench": {"repeats": 5, "volume_size": 32}
//   }

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmcg/conv_engine.hpp"
#include "wmcg/equiv_harness.hpp"
#include "wmcg/mc_sampler.hpp"
#include "wmcg/sfb_basis.hpp"

namespace wmcg {

enum class WeightSource { kUnit, kRandom, kFile };
enum class EquivLayerKind { kWmcg, kRandomBank };

struct RunConfig {
  AugmentationConfig augmentation;

  int kernel_size = 5;
  std::optional<double> kernel_radius;  // default (k - 1) / 2 + 0.5

  int basis_count = 27;
  RadialProfile profile;
  bool normalize = true;

  int c_out = 4;
  int c_in = 4;
  std::uint64_t layer_id = 0;
  WeightSource weights = WeightSource::kUnit;
  std::uint64_t weight_seed = 0;
  std::string weight_file;  // whitespace-separated reals in (co, ci, j) order

  PaddingMode padding = PaddingMode::kZero;

  TransformFamily equiv_family = TransformFamily::kFullAffine;
  int equiv_samples = 40;
  int equiv_volume_size = 32;
  int equiv_crop_margin = 2;
  std::uint64_t equiv_seed = 0;
  VolumeKind equiv_volume = VolumeKind::kBandlimitedNoise;
  EquivLayerKind equiv_layer = EquivLayerKind::kWmcg;
  // Weights of the per-sample WMCG layers; "random" keys them by the sample seed.
  WeightSource equiv_weights = WeightSource::kRandom;

  int bench_repeats = 5;
  int bench_volume_size = 32;

  KernelGrid Grid() const;
  std::vector<BasisIndex> Bases() const;
  // Sets the augmentation, weight and sweep seeds.
  void ApplySeed(std::uint64_t seed);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws kConfig with a message naming the offending key path
// (e.g. "augmentation.scale_factor_range") or the parse position.
RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);

// Canonical JSON text; ParseRunConfig(RunConfigToText(c)) == c.
std::string RunConfigToText(const RunConfig& config);

// Reads a weight file for the configured layer shape.
WeightTensor LoadWeightFile(const std::string& path, int c_out, int c_in, int bases);

// Weights for the configured layer shape; `seed` keys random weights.
WeightTensor ConfiguredWeights(const RunConfig& config, int bases, std::uint64_t seed);

}  // namespace wmcg
