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

// Measures how far a volume-to-volume layer is from commuting with a spatial
// transform: compares layer(T f) against T layer(f) on the voxels that see
// neither padding nor out-of-field samples.

#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "wmcg/affine_group.hpp"
#include "wmcg/conv_engine.hpp"
#include "wmcg/mc_sampler.hpp"

namespace wmcg {

enum class VolumeKind { kSmoothBlobs, kBandlimitedNoise };

// SmoothBlobs: sum of eight axis-aligned anisotropic Gaussian bumps per channel
// with amplitudes in [-1, 1). BandlimitedNoise: unit-variance random field
// whose spectrum is supported on periodic grid frequencies with radius at
// most 1/8 cycle per voxel (a quarter of Nyquist), Hann-tapered toward that
// cutoff; the DC term is excluded.
Tensor4D SynthVolume(VolumeKind kind, int channels, int size, std::uint64_t seed);

enum class Interpolation { kTrilinear, kNearestNeighbor };
enum class OutOfRange { kZeroFill, kWrap };

struct VolumeTransformSpec {
  Mat3 linear;
  Interpolation interpolation = Interpolation::kTrilinear;
  OutOfRange out_of_range = OutOfRange::kZeroFill;
};

// out(x) = in(M^-1 (x - c) + c) per channel, c the geometric center.
Tensor4D ResampleVolume(const Tensor4D& vol, const VolumeTransformSpec& spec);

// K'(u) = K(Q^-1 u) for an exact quarter turn Q about the kernel center.
KernelBank RotateKernelBank(const KernelBank& bank, const Mat3& quarter_turn);

using Layer = std::function<Tensor4D(const Tensor4D&)>;

struct EquivarianceError {
  double rel_l2 = 0;
  double max_abs = 0;
  std::size_t voxels = 0;  // compared voxels per channel
};

// Voxels x with x in [m, N-1-m]^3 whose box x +- m maps inside the volume and
// whose own preimage lies in [m, N-1-m]^3.
std::vector<char> InteriorMask(int depth, int height, int width, const Mat3& linear,
                               int crop_margin);

// A = layer(T vol), B = T layer(vol); rel_l2 = |A - B| / max(|B|, 1e-30).
EquivarianceError MeasureEquivariance(const Layer& layer, const Tensor4D& vol,
                                      const VolumeTransformSpec& spec, int crop_margin);

// Same with a separate layer applied to the transformed input (for layers
// whose kernels are matched to the transform).
EquivarianceError MeasureEquivariance(const Layer& layer_on_transformed, const Layer& layer,
                                      const Tensor4D& vol, const VolumeTransformSpec& spec,
                                      int crop_margin);

// Circular shift by an integer voxel offset (x, y, z).
Tensor4D ShiftVolume(const Tensor4D& vol, const IntVec3& shift);

// Full-volume comparison of layer(shift f) against shift layer(f).
EquivarianceError MeasureTranslationEquivariance(const Layer& layer, const Tensor4D& vol,
                                                 const IntVec3& shift);

enum class TransformFamily { kIdentity, kRotation, kScaling, kShear, kFullAffine };

const char* FamilyName(TransformFamily family);

// Ranges of the affine test protocol: shear angle (-pi/2, pi/2) mapped
// through tan, isotropic scale [1, 2), rotation angles [-pi, pi).
struct SweepRanges {
  Interval rotation{-std::numbers::pi, std::numbers::pi};
  Interval scale{1.0, 2.0};
  Interval shear_angle{-0.5 * std::numbers::pi, 0.5 * std::numbers::pi};
};

TransformParams DrawFamilyTransform(TransformFamily family, const SweepRanges& ranges,
                                    KeyedStream& stream);

struct LayerPair {
  Layer on_transformed;
  Layer on_original;
};

// Builds the layer(s) for one sample; receives the sample seed and the
// volume transform so transform-matched layers can be constructed.
using LayerFactory = std::function<LayerPair(std::uint64_t sample_seed, const Mat3& transform)>;

struct SweepConfig {
  TransformFamily family = TransformFamily::kFullAffine;
  SweepRanges ranges;
  int n_samples = 20;
  std::uint64_t seed = 0;
  int volume_size = 32;
  int channels = 4;
  VolumeKind volume_kind = VolumeKind::kBandlimitedNoise;
  int crop_margin = 2;
  Interpolation interpolation = Interpolation::kTrilinear;
  OutOfRange out_of_range = OutOfRange::kZeroFill;
  // Transforms leaving fewer valid voxels than this fraction of the cropped
  // cube are redrawn from the same stream.
  double min_valid_fraction = 0.02;
  int max_redraws = 10000;
};

struct SampleRecord {
  int index = 0;
  std::uint64_t sample_seed = 0;
  TransformParams params;
  int redraws = 0;
  EquivarianceError error;
};

struct EquivarianceReport {
  std::string family;
  std::uint64_t seed = 0;
  int crop_margin = 0;
  std::vector<SampleRecord> samples;
  double mean_rel_l2 = 0;
  double std_rel_l2 = 0;
  double mean_max_abs = 0;
  double std_max_abs = 0;
};

EquivarianceReport SweepReport(const LayerFactory& factory, const SweepConfig& config);

// One JSON object per sample, then a summary object.
std::string ReportToJsonLines(const EquivarianceReport& report);

}  // namespace wmcg
