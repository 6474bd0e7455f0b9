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

// Weighted Monte-Carlo group convolution.
//
// A layer's kernel for the channel pair (co, ci) is
//   K[co][ci] = C(b) * sum_j w[co][ci][j] * psi_j sampled under M(a_co)^-1 M(b_co,ci)
// and the layer itself is an ordinary stride-1 multi-channel correlation with
// those kernels, so a precomputed bank costs exactly what a plain convolution
// of the same shape costs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wmcg/affine_group.hpp"
#include "wmcg/mc_sampler.hpp"
#include "wmcg/sfb_basis.hpp"

namespace wmcg {

// Channel-major volume: values[((c * D + z) * H + y) * W + x].
struct Tensor4D {
  int channels = 0;
  int depth = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Tensor4D() = default;
  Tensor4D(int c, int d, int h, int w)
      : channels(c), depth(d), height(h), width(w),
        values(static_cast<std::size_t>(c) * d * h * w, 0.0) {}

  std::size_t Voxels() const { return static_cast<std::size_t>(depth) * height * width; }
  std::size_t Index(int c, int z, int y, int x) const {
    return ((static_cast<std::size_t>(c) * depth + z) * height + y) * width + x;
  }
  double& at(int c, int z, int y, int x) { return values[Index(c, z, y, x)]; }
  double at(int c, int z, int y, int x) const { return values[Index(c, z, y, x)]; }
  bool SameShape(const Tensor4D& o) const {
    return channels == o.channels && depth == o.depth && height == o.height && width == o.width;
  }
};

struct WeightTensor {
  int c_out = 0;
  int c_in = 0;
  int bases = 0;
  std::vector<double> values;  // [(co * c_in + ci) * bases + j]

  WeightTensor() = default;
  WeightTensor(int co, int ci, int j)
      : c_out(co), c_in(ci), bases(j), values(static_cast<std::size_t>(co) * ci * j, 0.0) {}
  double& at(int co, int ci, int j) {
    return values[(static_cast<std::size_t>(co) * c_in + ci) * bases + j];
  }
  double at(int co, int ci, int j) const {
    return values[(static_cast<std::size_t>(co) * c_in + ci) * bases + j];
  }
};

struct KernelBank {
  int c_out = 0;
  int c_in = 0;
  int size = 0;
  std::vector<double> values;  // [((co * c_in + ci) * k + z) * k + y) * k + x]

  KernelBank() = default;
  KernelBank(int co, int ci, int k)
      : c_out(co), c_in(ci), size(k),
        values(static_cast<std::size_t>(co) * ci * k * k * k, 0.0) {}
  std::size_t KernelVolume() const { return static_cast<std::size_t>(size) * size * size; }
  const double* Kernel(int co, int ci) const {
    return values.data() + (static_cast<std::size_t>(co) * c_in + ci) * KernelVolume();
  }
  double* Kernel(int co, int ci) {
    return values.data() + (static_cast<std::size_t>(co) * c_in + ci) * KernelVolume();
  }
};

enum class PaddingMode { kZero, kCircular };

// Worker count: WMCG_THREADS if set and positive, else hardware concurrency.
int ThreadCount();
// Runs fn(i) for i in [0, n) across ThreadCount() workers. Each index is
// handled by exactly one worker, so per-index results do not depend on the
// schedule.
void ParallelFor(int n, const std::function<void(int)>& fn);

// Sampled, transformed (and optionally normalized) bases for every channel
// pair: values[((pair * J) + j) * k^3 + voxel].
struct LayerBases {
  int c_out = 0;
  int c_in = 0;
  int bases = 0;
  int size = 0;
  std::vector<double> values;

  const double* Basis(int co, int ci, int j) const {
    const std::size_t kv = static_cast<std::size_t>(size) * size * size;
    return values.data() + ((static_cast<std::size_t>(co) * c_in + ci) * bases + j) * kv;
  }
};

// `grid_frame` right-multiplies every pair transform; the identity reproduces
// the plain layer, a rotation Q^-1 yields the layer whose kernels are rotated
// by Q.
LayerBases SampleLayerBases(const std::vector<BasisIndex>& basis_indices,
                            const BasisEvaluator& evaluator, const KernelGrid& grid,
                            const LayerSamplingPlan& plan, bool normalize = true,
                            const Mat3& grid_frame = Mat3::Identity());

KernelBank SynthesizeKernelBank(const WeightTensor& weights, const LayerBases& bases,
                                const LayerSamplingPlan& plan);

KernelBank BuildKernelBank(const WeightTensor& weights,
                           const std::vector<BasisIndex>& basis_indices,
                           const BasisEvaluator& evaluator, const KernelGrid& grid,
                           const LayerSamplingPlan& plan, bool normalize = true,
                           const Mat3& grid_frame = Mat3::Identity());

// Stride-1, same-size multi-channel correlation:
//   out[co](p) = sum_ci sum_v in[ci](p + v) K[co][ci](v),  v in [-h, h]^3.
// Accumulation order per output voxel is (ci, vz, vy, vx).
Tensor4D Conv3d(const Tensor4D& input, const KernelBank& bank, PaddingMode padding);

// Per-voxel channel mixing with a c_out x c_in matrix.
Tensor4D ScalarConv(const Tensor4D& input, const DenseMatrix& weights);

Tensor4D WmcgForward(const Tensor4D& input, const WeightTensor& weights,
                     const LayerSamplingPlan& plan,
                     const std::vector<BasisIndex>& basis_indices,
                     const BasisEvaluator& evaluator, const KernelGrid& grid,
                     PaddingMode padding, bool normalize = true);

// d<grad_output, forward(w)>/dw.
WeightTensor GradWeights(const Tensor4D& input, const Tensor4D& grad_output,
                         const LayerSamplingPlan& plan,
                         const std::vector<BasisIndex>& basis_indices,
                         const BasisEvaluator& evaluator, const KernelGrid& grid,
                         PaddingMode padding, bool normalize = true);

// Standard-normal weights from the keyed stream (seed, tag).
WeightTensor RandomWeights(int c_out, int c_in, int bases, std::uint64_t seed);
KernelBank RandomKernelBank(int c_out, int c_in, int size, std::uint64_t seed);

}  // namespace wmcg
