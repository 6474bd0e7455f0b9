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

#include "wmcg/conv_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

#include "wmcg/error.hpp"

namespace wmcg {

int ThreadCount() {
  if (const char* env = std::getenv("WMCG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {
thread_local bool tls_in_worker = false;
}  // namespace

void ParallelFor(int n, const std::function<void(int)>& fn) {
  // Nested calls run inline on the calling worker.
  const int workers = tls_in_worker ? 1 : std::min(ThreadCount(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      tls_in_worker = true;
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

void CheckPlan(const LayerSamplingPlan& plan, const KernelGrid& grid) {
  if (plan.kernel_size != grid.size) {
    throw Error(ErrorCode::kInvalidArgument, "plan kernel size differs from grid size");
  }
  const std::size_t pairs = static_cast<std::size_t>(plan.c_out) * plan.c_in;
  if (plan.a_samples.size() != static_cast<std::size_t>(plan.c_out) ||
      plan.b_samples.size() != pairs || plan.shifts.size() != pairs ||
      plan.haar.size() != pairs) {
    throw Error(ErrorCode::kInvalidArgument, "plan arrays are inconsistent with its dims");
  }
}

// Zero- or wrap-padded copy of one channel with halo h on every side.
std::vector<double> PadChannel(const Tensor4D& in, int c, int h, PaddingMode mode) {
  const int pd = in.depth + 2 * h;
  const int ph = in.height + 2 * h;
  const int pw = in.width + 2 * h;
  std::vector<double> out(static_cast<std::size_t>(pd) * ph * pw, 0.0);
  auto wrap = [](int v, int n) { return ((v % n) + n) % n; };
  for (int z = 0; z < pd; ++z) {
    int sz = z - h;
    if (mode == PaddingMode::kCircular) sz = wrap(sz, in.depth);
    if (sz < 0 || sz >= in.depth) continue;
    for (int y = 0; y < ph; ++y) {
      int sy = y - h;
      if (mode == PaddingMode::kCircular) sy = wrap(sy, in.height);
      if (sy < 0 || sy >= in.height) continue;
      double* row = out.data() + (static_cast<std::size_t>(z) * ph + y) * pw;
      for (int x = 0; x < pw; ++x) {
        int sx = x - h;
        if (mode == PaddingMode::kCircular) sx = wrap(sx, in.width);
        if (sx < 0 || sx >= in.width) continue;
        row[x] = in.at(c, sz, sy, sx);
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> PadAll(const Tensor4D& in, int h, PaddingMode mode) {
  std::vector<std::vector<double>> padded(in.channels);
  ParallelFor(in.channels, [&](int c) { padded[c] = PadChannel(in, c, h, mode); });
  return padded;
}

}  // namespace

LayerBases SampleLayerBases(const std::vector<BasisIndex>& basis_indices,
                            const BasisEvaluator& evaluator, const KernelGrid& grid,
                            const LayerSamplingPlan& plan, bool normalize,
                            const Mat3& grid_frame) {
  CheckPlan(plan, grid);
  if (basis_indices.empty()) throw Error(ErrorCode::kInvalidArgument, "no bases");
  LayerBases out;
  out.c_out = plan.c_out;
  out.c_in = plan.c_in;
  out.bases = static_cast<int>(basis_indices.size());
  out.size = grid.size;
  const std::size_t kv = grid.Volume();
  out.values.resize(static_cast<std::size_t>(plan.c_out) * plan.c_in * out.bases * kv);
  const int pairs = plan.c_out * plan.c_in;
  ParallelFor(pairs, [&](int pair) {
    const int co = pair / plan.c_in;
    const int ci = pair % plan.c_in;
    const Mat3 t = plan.PairTransform(co, ci) * grid_frame;
    for (int j = 0; j < out.bases; ++j) {
      const SampledKernel s =
          SampleOnGrid(evaluator, basis_indices[j], grid, t, plan.shifts[pair], normalize);
      std::copy(s.values.begin(), s.values.end(),
                out.values.begin() + (static_cast<std::size_t>(pair) * out.bases + j) * kv);
    }
  });
  return out;
}

KernelBank SynthesizeKernelBank(const WeightTensor& weights, const LayerBases& bases,
                                const LayerSamplingPlan& plan) {
  if (weights.c_out != bases.c_out || weights.c_in != bases.c_in ||
      weights.bases != bases.bases || plan.c_out != bases.c_out || plan.c_in != bases.c_in) {
    throw Error(ErrorCode::kInvalidArgument, "weight, basis and plan dims disagree");
  }
  KernelBank bank(bases.c_out, bases.c_in, bases.size);
  const std::size_t kv = bank.KernelVolume();
  for (int co = 0; co < bank.c_out; ++co) {
    for (int ci = 0; ci < bank.c_in; ++ci) {
      double* k = bank.Kernel(co, ci);
      for (int j = 0; j < bases.bases; ++j) {
        const double w = weights.at(co, ci, j);
        const double* b = bases.Basis(co, ci, j);
        for (std::size_t v = 0; v < kv; ++v) k[v] += w * b[v];
      }
      const double haar = plan.haar[plan.PairIndex(co, ci)];
      for (std::size_t v = 0; v < kv; ++v) k[v] *= haar;
    }
  }
  return bank;
}

KernelBank BuildKernelBank(const WeightTensor& weights,
                           const std::vector<BasisIndex>& basis_indices,
                           const BasisEvaluator& evaluator, const KernelGrid& grid,
                           const LayerSamplingPlan& plan, bool normalize,
                           const Mat3& grid_frame) {
  if (weights.bases != static_cast<int>(basis_indices.size())) {
    throw Error(ErrorCode::kInvalidArgument, "weight basis count differs from basis list");
  }
  if (weights.c_out != plan.c_out || weights.c_in != plan.c_in) {
    throw Error(ErrorCode::kInvalidArgument, "weight dims differ from plan dims");
  }
  const LayerBases bases =
      SampleLayerBases(basis_indices, evaluator, grid, plan, normalize, grid_frame);
  return SynthesizeKernelBank(weights, bases, plan);
}

Tensor4D Conv3d(const Tensor4D& input, const KernelBank& bank, PaddingMode padding) {
  if (input.channels != bank.c_in) {
    throw Error(ErrorCode::kInvalidArgument,
                "input has " + std::to_string(input.channels) + " channels, bank expects " +
                    std::to_string(bank.c_in));
  }
  if (bank.size % 2 == 0 || bank.size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kernel size must be odd");
  }
  if (input.depth < 1 || input.height < 1 || input.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "spatial dims must be positive");
  }
  const int k = bank.size;
  const int h = k / 2;
  const int D = input.depth;
  const int H = input.height;
  const int W = input.width;
  const int ph = H + 2 * h;
  const int pw = W + 2 * h;
  const auto padded = PadAll(input, h, padding);

  Tensor4D out(bank.c_out, D, H, W);
  ParallelFor(bank.c_out, [&](int co) {
    double* dst = out.values.data() + out.Index(co, 0, 0, 0);
    for (int ci = 0; ci < bank.c_in; ++ci) {
      const double* kern = bank.Kernel(co, ci);
      const double* src = padded[ci].data();
      for (int vz = 0; vz < k; ++vz) {
        for (int vy = 0; vy < k; ++vy) {
          for (int vx = 0; vx < k; ++vx) {
            const double w = kern[(vz * k + vy) * k + vx];
            for (int z = 0; z < D; ++z) {
              for (int y = 0; y < H; ++y) {
                const double* in_row =
                    src + (static_cast<std::size_t>(z + vz) * ph + (y + vy)) * pw + vx;
                double* out_row = dst + (static_cast<std::size_t>(z) * H + y) * W;
                for (int x = 0; x < W; ++x) out_row[x] += w * in_row[x];
              }
            }
          }
        }
      }
    }
  });
  return out;
}

Tensor4D ScalarConv(const Tensor4D& input, const DenseMatrix& weights) {
  if (weights.cols != input.channels) {
    throw Error(ErrorCode::kInvalidArgument, "mixing matrix columns differ from channels");
  }
  Tensor4D out(weights.rows, input.depth, input.height, input.width);
  const std::size_t nv = input.Voxels();
  ParallelFor(weights.rows, [&](int co) {
    double* dst = out.values.data() + static_cast<std::size_t>(co) * nv;
    for (int ci = 0; ci < input.channels; ++ci) {
      const double w = weights(co, ci);
      const double* src = input.values.data() + static_cast<std::size_t>(ci) * nv;
      for (std::size_t v = 0; v < nv; ++v) dst[v] += w * src[v];
    }
  });
  return out;
}

Tensor4D WmcgForward(const Tensor4D& input, const WeightTensor& weights,
                     const LayerSamplingPlan& plan,
                     const std::vector<BasisIndex>& basis_indices,
                     const BasisEvaluator& evaluator, const KernelGrid& grid,
                     PaddingMode padding, bool normalize) {
  const KernelBank bank =
      BuildKernelBank(weights, basis_indices, evaluator, grid, plan, normalize);
  return Conv3d(input, bank, padding);
}

WeightTensor GradWeights(const Tensor4D& input, const Tensor4D& grad_output,
                         const LayerSamplingPlan& plan,
                         const std::vector<BasisIndex>& basis_indices,
                         const BasisEvaluator& evaluator, const KernelGrid& grid,
                         PaddingMode padding, bool normalize) {
  if (input.channels != plan.c_in) {
    throw Error(ErrorCode::kInvalidArgument, "input channels differ from plan c_in");
  }
  if (grad_output.channels != plan.c_out || grad_output.depth != input.depth ||
      grad_output.height != input.height || grad_output.width != input.width) {
    throw Error(ErrorCode::kInvalidArgument, "grad_output dims differ from forward output");
  }
  const int k = grid.size;
  if (input.depth < 1 || input.height < 1 || input.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "spatial dims must be positive");
  }
  const LayerBases bases = SampleLayerBases(basis_indices, evaluator, grid, plan, normalize);
  const int h = k / 2;
  const int D = input.depth;
  const int H = input.height;
  const int W = input.width;
  const int ph = H + 2 * h;
  const int pw = W + 2 * h;
  const auto padded = PadAll(input, h, padding);
  const std::size_t kv = grid.Volume();

  WeightTensor grad(plan.c_out, plan.c_in, bases.bases);
  ParallelFor(plan.c_out * plan.c_in, [&](int pair) {
    const int co = pair / plan.c_in;
    const int ci = pair % plan.c_in;
    // corr[v] = sum_p g[co](p) * in[ci](p + v)
    std::vector<double> corr(kv, 0.0);
    const double* g = grad_output.values.data() + grad_output.Index(co, 0, 0, 0);
    const double* src = padded[ci].data();
    for (int vz = 0; vz < k; ++vz) {
      for (int vy = 0; vy < k; ++vy) {
        for (int vx = 0; vx < k; ++vx) {
          double s = 0;
          for (int z = 0; z < D; ++z) {
            for (int y = 0; y < H; ++y) {
              const double* in_row =
                  src + (static_cast<std::size_t>(z + vz) * ph + (y + vy)) * pw + vx;
              const double* g_row = g + (static_cast<std::size_t>(z) * H + y) * W;
              for (int x = 0; x < W; ++x) s += g_row[x] * in_row[x];
            }
          }
          corr[(vz * k + vy) * k + vx] = s;
        }
      }
    }
    const double haar = plan.haar[pair];
    for (int j = 0; j < bases.bases; ++j) {
      const double* b = bases.Basis(co, ci, j);
      double s = 0;
      for (std::size_t v = 0; v < kv; ++v) s += corr[v] * b[v];
      grad.at(co, ci, j) = haar * s;
    }
  });
  return grad;
}

WeightTensor RandomWeights(int c_out, int c_in, int bases, std::uint64_t seed) {
  WeightTensor w(c_out, c_in, bases);
  KeyedStream s = KeyedStream::ForPath(seed, {0x5745494748ULL});
  for (double& v : w.values) v = s.NextNormal();
  return w;
}

KernelBank RandomKernelBank(int c_out, int c_in, int size, std::uint64_t seed) {
  KernelBank bank(c_out, c_in, size);
  KeyedStream s = KeyedStream::ForPath(seed, {0x42414E4BULL});
  for (double& v : bank.values) v = s.NextNormal();
  return bank;
}

}  // namespace wmcg
