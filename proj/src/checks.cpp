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

#include "wmcg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

#include "wmcg/error.hpp"

namespace wmcg {

namespace {

constexpr double kPi = std::numbers::pi;
// Stream tags keeping the suites' draws apart from layer plans.
constexpr std::uint64_t kDecomposeTag = 0x4445434FULL;
constexpr std::uint64_t kGradTag = 0x47524144ULL;
constexpr std::uint64_t kEquivTag = 0x45515549ULL;

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

Mat3 RandomMatrix(KeyedStream& s) {
  for (;;) {
    Mat3 y;
    for (double& v : y.m) v = s.NextUniform(-2.0, 2.0);
    if (Determinant(y) > 0.05) return y;
  }
}

TransformParams RandomParams(KeyedStream& s) {
  TransformParams p;
  p.theta1 = s.NextUniform(-kPi, kPi);
  p.theta3 = s.NextUniform(-kPi, kPi);
  p.alpha = std::log2(s.NextUniform(1.0, 2.0));
  p.beta = std::log2(s.NextUniform(1.0, 2.0));
  p.gamma = std::log2(s.NextUniform(1.0, 2.0));
  for (double* sh : {&p.s01, &p.s10, &p.s02, &p.s20, &p.s12, &p.s21}) {
    *sh = std::tan(s.NextUniform(-0.25 * kPi, 0.25 * kPi));
  }
  return p;
}

double Norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::optional<CheckSuite> ParseCheckSuite(const std::string& name) {
  std::string lower;
  for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (CheckSuite s : {CheckSuite::kOrtho, CheckSuite::kDecompose, CheckSuite::kRoots,
                       CheckSuite::kGrad, CheckSuite::kEquiv}) {
    if (lower == SuiteName(s)) return s;
  }
  return std::nullopt;
}

const char* SuiteName(CheckSuite suite) {
  switch (suite) {
    case CheckSuite::kOrtho: return "ortho";
    case CheckSuite::kDecompose: return "decompose";
    case CheckSuite::kRoots: return "roots";
    case CheckSuite::kGrad: return "grad";
    case CheckSuite::kEquiv: return "equiv";
  }
  return "unknown";
}

bool CheckReport::Passed() const { return FirstFailure() == nullptr; }

const CheckItem* CheckReport::FirstFailure() const {
  for (const auto& item : items) {
    if (!item.Passed()) return &item;
  }
  return nullptr;
}

std::string CheckReport::ToText() const {
  std::string out;
  for (const auto& item : items) {
    out += item.Passed() ? "PASS " : "FAIL ";
    out += item.name + " measured=" + Format("%.6e", item.measured) +
           (item.inclusive ? " threshold<=" : " threshold<") + Format("%.6e", item.threshold) +
           "\n";
  }
  const CheckItem* bad = FirstFailure();
  out += "suite " + suite + (bad ? ": FAIL, first violated check " + bad->name : ": PASS") + "\n";
  return out;
}

double SignTestPValue(int wins, int trials) {
  if (trials <= 0) return 1.0;
  double p = 0;
  for (int i = std::max(wins, 0); i <= trials; ++i) {
    p += std::exp(std::lgamma(trials + 1.0) - std::lgamma(i + 1.0) -
                  std::lgamma(trials - i + 1.0) - trials * std::log(2.0));
  }
  return std::min(p, 1.0);
}

CheckReport CheckRoots(const RunConfig& config) {
  CheckReport r{"roots", {}};
  std::vector<double> radii{1.0, 2.5, 3.5};
  const double own = config.Grid().radius;
  if (std::find(radii.begin(), radii.end(), own) == radii.end()) radii.push_back(own);
  for (double radius : radii) {
    double residual = 0;
    for (int l = 0; l <= 4; ++l) {
      const auto ks = BesselBoundaryRoots(l, radius, 8);
      for (double k : ks) residual = std::max(residual, std::abs(BoundaryFunction(l, k * radius)));
    }
    double exact = 0;
    const auto ks = BesselBoundaryRoots(1, radius, 8);
    for (int n = 1; n <= 8; ++n) {
      const double want = n * kPi / radius;
      exact = std::max(exact, std::abs(ks[n - 1] - want) / want);
    }
    const std::string tag = "[R=" + Format("%g", radius) + "]";
    r.items.push_back({"roots.boundary_residual" + tag, residual, 1e-10});
    r.items.push_back({"roots.l1_vs_n_pi_over_R" + tag, exact, 1e-12});
  }
  return r;
}

CheckReport CheckDecompose(const RunConfig& config) {
  CheckReport r{"decompose", {}};
  KeyedStream s = KeyedStream::ForPath(config.augmentation.seed, {kDecomposeTag, 0});
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 y = RandomMatrix(s);
    const Mat3 back = ComposeParams(DecomposeGl3(y));
    for (int e = 0; e < 9; ++e) {
      worst = std::max(worst, std::abs(back.m[e] - y.m[e]) / std::abs(y.m[e]));
    }
  }
  r.items.push_back({"decompose.roundtrip_max_rel", worst, 1e-9});

  KeyedStream d = KeyedStream::ForPath(config.augmentation.seed, {kDecomposeTag, 1});
  double det_err = 0;
  double haar_err = 0;
  for (int i = 0; i < 10000; ++i) {
    const TransformParams p = RandomParams(d);
    const double want = std::exp2(p.alpha + p.beta + p.gamma);
    det_err = std::max(det_err, std::abs(Determinant(ComposeParams(p)) - want) / want);
    if (i < 1000) {
      const long double h = std::pow(2.0L, -2.0L * p.alpha - 2.0L * p.beta - 2.0L * p.gamma);
      haar_err = std::max(
          haar_err, static_cast<double>(std::abs(HaarCoefficient(p) - h) / h));
    }
  }
  r.items.push_back({"decompose.determinant_law_max_rel", det_err, 1e-12});
  r.items.push_back({"decompose.haar_coefficient_max_rel", haar_err, 1e-15});
  return r;
}

CheckReport CheckOrtho(const RunConfig& config) {
  CheckReport r{"ortho", {}};
  const double radius = config.Grid().radius;
  double off = 0;
  double diag = 0;
  for (int l = 0; l <= 4; ++l) {
    const DenseMatrix g = RadialGram(l, radius, 4, 10000);
    const auto ks = BesselBoundaryRoots(l, radius, 4);
    for (int i = 0; i < 4; ++i) {
      const double want = RadialNorm(l, radius, ks[i]);
      diag = std::max(diag, std::abs(g(i, i) - want) / want);
      for (int j = 0; j < 4; ++j) {
        if (i != j) off = std::max(off, std::abs(g(i, j)) / std::sqrt(g(i, i) * g(j, j)));
      }
    }
  }
  r.items.push_back({"ortho.radial_offdiag_over_diag", off, 1e-6});
  r.items.push_back({"ortho.radial_diag_vs_closed_form", diag, 1e-6});

  const DenseMatrix a = AngularGram(4, 16, 32);
  double ang = 0;
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) ang = std::max(ang, std::abs(a(i, j) - (i == j ? 1.0 : 0.0)));
  }
  r.items.push_back({"ortho.angular_gram_vs_identity", ang, 1e-8});
  return r;
}

CheckReport CheckGrad(const RunConfig& config, int instances) {
  CheckReport r{"grad", {}};
  const KernelGrid grid = config.Grid();
  const BasisEvaluator ev(config.profile, grid.radius);
  const auto bases = config.Bases();
  const int nb = static_cast<int>(bases.size());
  double worst = 0;
  for (int inst = 0; inst < instances; ++inst) {
    KeyedStream s = KeyedStream::ForPath(config.weight_seed, {kGradTag, std::uint64_t(inst)});
    const int c_out = 1 + s.NextIndex(3);
    const int c_in = 1 + s.NextIndex(3);
    const int size = 6 + s.NextIndex(3);
    AugmentationConfig aug = config.augmentation;
    aug.seed = s.NextU64();
    const auto plan = BuildLayerPlan(aug, c_out, c_in, grid.size, inst);
    const LayerBases lb = SampleLayerBases(bases, ev, grid, plan, config.normalize);

    Tensor4D input(c_in, size, size, size);
    for (double& v : input.values) v = s.NextNormal();
    Tensor4D g_out(c_out, size, size, size);
    for (double& v : g_out.values) v = s.NextNormal();
    WeightTensor w(c_out, c_in, nb);
    for (double& v : w.values) v = s.NextNormal();

    auto loss = [&](const WeightTensor& wt) {
      const Tensor4D y = Conv3d(input, SynthesizeKernelBank(wt, lb, plan), config.padding);
      double acc = 0;
      for (std::size_t i = 0; i < y.values.size(); ++i) acc += y.values[i] * g_out.values[i];
      return acc;
    };
    const WeightTensor analytic = GradWeights(input, g_out, plan, bases, ev, grid,
                                              config.padding, config.normalize);
    constexpr double kStep = 1e-4;
    std::vector<double> diff(w.values.size());
    std::vector<double> fd(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      WeightTensor wp = w;
      WeightTensor wm = w;
      wp.values[i] += kStep;
      wm.values[i] -= kStep;
      fd[i] = (loss(wp) - loss(wm)) / (2 * kStep);
      diff[i] = analytic.values[i] - fd[i];
    }
    worst = std::max(worst, Norm2(diff) / std::max(Norm2(fd), 1e-300));
  }
  r.items.push_back({"grad.analytic_vs_central_difference", worst, 1e-5});
  return r;
}

LayerFactory MakeLayerFactory(const RunConfig& config, EquivLayerKind kind, bool matched) {
  RunConfig c = config;
  c.weights = config.equiv_weights;
  const PaddingMode padding = config.padding;
  if (kind == EquivLayerKind::kRandomBank) {
    return [c, padding](std::uint64_t seed, const Mat3&) {
      const KernelBank bank = RandomKernelBank(c.c_out, c.c_in, c.kernel_size, seed);
      Layer layer = [bank, padding](const Tensor4D& x) { return Conv3d(x, bank, padding); };
      return LayerPair{layer, layer};
    };
  }
  const KernelGrid grid = config.Grid();
  auto ev = std::make_shared<const BasisEvaluator>(config.profile, grid.radius);
  const auto bases = config.Bases();
  // File weights are read once up front.
  std::optional<WeightTensor> fixed;
  if (c.weights == WeightSource::kFile) {
    fixed = LoadWeightFile(c.weight_file, c.c_out, c.c_in, static_cast<int>(bases.size()));
  }
  return [c, grid, ev, bases, fixed, padding, matched](std::uint64_t seed, const Mat3& t) {
    AugmentationConfig aug = c.augmentation;
    aug.seed = seed;
    const auto plan = BuildLayerPlan(aug, c.c_out, c.c_in, grid.size, c.layer_id);
    const WeightTensor w =
        fixed ? *fixed : ConfiguredWeights(c, static_cast<int>(bases.size()), seed);
    const KernelBank bank = BuildKernelBank(w, bases, *ev, grid, plan, c.normalize);
    Layer on_original = [bank, padding](const Tensor4D& x) { return Conv3d(x, bank, padding); };
    if (!matched) return LayerPair{on_original, on_original};
    const KernelBank tbank = BuildKernelBank(w, bases, *ev, grid, plan, c.normalize, Inverse(t));
    Layer on_transformed = [tbank, padding](const Tensor4D& x) {
      return Conv3d(x, tbank, padding);
    };
    return LayerPair{on_transformed, on_original};
  };
}

SweepConfig MakeSweepConfig(const RunConfig& config) {
  SweepConfig s;
  s.family = config.equiv_family;
  s.n_samples = config.equiv_samples;
  s.seed = config.equiv_seed;
  s.volume_size = config.equiv_volume_size;
  s.channels = config.c_in;
  s.volume_kind = config.equiv_volume;
  s.crop_margin = config.equiv_crop_margin;
  return s;
}

CheckReport CheckEquiv(const RunConfig& config) {
  CheckReport r{"equiv", {}};
  const KernelGrid grid = config.Grid();
  const BasisEvaluator ev(config.profile, grid.radius);
  const auto bases = config.Bases();
  const int nb = static_cast<int>(bases.size());
  const auto plan = BuildLayerPlan(config.augmentation, config.c_out, config.c_in, grid.size,
                                   config.layer_id);
  const KernelBank bank = BuildKernelBank(ConfiguredWeights(config, nb, config.weight_seed),
                                          bases, ev, grid, plan, config.normalize);
  const Tensor4D vol = SynthVolume(config.equiv_volume, config.c_in, 16, config.equiv_seed);

  // Identity transform.
  const Layer zero_pad = [&](const Tensor4D& x) { return Conv3d(x, bank, PaddingMode::kZero); };
  const auto id = MeasureEquivariance(zero_pad, vol, {Mat3::Identity()}, 0);
  r.items.push_back({"equiv.identity_rel_l2", id.rel_l2, 0.0, true});

  // Integer translations with circular padding.
  const Layer circ = [&](const Tensor4D& x) { return Conv3d(x, bank, PaddingMode::kCircular); };
  KeyedStream s = KeyedStream::ForPath(config.equiv_seed, {kEquivTag});
  double trans = 0;
  for (int i = 0; i < 20; ++i) {
    const IntVec3 shift{s.NextIndex(33) - 16, s.NextIndex(33) - 16, s.NextIndex(33) - 16};
    trans = std::max(trans, MeasureTranslationEquivariance(circ, vol, shift).rel_l2);
  }
  r.items.push_back({"equiv.translation_circular_rel_l2", trans, 1e-12});

  // Quarter turns with the rotated kernel bank.
  double quarter = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int turns = 1; turns <= 3; ++turns) {
      const Mat3 q = QuarterTurn(axis, turns);
      const KernelBank rotated = RotateKernelBank(bank, q);
      const Layer on_t = [&](const Tensor4D& x) {
        return Conv3d(x, rotated, config.padding);
      };
      const Layer on_o = [&](const Tensor4D& x) { return Conv3d(x, bank, config.padding); };
      VolumeTransformSpec spec{q, Interpolation::kNearestNeighbor, OutOfRange::kZeroFill};
      quarter = std::max(quarter,
                         MeasureEquivariance(on_t, on_o, vol, spec, grid.size / 2).rel_l2);
    }
  }
  r.items.push_back({"equiv.quarter_turn_matched_rel_l2", quarter, 1e-6});

  // Direction against a random bank of identical shape.
  const SweepConfig sweep = MakeSweepConfig(config);
  const auto wm = SweepReport(MakeLayerFactory(config, EquivLayerKind::kWmcg), sweep);
  const auto rb = SweepReport(MakeLayerFactory(config, EquivLayerKind::kRandomBank), sweep);
  int wins = 0;
  int trials = 0;
  for (std::size_t i = 0; i < wm.samples.size(); ++i) {
    const double a = wm.samples[i].error.rel_l2;
    const double b = rb.samples[i].error.rel_l2;
    if (a == b) continue;
    ++trials;
    wins += a < b ? 1 : 0;
  }
  r.items.push_back({std::string("equiv.direction_mean_rel_l2[") + FamilyName(sweep.family) +
                         "] wmcg vs random",
                     wm.mean_rel_l2, rb.mean_rel_l2});
  r.items.push_back({"equiv.direction_sign_test_p", SignTestPValue(wins, trials), 0.05});
  return r;
}

CheckReport RunCheckSuite(CheckSuite suite, const RunConfig& config) {
  switch (suite) {
    case CheckSuite::kOrtho: return CheckOrtho(config);
    case CheckSuite::kDecompose: return CheckDecompose(config);
    case CheckSuite::kRoots: return CheckRoots(config);
    case CheckSuite::kGrad: return CheckGrad(config);
    case CheckSuite::kEquiv: return CheckEquiv(config);
  }
  throw Error(ErrorCode::kInternal, "unknown suite");
}

}  // namespace wmcg
