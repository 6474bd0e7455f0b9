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

#include "wmcg/equiv_harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "wmcg/error.hpp"

namespace wmcg {
namespace {

constexpr double kPi = std::numbers::pi;

Layer ConvLayer(const KernelBank& bank, PaddingMode padding) {
  return [bank, padding](const Tensor4D& x) { return Conv3d(x, bank, padding); };
}

KernelBank WmcgBank(int c_out, int c_in, int k, std::uint64_t seed, bool shifts = true) {
  const KernelGrid grid = KernelGrid::WithDefaultRadius(k);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  AugmentationConfig c;
  c.seed = seed;
  c.shift_enabled = shifts;
  const auto plan = BuildLayerPlan(c, c_out, c_in, k, 0);
  return BuildKernelBank(RandomWeights(c_out, c_in, 27, seed), EnumerateBases(27), ev, grid,
                         plan);
}

TEST(SynthVolumeTest, DeterministicAndNormalized) {
  const Tensor4D a = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 5);
  EXPECT_EQ(a.values, SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 5).values);
  EXPECT_NE(a.values, SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 6).values);
  double sum = 0, sum2 = 0;
  for (int i = 0; i < 16 * 16 * 16; ++i) {
    sum += a.values[i];
    sum2 += a.values[i] * a.values[i];
  }
  // Periodic modes with DC excluded average to zero over the grid.
  EXPECT_NEAR(sum / 4096, 0.0, 1e-12);
  EXPECT_NEAR(sum2 / 4096, 1.0, 0.5);
  const Tensor4D b = SynthVolume(VolumeKind::kSmoothBlobs, 1, 16, 5);
  EXPECT_EQ(b.channels, 1);
  EXPECT_THROW(SynthVolume(VolumeKind::kSmoothBlobs, 1, 8, 5), Error);
}

TEST(SynthVolumeTest, BlobsBoundedByAmplitudeSum) {
  const Tensor4D b = SynthVolume(VolumeKind::kSmoothBlobs, 3, 16, 12);
  for (double v : b.values) {
    ASSERT_TRUE(std::isfinite(v));
    ASSERT_LE(std::abs(v), 8.0);
  }
}

TEST(ResampleTest, InversePairRecoversBandlimitedInterior) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 1, 32, 13);
  TransformParams p;
  p.theta1 = 0.7;
  p.theta3 = -1.2;
  p.alpha = p.beta = p.gamma = 0.3;
  p.s01 = 0.4;
  p.s12 = -0.3;
  const Mat3 m = ComposeParams(p);
  const Tensor4D back = ResampleVolume(ResampleVolume(v, {m}), {Inverse(m)});
  double num = 0, den = 0;
  for (int z = 10; z < 22; ++z)
    for (int y = 10; y < 22; ++y)
      for (int x = 10; x < 22; ++x) {
        const double d = back.at(0, z, y, x) - v.at(0, z, y, x);
        num += d * d;
        den += v.at(0, z, y, x) * v.at(0, z, y, x);
      }
  EXPECT_LT(std::sqrt(num / den), 0.05);
}

TEST(ResampleTest, IdentityIsExact) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 1);
  EXPECT_EQ(ResampleVolume(v, {Mat3::Identity()}).values, v.values);
}

TEST(ResampleTest, QuarterTurnPermutesVoxels) {
  const Tensor4D v = SynthVolume(VolumeKind::kSmoothBlobs, 1, 16, 2);
  const Mat3 q = QuarterTurn(2, 1);  // (x, y) -> (-y, x) about the center
  for (Interpolation interp : {Interpolation::kNearestNeighbor, Interpolation::kTrilinear}) {
    const Tensor4D r = ResampleVolume(v, {q, interp, OutOfRange::kZeroFill});
    for (int z = 0; z < 16; ++z)
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
          // out(x, y) = in(Q^-1 (x - c) + c) = in(y, 15 - x)
          ASSERT_EQ(r.at(0, z, y, x), v.at(0, z, 15 - x, y));
        }
  }
}

TEST(ResampleTest, ScalingPullsFromCenterAndZeroFills) {
  const Tensor4D v = SynthVolume(VolumeKind::kSmoothBlobs, 1, 16, 3);
  const Tensor4D r = ResampleVolume(v, {Mat3::Diagonal(0.5, 0.5, 0.5)});
  // Preimage of a corner voxel lies outside the volume.
  EXPECT_EQ(r.at(0, 0, 0, 0), 0.0);
  const Tensor4D w = ResampleVolume(v, {Mat3::Diagonal(0.5, 0.5, 0.5), Interpolation::kTrilinear,
                                        OutOfRange::kWrap});
  EXPECT_NE(w.at(0, 0, 0, 0), 0.0);
  EXPECT_THROW(ResampleVolume(v, {Mat3::Diagonal(1, 1, -1)}), Error);
}

TEST(RotateKernelBankTest, ExplicitMapAndFourTurns) {
  const KernelBank bank = RandomKernelBank(2, 1, 3, 9);
  const Mat3 q = QuarterTurn(0, 1);
  const KernelBank r = RotateKernelBank(bank, q);
  // K'(u) = K(Q^T u); about x: (y, z) -> (z, -y).
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) {
        const int sy = z, sz = 2 - y;
        EXPECT_EQ(r.Kernel(1, 0)[(z * 3 + y) * 3 + x], bank.Kernel(1, 0)[(sz * 3 + sy) * 3 + x]);
      }
  KernelBank acc = bank;
  for (int t = 0; t < 4; ++t) acc = RotateKernelBank(acc, QuarterTurn(1, 1));
  EXPECT_EQ(acc.values, bank.values);
  EXPECT_THROW(RotateKernelBank(bank, Mat3::Diagonal(2, 1, 0.5)), Error);
}

TEST(RotateKernelBankTest, FrameRouteMatchesRotatedBank) {
  // Without shifts, sampling in a rotated frame equals rotating the bank.
  const KernelGrid grid = KernelGrid::WithDefaultRadius(5);
  const BasisEvaluator ev(RadialProfile::SphericalBessel(), grid.radius);
  AugmentationConfig c;
  c.seed = 4;
  c.shift_enabled = false;
  const auto plan = BuildLayerPlan(c, 2, 2, 5, 0);
  const auto bases = EnumerateBases(27);
  const WeightTensor w = RandomWeights(2, 2, 27, 4);
  for (int axis = 0; axis < 3; ++axis) {
    const Mat3 q = QuarterTurn(axis, 1);
    const KernelBank rotated = RotateKernelBank(BuildKernelBank(w, bases, ev, grid, plan), q);
    const KernelBank framed = BuildKernelBank(w, bases, ev, grid, plan, true, Transpose(q));
    for (std::size_t i = 0; i < rotated.values.size(); ++i) {
      EXPECT_NEAR(framed.values[i], rotated.values[i], 1e-12);
    }
  }
}

TEST(InteriorMaskTest, IdentityKeepsCroppedCube) {
  const auto mask = InteriorMask(16, 16, 16, Mat3::Identity(), 3);
  std::size_t n = 0;
  for (char v : mask) n += v;
  EXPECT_EQ(n, 10u * 10u * 10u);
  EXPECT_EQ(mask[(3 * 16 + 3) * 16 + 3], 1);
  EXPECT_EQ(mask[(2 * 16 + 3) * 16 + 3], 0);
}

TEST(InteriorMaskTest, ScalingShrinksValidRegion) {
  const auto mask = InteriorMask(32, 32, 32, Mat3::Diagonal(0.5, 0.5, 0.5), 2);
  std::size_t n = 0;
  for (char v : mask) n += v;
  EXPECT_GT(n, 0u);
  EXPECT_LT(n, 28u * 28u * 28u);
  // Shrinking pulls samples from outside; the center survives, the rim does not.
  EXPECT_EQ(mask[(16 * 32 + 16) * 32 + 16], 1);
  EXPECT_EQ(mask[(16 * 32 + 16) * 32 + 3], 0);
}

TEST(MeasureTest, IdentityTransformGivesZero) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 7);
  const auto e = MeasureEquivariance(ConvLayer(WmcgBank(3, 2, 5, 1), PaddingMode::kZero), v,
                                     {Mat3::Identity()}, 2);
  EXPECT_EQ(e.rel_l2, 0.0);
  EXPECT_EQ(e.max_abs, 0.0);
  EXPECT_EQ(e.voxels, 12u * 12u * 12u);
}

TEST(MeasureTest, TranslationWithCircularPaddingIsExact) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 8);
  const Layer layer = ConvLayer(WmcgBank(2, 2, 5, 2), PaddingMode::kCircular);
  KeyedStream s = KeyedStream::ForPath(8, {});
  for (int i = 0; i < 20; ++i) {
    const IntVec3 shift{s.NextIndex(40) - 20, s.NextIndex(40) - 20, s.NextIndex(40) - 20};
    EXPECT_LT(MeasureTranslationEquivariance(layer, v, shift).rel_l2, 1e-12);
  }
  const Tensor4D rolled = ShiftVolume(v, {1, 0, 0});
  EXPECT_EQ(rolled.at(1, 2, 3, 4), v.at(1, 2, 3, 3));
  EXPECT_EQ(rolled.at(1, 2, 3, 0), v.at(1, 2, 3, 15));
}

TEST(MeasureTest, QuarterTurnWithMatchedBank) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 9);
  const KernelBank bank = WmcgBank(3, 2, 5, 3);
  for (int axis = 0; axis < 3; ++axis) {
    const Mat3 q = QuarterTurn(axis, 1);
    const auto e = MeasureEquivariance(ConvLayer(RotateKernelBank(bank, q), PaddingMode::kZero),
                                       ConvLayer(bank, PaddingMode::kZero), v,
                                       {q, Interpolation::kNearestNeighbor}, 2);
    EXPECT_LT(e.rel_l2, 1e-6);
    // The unmatched bank is far from equivariant.
    const auto u = MeasureEquivariance(ConvLayer(bank, PaddingMode::kZero), v,
                                       {q, Interpolation::kNearestNeighbor}, 2);
    EXPECT_GT(u.rel_l2, 1e-3);
  }
}

TEST(MeasureTest, InvariantUnderInputScaling) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 2, 16, 10);
  Tensor4D s = v;
  for (double& x : s.values) x *= 3.7;
  const Layer layer = ConvLayer(WmcgBank(2, 2, 5, 5), PaddingMode::kZero);
  TransformParams p;
  p.theta1 = 0.4;
  p.s01 = 0.3;
  const VolumeTransformSpec spec{ComposeParams(p)};
  EXPECT_NEAR(MeasureEquivariance(layer, v, spec, 2).rel_l2,
              MeasureEquivariance(layer, s, spec, 2).rel_l2, 1e-10);
}

TEST(MeasureTest, LayerChangingDimsIsRejected) {
  const Tensor4D v = SynthVolume(VolumeKind::kBandlimitedNoise, 1, 16, 11);
  const Layer bad = [](const Tensor4D& x) {
    return Tensor4D(x.channels, x.depth - 1, x.height, x.width);
  };
  try {
    MeasureEquivariance(bad, v, {Mat3::Identity()}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLayerContractViolation);
  }
}

TEST(FamilyTest, DrawsStayInFamily) {
  const SweepRanges ranges;
  KeyedStream s = KeyedStream::ForPath(12, {});
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = ComposeParams(DrawFamilyTransform(TransformFamily::kRotation, ranges, s));
    const Mat3 rrt = r * Transpose(r);
    for (int e = 0; e < 9; ++e) EXPECT_NEAR(rrt.m[e], Mat3::Identity().m[e], 1e-14);
    const TransformParams sc = DrawFamilyTransform(TransformFamily::kScaling, ranges, s);
    EXPECT_GE(std::exp2(sc.alpha), 1.0);
    EXPECT_LT(std::exp2(sc.alpha), 2.0);
    EXPECT_EQ(sc.alpha, sc.gamma);
    EXPECT_EQ(sc.theta1, 0.0);
    const TransformParams sh = DrawFamilyTransform(TransformFamily::kShear, ranges, s);
    EXPECT_EQ(sh.alpha, 0.0);
    EXPECT_TRUE(std::isfinite(sh.s12));
    EXPECT_NEAR(Determinant(ComposeParams(sh)), 1.0, 1e-6 * MaxAbs(ComposeParams(sh)));
    EXPECT_EQ(ComposeParams(DrawFamilyTransform(TransformFamily::kIdentity, ranges, s)),
              Mat3::Identity());
  }
  EXPECT_STREQ(FamilyName(TransformFamily::kFullAffine), "full_affine");
  EXPECT_DOUBLE_EQ(ranges.shear_angle.hi, 0.5 * kPi);
}

SweepConfig SmallSweep(TransformFamily family) {
  SweepConfig c;
  c.family = family;
  c.n_samples = 4;
  c.volume_size = 16;
  c.channels = 2;
  c.seed = 13;
  return c;
}

LayerPair FixedLayer(std::uint64_t seed, const Mat3&) {
  const Layer l = ConvLayer(WmcgBank(2, 2, 5, seed), PaddingMode::kZero);
  return {l, l};
}

TEST(SweepTest, IdentityFamilyIsZero) {
  const auto r = SweepReport(FixedLayer, SmallSweep(TransformFamily::kIdentity));
  ASSERT_EQ(r.samples.size(), 4u);
  EXPECT_EQ(r.mean_rel_l2, 0.0);
  EXPECT_EQ(r.std_rel_l2, 0.0);
  EXPECT_EQ(r.mean_max_abs, 0.0);
}

TEST(SweepTest, DeterministicReportWithRequiredFields) {
  const auto cfg = SmallSweep(TransformFamily::kFullAffine);
  const std::string a = ReportToJsonLines(SweepReport(FixedLayer, cfg));
  const std::string b = ReportToJsonLines(SweepReport(FixedLayer, cfg));
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string line;
  int samples = 0, summaries = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("family"), "full_affine");
    EXPECT_TRUE(j.contains("crop"));
    EXPECT_TRUE(j.contains("seed"));
    if (j.at("record") == "sample") {
      ++samples;
      EXPECT_EQ(j.at("params").size(), 11u);
      EXPECT_GT(j.at("rel_l2").get<double>(), 0.0);
      EXPECT_TRUE(j.contains("max_abs"));
    } else {
      ++summaries;
      EXPECT_TRUE(j.contains("mean_rel_l2"));
      EXPECT_TRUE(j.contains("std_rel_l2"));
    }
  }
  EXPECT_EQ(samples, 4);
  EXPECT_EQ(summaries, 1);
}

TEST(SweepTest, ThreadCountDoesNotChangeReport) {
  const auto cfg = SmallSweep(TransformFamily::kShear);
  setenv("WMCG_THREADS", "1", 1);
  const std::string one = ReportToJsonLines(SweepReport(FixedLayer, cfg));
  setenv("WMCG_THREADS", "3", 1);
  const std::string three = ReportToJsonLines(SweepReport(FixedLayer, cfg));
  unsetenv("WMCG_THREADS");
  EXPECT_EQ(one, three);
}

}  // namespace
}  // namespace wmcg
